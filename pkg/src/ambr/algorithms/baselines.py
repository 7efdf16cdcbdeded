"""Full and reduced MBR baselines: exact MBR, N-by-S, coarse-to-fine,
reference aggregation and reward-weighted MBR."""

from __future__ import annotations

import math

import numpy as np

from ..core import (AmbrError, BudgetExhausted, Instance, Selection, UtilityOracle, as_list,
                    argmax_lowest, top_k_lowest)
from ..metrics import MissingEmbeddings, ZeroVector


class BudgetTooSmall(AmbrError, ValueError):
    pass


class MissingRewards(AmbrError, ValueError):
    pass


def full_pool_scores(oracle: UtilityOracle) -> np.ndarray:
    """Diagonal-free mean utility of every candidate against the whole pool.

    Raises BudgetExhausted up front if the uncached pairs do not fit.
    """
    pool = range(oracle.n)
    missing, _ = oracle.missing_pairs(pool, pool)
    if missing.size > oracle.ledger.remaining:
        raise BudgetExhausted(
            f"full MBR needs {missing.size} more evaluations, "
            f"{oracle.ledger.remaining} remain")
    oracle.fill(pool, pool)
    if oracle.n == 1:
        return np.zeros(1)
    return oracle.row_means(pool, pool)


def exact_mbr(instance: Instance, oracle: UtilityOracle) -> Selection:
    start = oracle.ledger.used
    scores = full_pool_scores(oracle)
    return Selection(argmax_lowest(scores), oracle.ledger.used - start,
                     [{"estimates": as_list(scores)}])


def nbys(instance: Instance, oracle: UtilityOracle, T: int,
         rng: np.random.Generator) -> Selection:
    """All candidates against ``ceil(T / (N-1))`` uniformly drawn references."""
    n = oracle.n
    start = oracle.ledger.used
    if n == 1:
        return Selection(0, 0, [])
    if T < n - 1:
        raise BudgetTooSmall(f"N-by-S needs T >= N-1 = {n - 1}, got {T}")
    size = min(math.ceil(T / (n - 1)), n)
    refs = sorted(rng.choice(n, size, replace=False).tolist())
    complete = oracle.fill(range(n), refs, stop=start + T)
    est = oracle.row_means(range(n), refs)
    rec = {"references": refs, "estimates": as_list(est)}
    if not complete:
        rec["truncated"] = True
    return Selection(argmax_lowest(est), oracle.ledger.used - start, [rec])


def coarse_to_fine(instance: Instance, coarse: UtilityOracle, fine: UtilityOracle,
                   T: int) -> Selection:
    """Rank by a cheap utility over the full pool, then run fine MBR on the top
    ``ceil(T / (N-1))`` candidates.

    Only ``fine`` evaluations count toward ``T``; the coarse count is reported
    in the trace.
    """
    if coarse is fine:
        raise ValueError("coarse and fine must be separate oracles (their ledgers differ)")
    n = fine.n
    start = fine.ledger.used
    if n == 1:
        return Selection(0, 0, [])
    if T < n - 1:
        raise BudgetTooSmall(f"coarse-to-fine needs T >= N-1 = {n - 1}, got {T}")
    pool = list(range(n))
    coarse_start = coarse.ledger.used
    coarse.fill(pool, pool)
    coarse_est = coarse.row_means(pool, pool)
    keep = top_k_lowest(pool, coarse_est, min(math.ceil(T / (n - 1)), n))
    complete = fine.fill(keep, pool, stop=start + T)
    est = fine.row_means(keep, pool)
    trace = [
        {"stage": "coarse", "coarse_evals": coarse.ledger.used - coarse_start,
         "estimates": as_list(coarse_est)},
        {"stage": "fine", "candidates": keep, "estimates": as_list(est)},
    ]
    if not complete:
        trace[-1]["truncated"] = True
    return Selection(keep[argmax_lowest(est)], fine.ledger.used - start, trace)


def reference_aggregation(instance: Instance) -> Selection:
    """Score each candidate against the mean of the other unit embeddings.

    One aggregated scoring per candidate, so ``evals_used`` is N.
    """
    if instance.embeddings is None:
        raise MissingEmbeddings(f"instance {instance.id!r} has no embeddings")
    e = instance.embeddings
    norms = np.linalg.norm(e, axis=1)
    if np.any(norms == 0):
        raise ZeroVector(f"instance {instance.id!r} has a zero embedding")
    n = instance.n
    if n == 1:
        return Selection(0, 1, [])
    unit = e / norms[:, None]
    total = unit.sum(axis=0)
    # leave-one-out mean reference for each candidate
    scores = (unit @ total - np.einsum("ij,ij->i", unit, unit)) / (n - 1)
    # the aggregate reorders the sums, so exact ties can differ by rounding;
    # treat anything within a few ulps of the best as tied (lowest index wins)
    tol = 1e-12 * max(1.0, float(np.abs(scores).max()))
    chosen = int(np.flatnonzero(scores >= scores.max() - tol)[0])
    return Selection(chosen, n, [{"estimates": as_list(scores)}])


def reward_mbr(instance: Instance, oracle: UtilityOracle, T: int) -> Selection:
    """argmax_h mean_y u(h, y) * R(y), diagonal-free over the pool."""
    if instance.rewards is None:
        raise MissingRewards(f"instance {instance.id!r} has no rewards")
    n = oracle.n
    start = oracle.ledger.used
    if n == 1:
        return Selection(0, 0, [])
    pool = list(range(n))
    missing, _ = oracle.missing_pairs(pool, pool)
    if T < n * (n - 1) or missing.size > oracle.ledger.remaining:
        raise BudgetExhausted(f"reward MBR needs the full {n * (n - 1)} evaluations")
    oracle.fill(pool, pool, stop=start + T)
    vals, mask = oracle.block(pool, pool)
    scores = (vals * instance.rewards[None, :]).sum(axis=1) / mask.sum(axis=1)
    return Selection(argmax_lowest(scores), oracle.ledger.used - start,
                     [{"estimates": as_list(scores)}])
