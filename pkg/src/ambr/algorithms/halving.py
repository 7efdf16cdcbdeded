"""Adaptive MBR: correlated sequential halving over candidates with a shared,
growing reference set. Also the resampling variant, the medoid adapter and
the doubling trick for picking a budget."""

from __future__ import annotations

import math

import numpy as np

from ..core import Instance, Selection, UtilityOracle, argmax_lowest, as_list, top_k_lowest
from ..metrics import validate_matrix, matrix_oracle


def n_rounds(n: int) -> int:
    """ceil(log2 n) for n >= 1."""
    return (n - 1).bit_length()


def _halving(oracle: UtilityOracle, T: int, rng: np.random.Generator,
             replace: bool, stop: int | None = None) -> Selection:
    n = oracle.n
    start = oracle.ledger.used
    if stop is None:
        stop = start + T
    if n == 1:
        return Selection(0, 0, [])
    rounds = n_rounds(n)
    H = list(range(n))
    R: list[int] = []
    trace = []
    for i in range(rounds):
        t = min(max(T // (len(H) * rounds), 1), n)
        if replace:
            J = sorted(rng.choice(n, t, replace=False).tolist())
            refs = J
        else:
            need = t - len(R)
            if need > 0:
                rest = np.setdiff1d(np.arange(n), R)
                J = sorted(rng.choice(rest, need, replace=False).tolist())
            else:
                J = []
            refs = sorted(R + J)
        complete = oracle.fill(H, refs, stop=stop)
        est = oracle.row_means(H, refs)
        rec = {"iteration": i, "candidates": list(H), "t": t, "new_refs": J,
               "refs_size": len(refs), "estimates": as_list(est)}
        trace.append(rec)
        if not complete:
            rec["truncated"] = True
            break
        if t == n:
            break
        survivors = top_k_lowest(H, est, math.ceil(len(H) / 2))
        if i == rounds - 1:
            break
        H = survivors
        R = refs
    return Selection(H[argmax_lowest(est)], oracle.ledger.used - start, trace)


def ambr(instance: Instance, oracle: UtilityOracle, T: int,
         rng: np.random.Generator) -> Selection:
    """Budgeted MBR; references accumulate across rounds."""
    return _halving(oracle, T, rng, replace=False)


def ambr_replace(instance: Instance, oracle: UtilityOracle, T: int,
                 rng: np.random.Generator) -> Selection:
    """Like :func:`ambr` but each round estimates from a fresh reference draw
    of size t_i; previously cached pairs remain free."""
    return _halving(oracle, T, rng, replace=True)


def medoid(distances, T: int, rng: np.random.Generator) -> int:
    """Index minimising the diagonal-free sum of distances, found with AMBR on -d."""
    d = validate_matrix(distances)
    inst = Instance(id="medoid", candidates=list(range(d.shape[0])), utility_matrix=-d)
    oracle = matrix_oracle(inst, budget=T)
    return ambr(inst, oracle, T, rng).chosen


def doubling_trick(instance: Instance, oracle: UtilityOracle, T0: int, cap: int,
                   rng: np.random.Generator) -> Selection:
    """Rerun AMBR at budgets T0, 2*T0, ... until two consecutive picks agree.

    The cache is shared across runs and total new evaluations never exceed
    ``cap``. The final trace record carries the ``converged`` flag.
    """
    if not 1 <= T0 <= cap:
        raise ValueError(f"need 1 <= T0 <= cap, got T0={T0}, cap={cap}")
    start = oracle.ledger.used
    if oracle.n == 1:
        return Selection(0, 0, [{"run": 0, "budget": T0, "chosen": 0, "converged": True}])
    trace = []
    T = T0
    prev = None
    while True:
        sub = np.random.default_rng(rng.integers(2 ** 63))
        run_start = oracle.ledger.used
        sel = _halving(oracle, T, sub, replace=False,
                       stop=min(run_start + T, start + cap))
        trace.append({"run": len(trace), "budget": T, "chosen": sel.chosen,
                      "evals": sel.evals_used})
        if prev is not None and sel.chosen == prev:
            converged = True
            break
        if T >= cap:
            converged = False
            break
        prev = sel.chosen
        T = min(2 * T, cap)
    trace.append({"converged": converged})
    return Selection(sel.chosen, oracle.ledger.used - start, trace)
