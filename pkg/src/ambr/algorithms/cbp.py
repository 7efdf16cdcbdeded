"""Confidence-based pruning with bootstrap win ratios and a doubling
reference schedule, truncated at the evaluation budget."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Instance, Selection, UtilityOracle, argmax_lowest, as_list


@dataclass(frozen=True)
class CbpConfig:
    r0: int = 1
    alpha: float = 0.9
    B: int = 500

    def __post_init__(self):
        if self.r0 < 1:
            raise ValueError("r0 must be >= 1")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.B < 1:
            raise ValueError("B must be >= 1")


def win_ratios(vals: np.ndarray, mask: np.ndarray, incumbent: int, pool_size: int,
               B: int, rng: np.random.Generator) -> np.ndarray:
    """Bootstrap win ratio of every row against row ``incumbent``.

    ``vals``/``mask`` are the candidates x references block. Each of the ``B``
    resamples draws ``pool_size`` references with replacement; a row wins when
    its diagonal-free resample mean is >= the incumbent's. A comparison where
    either side has no usable reference counts as a win.
    """
    m = vals.shape[1]
    counts = rng.multinomial(pool_size, np.full(m, 1.0 / m), size=B).astype(float)
    sums = counts @ vals.T
    used = counts @ mask.T.astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(used > 0, sums / np.maximum(used, 1), np.nan)
    ref = means[:, [incumbent]]
    wins = (means >= ref) | np.isnan(means) | np.isnan(ref)
    return wins.mean(axis=0)


def cbp(instance: Instance, oracle: UtilityOracle, T: int, cfg: CbpConfig,
        rng: np.random.Generator) -> Selection:
    n = oracle.n
    start = oracle.ledger.used
    stop = start + T
    if n == 1:
        return Selection(0, 0, [])
    # references are revealed from the fixed pool in shuffled order
    order = rng.permutation(n)
    H = list(range(n))
    trace = []
    prev_size = 0
    i = 0
    while True:
        r = min(cfg.r0 * 2 ** i, n)
        refs = sorted(order[:r].tolist())
        complete = oracle.fill(H, refs, stop=stop)
        est = oracle.row_means(H, refs)
        best = argmax_lowest(est)
        incumbent = H[best]
        rec = {"iteration": i, "r": r, "candidates": list(H),
               "new_refs": sorted(order[prev_size:r].tolist()),
               "estimates": as_list(est), "incumbent": incumbent}
        trace.append(rec)
        if not complete:
            rec["truncated"] = True
            break
        if r >= n:
            break
        vals, mask = oracle.block(H, refs)
        w = win_ratios(vals, mask, best, n, cfg.B, rng)
        H = [h for h, wh in zip(H, w) if wh >= 1 - cfg.alpha]
        rec["win_ratio"] = w.tolist()
        rec["survivors"] = list(H)
        if len(H) == 1:
            break
        prev_size = r
        i += 1
    return Selection(incumbent, oracle.ledger.used - start, trace)
