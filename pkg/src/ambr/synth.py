"""Synthetic utility-matrix instances with brute-force ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Instance, make_rng


@dataclass(frozen=True)
class PlantedSpec:
    n: int
    gap: float = 0.1
    noise_sigma: float = 0.1
    base: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("planted instances need n >= 2")
        if self.gap < 0 or self.noise_sigma < 0:
            raise ValueError("gap and noise_sigma must be >= 0")


def brute_force_best(matrix) -> int:
    """Lowest index with the largest off-diagonal row mean, by plain loops."""
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    best, best_val = 0, None
    for i in range(n):
        if n == 1:
            break
        total = 0.0
        for j in range(n):
            if j != i:
                total += m[i, j]
        val = total / (n - 1)
        if best_val is None or val > best_val:
            best, best_val = i, val
    return best


def planted_instance(spec: PlantedSpec, id: str | None = None):
    """u(i, j) = base + gap * [i == m or j == m] + uniform(-sigma, sigma) noise.

    Returns ``(instance, true_best)``; the label is recomputed from the
    generated matrix, so it can differ from the planted index ``m`` (kept in
    ``instance.meta["planted"]``).
    """
    rng = make_rng(spec.seed, "planted")
    n = spec.n
    m = int(rng.integers(n))
    idx = np.arange(n)
    touch = (idx[:, None] == m) | (idx[None, :] == m)
    u = spec.base + spec.gap * touch + rng.uniform(-spec.noise_sigma, spec.noise_sigma, (n, n))
    np.fill_diagonal(u, 0.0)
    inst = Instance(id=id if id is not None else f"planted-{spec.seed}",
                    candidates=[f"h{i}" for i in range(n)], utility_matrix=u,
                    meta={"planted": m})
    return inst, brute_force_best(u)


def random_instance(n: int, seed: int, id: str | None = None) -> Instance:
    """i.i.d. uniform(0, 1) off-diagonal utilities."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = make_rng(seed, "random").uniform(0.0, 1.0, (n, n))
    np.fill_diagonal(u, 0.0)
    return Instance(id=id if id is not None else f"random-{seed}",
                    candidates=[f"h{i}" for i in range(n)], utility_matrix=u)


def planted_corpus(count: int, n: int, gap: float, noise: float, seed: int,
                   base: float = 0.5):
    """``count`` planted instances with per-instance seeds derived from ``seed``."""
    out = []
    for k in range(count):
        sub = int(make_rng(seed, "corpus", k).integers(2 ** 63))
        out.append(planted_instance(PlantedSpec(n, gap, noise, base, sub), id=f"synth-{seed}-{k}"))
    return out
