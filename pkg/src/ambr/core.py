"""Shared domain types: instances, utility oracles with pair caching, the
evaluation ledger, and selection results.

Cost throughout the library is the number of unique off-diagonal utility
evaluations charged to an :class:`EvalLedger`. Self-pairs ``(i, i)`` are never
scored; every average in the library is diagonal-free.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


class AmbrError(Exception):
    """Base class for all library errors."""


class BudgetExhausted(AmbrError):
    pass


class IndexOutOfRange(AmbrError, IndexError):
    pass


class SelfPair(AmbrError, ValueError):
    pass


class EmptyReferenceSet(AmbrError, ValueError):
    pass


class SchemaError(AmbrError, ValueError):
    """An instance or payload violates its declared shape."""


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


@dataclass
class Instance:
    """One decoding problem. The candidate pool doubles as the reference pool.

    ``utility_matrix``, when present, is the authoritative utility source;
    its diagonal is ignored.
    """

    id: str
    candidates: list
    embeddings: np.ndarray | None = None
    rewards: np.ndarray | None = None
    utility_matrix: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.candidates)
        if n < 1:
            raise SchemaError("candidates: need at least one candidate")
        if self.embeddings is not None:
            self.embeddings = np.asarray(self.embeddings, dtype=float)
            if self.embeddings.ndim != 2 or self.embeddings.shape[0] != n:
                raise SchemaError(f"embeddings: expected {n} equal-length vectors")
            if self.embeddings.shape[1] < 1:
                raise SchemaError("embeddings: dimension must be >= 1")
            if not np.all(np.isfinite(self.embeddings)):
                raise SchemaError("embeddings: non-finite entry")
        if self.rewards is not None:
            self.rewards = np.asarray(self.rewards, dtype=float)
            if self.rewards.shape != (n,):
                raise SchemaError(f"rewards: expected {n} scalars")
        if self.utility_matrix is not None:
            self.utility_matrix = np.asarray(self.utility_matrix, dtype=float)
            if self.utility_matrix.shape != (n, n):
                raise SchemaError(f"utility_matrix: expected shape ({n}, {n}), "
                                  f"got {self.utility_matrix.shape}")

    @property
    def n(self) -> int:
        return len(self.candidates)

    def permuted(self, perm: Sequence[int]) -> "Instance":
        """Copy with candidate ``k`` of the result equal to candidate ``perm[k]``."""
        perm = np.asarray(perm)
        return Instance(
            id=self.id,
            candidates=[self.candidates[p] for p in perm],
            embeddings=None if self.embeddings is None else self.embeddings[perm],
            rewards=None if self.rewards is None else self.rewards[perm],
            utility_matrix=(None if self.utility_matrix is None
                            else self.utility_matrix[np.ix_(perm, perm)]),
            meta=dict(self.meta),
        )


# ---------------------------------------------------------------------------
# Budget accounting and the utility oracle
# ---------------------------------------------------------------------------


@dataclass
class EvalLedger:
    """``budget`` of None means unlimited."""

    budget: int | None = None
    used: int = 0

    @property
    def remaining(self) -> float:
        if self.budget is None:
            return float("inf")
        return self.budget - self.used

    def limit(self, stop: int | None = None) -> float:
        """Effective absolute cap on ``used`` given an optional run-level stop."""
        cap = float("inf") if self.budget is None else self.budget
        if stop is not None:
            cap = min(cap, stop)
        return cap


Scorer = Callable[[int, int], float]
BatchScorer = Callable[[np.ndarray, np.ndarray], np.ndarray]


class UtilityOracle:
    """Pairwise utility u(candidate i, reference j) with a cache and a ledger.

    Pairs are cached under ordered keys. With ``symmetric=True`` a scored
    pair also fills its mirror and the ledger counts the unordered pair once.

    Either ``scorer`` (scalar) or ``batch_scorer`` (vectorised over index
    arrays) must be given; the other is derived.
    """

    def __init__(self, n: int, scorer: Scorer | None = None,
                 batch_scorer: BatchScorer | None = None,
                 budget: int | None = None, symmetric: bool = False):
        if scorer is None and batch_scorer is None:
            raise ValueError("need a scorer or a batch_scorer")
        self.n = int(n)
        self.symmetric = symmetric
        self.ledger = EvalLedger(budget=budget)
        self._scorer = scorer
        self._batch = batch_scorer
        self._values = np.zeros((self.n, self.n))
        self._known = np.zeros((self.n, self.n), dtype=bool)

    # -- single pairs --------------------------------------------------------

    def _check(self, i: int, j: int):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexOutOfRange(f"pair ({i}, {j}) outside pool of size {self.n}")
        if i == j:
            raise SelfPair(f"self-pair ({i}, {i}) is never scored")

    def is_cached(self, i: int, j: int) -> bool:
        return bool(self._known[i, j])

    def score_pair(self, i: int, j: int) -> float:
        i, j = int(i), int(j)
        self._check(i, j)
        if not self._known[i, j]:
            if self.ledger.remaining <= 0:
                raise BudgetExhausted(
                    f"budget {self.ledger.budget} spent; pair ({i}, {j}) is uncached")
            self._store(np.array([i]), np.array([j]))
        return float(self._values[i, j])

    # -- blocks ----------------------------------------------------------------

    def _evaluate(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        if self._batch is not None:
            return np.asarray(self._batch(rows, cols), dtype=float)
        return np.array([self._scorer(int(a), int(b)) for a, b in zip(rows, cols)],
                        dtype=float)

    def _store(self, rows: np.ndarray, cols: np.ndarray):
        vals = self._evaluate(rows, cols)
        self._values[rows, cols] = vals
        self._known[rows, cols] = True
        if self.symmetric:
            self._values[cols, rows] = vals
            self._known[cols, rows] = True
        self.ledger.used += len(rows)

    def missing_pairs(self, rows: Iterable[int], cols: Iterable[int]):
        """Uncached off-diagonal pairs of ``rows x cols`` in row-major order.

        Under symmetric caching a pair and its mirror appear once, in the
        orientation met first.
        """
        rows = np.asarray(list(rows), dtype=int)
        cols = np.asarray(list(cols), dtype=int)
        if rows.size == 0 or cols.size == 0:
            return np.empty(0, dtype=int), np.empty(0, dtype=int)
        if rows.min() < 0 or rows.max() >= self.n or cols.min() < 0 or cols.max() >= self.n:
            raise IndexOutOfRange("index outside the pool")
        r = np.repeat(rows, cols.size)
        c = np.tile(cols, rows.size)
        keep = (r != c) & ~self._known[r, c]
        r, c = r[keep], c[keep]
        if self.symmetric and r.size:
            key = np.minimum(r, c) * self.n + np.maximum(r, c)
            _, first = np.unique(key, return_index=True)
            first.sort()
            r, c = r[first], c[first]
        return r, c

    def fill(self, rows: Iterable[int], cols: Iterable[int],
             stop: int | None = None) -> bool:
        """Score every uncached off-diagonal pair in ``rows x cols``.

        Pairs are visited candidate-major, reference-minor. Scoring halts once
        ``ledger.used`` reaches ``min(ledger.budget, stop)``. Returns True iff
        the whole block is now cached.
        """
        r, c = self.missing_pairs(rows, cols)
        room = self.ledger.limit(stop) - self.ledger.used
        if room <= 0:
            return r.size == 0
        take = r.size if room >= r.size else int(room)
        if take:
            self._store(r[:take], c[:take])
        return take == r.size

    def block(self, rows: Sequence[int], cols: Sequence[int]):
        """Cached values and availability mask for ``rows x cols``.

        The mask is False on the diagonal and on uncached pairs.
        """
        rows = np.asarray(rows, dtype=int)
        cols = np.asarray(cols, dtype=int)
        ix = np.ix_(rows, cols)
        mask = self._known[ix] & (rows[:, None] != cols[None, :])
        return np.where(mask, self._values[ix], 0.0), mask

    def row_means(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Diagonal-free mean of cached utilities per row; NaN where nothing is cached."""
        vals, mask = self.block(rows, cols)
        counts = mask.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(counts > 0, vals.sum(axis=1) / np.maximum(counts, 1), np.nan)

    def cached_pairs(self) -> int:
        """Number of distinct cached off-diagonal pairs (unordered when symmetric)."""
        k = self._known.copy()
        np.fill_diagonal(k, False)
        if self.symmetric:
            return int(np.triu(k | k.T).sum())
        return int(k.sum())


def mean_utility(oracle: UtilityOracle, h: int, refs: Iterable[int]) -> float:
    """Diagonal-free mean of u(h, y) over ``refs \\ {h}``."""
    refs = sorted(set(int(y) for y in refs) - {int(h)})
    if not refs:
        raise EmptyReferenceSet(f"no references left for candidate {h}")
    return float(np.mean([oracle.score_pair(h, y) for y in refs]))


# ---------------------------------------------------------------------------
# Results and randomness
# ---------------------------------------------------------------------------


@dataclass
class Selection:
    chosen: int
    evals_used: int
    trace: list = field(default_factory=list)

    @property
    def converged(self) -> bool | None:
        """Doubling-trick flag; None for algorithms that do not set one."""
        for rec in reversed(self.trace):
            if "converged" in rec:
                return rec["converged"]
        return None


def as_list(values) -> list:
    """Float list for traces; NaN (no estimate) becomes None."""
    return [None if np.isnan(v) else float(v) for v in np.asarray(values, dtype=float)]


def argmax_lowest(scores) -> int:
    """Argmax with ties broken toward the lowest position; NaN ranks last."""
    s = np.asarray(scores, dtype=float)
    s = np.where(np.isnan(s), -np.inf, s)
    return int(np.argmax(s))


def top_k_lowest(candidates: Sequence[int], scores, k: int) -> list[int]:
    """The ``k`` candidates with the largest scores; ties go to the lower index."""
    cand = np.asarray(candidates, dtype=int)
    s = np.asarray(scores, dtype=float)
    s = np.where(np.isnan(s), -np.inf, s)
    order = np.lexsort((cand, -s))
    return sorted(cand[order[:k]].tolist())


def _key_int(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.blake2b(str(part).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int, *keys) -> np.random.Generator:
    """Deterministic generator for ``seed`` and any extra hashable keys.

    String keys are hashed with a fixed digest, so streams do not depend on
    ``PYTHONHASHSEED``.
    """
    entropy = [_key_int(seed)] + [_key_int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))
