"""Concrete utility functions and the oracles built on them.

Lexical metrics (unigram F1, smoothed sentence BLEU, ROUGE-L) are computed
natively on whitespace tokens. Vector utilities work on embeddings supplied
with the instance; nothing here embeds text. ``matrix_oracle`` replays a
precomputed utility matrix.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .core import AmbrError, Instance, SchemaError, UtilityOracle


class DimensionMismatch(AmbrError, ValueError):
    pass


class ZeroVector(AmbrError, ValueError):
    pass


class MissingMatrix(AmbrError, ValueError):
    pass


class MalformedMatrix(SchemaError):
    pass


class MissingEmbeddings(AmbrError, ValueError):
    pass


def tokenize(text: str) -> list[str]:
    return text.lower().split()


def _f1(p: float, r: float) -> float:
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def unigram_f1(a, b) -> float:
    """F1 of clipped unigram overlap between two token sequences."""
    if not a or not b:
        return 0.0
    overlap = sum((Counter(a) & Counter(b)).values())
    if overlap == 0:
        return 0.0
    return _f1(overlap / len(a), overlap / len(b))


def _ngrams(tokens, n):
    return Counter(tuple(tokens[k:k + n]) for k in range(len(tokens) - n + 1))


def sentence_bleu(cand, ref, max_order: int = 4) -> float:
    """Sentence BLEU with add-one smoothing on every n-gram order.

    Each order's precision is (clipped matches + 1) / (candidate n-grams + 1);
    brevity penalty is exp(min(0, 1 - |ref| / |cand|)).
    """
    if not cand:
        return 0.0
    log_p = 0.0
    for n in range(1, max_order + 1):
        c = _ngrams(cand, n)
        matches = sum((c & _ngrams(ref, n)).values())
        total = max(len(cand) - n + 1, 0)
        log_p += math.log((matches + 1) / (total + 1))
    bp = math.exp(min(0.0, 1 - len(ref) / len(cand)))
    return bp * math.exp(log_p / max_order)


def lcs_length(a, b) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for k, y in enumerate(b):
            cur.append(prev[k] + 1 if x == y else max(prev[k + 1], cur[k]))
        prev = cur
    return prev[-1]


def rouge_l_f1(cand, ref) -> float:
    lcs = lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    return _f1(lcs / len(cand), lcs / len(ref))


def vector_utility(a, b, kind: str = "cosine") -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    dot = float(np.dot(a, b))
    if kind == "dot":
        return dot
    if kind != "cosine":
        raise ValueError(f"unknown vector utility {kind!r}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine is undefined for a zero vector")
    return dot / (na * nb)


LEXICAL = {
    "unigram_f1": unigram_f1,
    "bleu": sentence_bleu,
    "rouge_l": rouge_l_f1,
}
VECTOR_KINDS = ("cosine", "dot")
UTILITIES = ("matrix",) + tuple(LEXICAL) + VECTOR_KINDS


def validate_matrix(m, n: int | None = None) -> np.ndarray:
    try:
        m = np.asarray(m, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedMatrix(f"utility matrix is not numeric: {exc}") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MalformedMatrix(f"utility matrix must be square, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise MalformedMatrix(f"utility matrix is {m.shape[0]}x{m.shape[0]}, pool has {n}")
    off = ~np.eye(m.shape[0], dtype=bool)
    if not np.all(np.isfinite(m[off])):
        raise MalformedMatrix("non-finite off-diagonal utility")
    return m


def matrix_oracle(instance: Instance, budget: int | None = None,
                  symmetric: bool = False) -> UtilityOracle:
    if instance.utility_matrix is None:
        raise MissingMatrix(f"instance {instance.id!r} has no utility_matrix")
    m = validate_matrix(instance.utility_matrix, instance.n)
    return UtilityOracle(instance.n, batch_scorer=lambda r, c: m[r, c],
                         budget=budget, symmetric=symmetric)


def lexical_oracle(instance: Instance, name: str, budget: int | None = None) -> UtilityOracle:
    fn = LEXICAL[name]
    toks = [tokenize(c) for c in instance.candidates]
    return UtilityOracle(instance.n, scorer=lambda i, j: fn(toks[i], toks[j]), budget=budget)


def vector_oracle(instance: Instance, kind: str = "cosine",
                  budget: int | None = None) -> UtilityOracle:
    if instance.embeddings is None:
        raise MissingEmbeddings(f"instance {instance.id!r} has no embeddings")
    e = instance.embeddings
    if kind == "cosine":
        norms = np.linalg.norm(e, axis=1)
        if np.any(norms == 0):
            raise ZeroVector(f"instance {instance.id!r} has a zero embedding")
        e = e / norms[:, None]
    elif kind != "dot":
        raise ValueError(f"unknown vector utility {kind!r}")
    return UtilityOracle(instance.n, batch_scorer=lambda r, c: np.einsum("ij,ij->i", e[r], e[c]),
                         budget=budget)


def make_oracle(instance: Instance, utility: str, budget: int | None = None) -> UtilityOracle:
    """Oracle for ``utility`` in :data:`UTILITIES` over ``instance``."""
    if utility == "matrix":
        return matrix_oracle(instance, budget)
    if utility in LEXICAL:
        return lexical_oracle(instance, utility, budget)
    if utility in VECTOR_KINDS:
        return vector_oracle(instance, utility, budget)
    raise ValueError(f"unknown utility {utility!r}; choose from {', '.join(UTILITIES)}")
