import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ambr import Instance, rouge_l_f1, sentence_bleu, tokenize, unigram_f1, vector_utility
from ambr.metrics import (DimensionMismatch, MalformedMatrix, MissingMatrix, ZeroVector,
                          lexical_oracle, matrix_oracle, vector_oracle)

words = st.lists(st.sampled_from(list("abcde")), max_size=9)


def bleu_oracle(cand, ref):
    """Add-one smoothed sentence BLEU from first principles (list slices + Fraction)."""
    if not cand:
        return 0.0
    prod = Fraction(1)
    for n in range(1, 5):
        cgrams = [cand[k:k + n] for k in range(len(cand) - n + 1)]
        rgrams = [ref[k:k + n] for k in range(len(ref) - n + 1)]
        matched = 0
        for g in {tuple(x) for x in cgrams}:
            matched += min(cgrams.count(list(g)), rgrams.count(list(g)))
        prod *= Fraction(matched + 1, len(cgrams) + 1)
    bp = math.exp(min(0.0, 1 - len(ref) / len(cand)))
    return bp * float(prod) ** 0.25


def lcs_oracle(a, b):
    """Exponential enumeration of subsequences of a; only for short inputs."""
    best = 0
    for mask in range(1 << len(a)):
        sub = [a[k] for k in range(len(a)) if mask >> k & 1]
        it = iter(b)
        if all(x in it for x in sub):
            best = max(best, len(sub))
    return best


@pytest.mark.parametrize("text, toks", [("The cat", ["the", "cat"]), ("", []), ("a  b", ["a", "b"])])
def test_tokenize(text, toks):
    assert tokenize(text) == toks


def test_unigram_f1_examples():
    assert unigram_f1(["a", "b"], ["b", "c"]) == 0.5
    assert unigram_f1(["x", "y"], ["x", "y"]) == 1.0
    assert unigram_f1(["a"], ["b"]) == 0.0
    assert unigram_f1([], ["b"]) == 0.0


def test_unigram_f1_clips_counts():
    # overlap is min(2, 1) = 1 for "a"
    assert unigram_f1(["a", "a"], ["a", "b"]) == pytest.approx(0.5)


def test_bleu_identity_and_empty():
    x = "the quick brown fox jumps".split()
    assert sentence_bleu(x, x) == 1.0
    assert sentence_bleu([], x) == 0.0


def test_bleu_zero_overlap_floor():
    # p_n = 1/3, 1/2, 1, 1 under add-one smoothing
    got = sentence_bleu(["x", "y"], ["a", "b"])
    assert got == pytest.approx((1 / 6) ** 0.25, rel=1e-12)
    assert got == pytest.approx(bleu_oracle(["x", "y"], ["a", "b"]), rel=1e-12)


@given(words, words)
def test_bleu_matches_independent_oracle(c, r):
    assert sentence_bleu(c, r) == pytest.approx(bleu_oracle(c, r), rel=1e-12, abs=1e-15)


def test_rouge_l_examples():
    assert rouge_l_f1(["a", "c"], ["a", "b", "c"]) == pytest.approx(0.8, abs=1e-15)
    assert rouge_l_f1(list("abc"), list("abc")) == 1.0
    assert rouge_l_f1(["a"], ["b"]) == 0.0


@given(words, words)
def test_rouge_l_matches_enumeration(a, b):
    lcs = lcs_oracle(a, b)
    want = 0.0 if lcs == 0 else 2 * lcs / (len(a) + len(b))
    assert rouge_l_f1(a, b) == pytest.approx(want, rel=1e-12)


@given(words, words)
def test_lexical_bounded_and_repeatable(a, b):
    for fn in (unigram_f1, sentence_bleu, rouge_l_f1):
        v = fn(a, b)
        assert 0.0 <= v <= 1.0
        assert fn(a, b) == v


def test_vector_utility():
    u = np.array([0.6, 0.8])
    assert vector_utility(u, u) == pytest.approx(1.0, abs=1e-12)
    assert vector_utility([1, 0], [0, 3]) == 0.0
    assert vector_utility([1, 2], [3, 4], "dot") == 11.0
    with pytest.raises(DimensionMismatch):
        vector_utility([1, 2], [1, 2, 3])
    with pytest.raises(ZeroVector):
        vector_utility([0, 0], [1, 2])


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.floats(0.01, 100))
def test_cosine_scale_invariant(a, b, k):
    a, b = np.array(a), np.array(b)
    if np.linalg.norm(a) < 1e-3 or np.linalg.norm(b) < 1e-3:
        return
    assert vector_utility(k * a, b) == pytest.approx(vector_utility(a, b), abs=1e-9)


def test_matrix_oracle_lookup_and_errors():
    inst = Instance(id="m", candidates=["a", "b"], utility_matrix=[[0, 0.3], [0.1, 0]])
    o = matrix_oracle(inst)
    assert o.score_pair(0, 1) == 0.3
    assert o.ledger.used == 1
    with pytest.raises(MissingMatrix):
        matrix_oracle(Instance(id="x", candidates=["a"]))
    bad = Instance(id="m", candidates=["a", "b"], utility_matrix=[[0, 0.3], [np.nan, 0]])
    with pytest.raises(MalformedMatrix):
        matrix_oracle(bad)


def test_malformed_matrix_shape():
    from ambr.metrics import validate_matrix
    with pytest.raises(MalformedMatrix):
        validate_matrix(np.zeros((2, 3)))


def test_nan_diagonal_is_allowed():
    inst = Instance(id="m", candidates=["a", "b"], utility_matrix=[[np.nan, 0.3], [0.1, np.nan]])
    assert matrix_oracle(inst).score_pair(1, 0) == 0.1


def test_text_and_vector_oracles():
    inst = Instance(id="t", candidates=["a b", "b c", "A B"],
                    embeddings=[[1.0, 0.0], [0.0, 2.0], [3.0, 0.0]])
    o = lexical_oracle(inst, "unigram_f1")
    assert o.score_pair(0, 1) == 0.5
    assert o.score_pair(0, 2) == 1.0
    v = vector_oracle(inst, "cosine")
    assert v.score_pair(0, 2) == pytest.approx(1.0)
    assert v.score_pair(0, 1) == pytest.approx(0.0)
    d = vector_oracle(inst, "dot")
    assert d.score_pair(1, 1 - 1) == 0.0 and d.score_pair(0, 2) == 3.0
