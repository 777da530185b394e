"""ROUGE scorer against an independent brute-force oracle.

The frozen table below was computed by direct clipped counting (n-grams)
and exhaustive subsequence enumeration (LCS), implemented separately from
the scorer under test.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgsum import rouge

# (candidate, reference, rouge1 (P,R,F), rouge2 (P,R,F), rougeL (P,R,F))
FROZEN_CASES = [
    (["a", "b"], ["a", "c"],
     (0.5, 0.5, 0.5), (0.0, 0.0, 0.0), (0.5, 0.5, 0.5)),
    (["a", "b", "c", "d"], ["a", "c", "b", "d"],
     (1.0, 1.0, 1.0), (0.0, 0.0, 0.0), (0.75, 0.75, 0.75)),
    (["x"], ["y"],
     (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
    (["a", "b", "c"], ["a", "b", "c"],
     (1.0, 1.0, 1.0), (1.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
    (["the", "cat", "sat"], ["the", "cat", "ran"],
     (0.6666666666666666, 0.6666666666666666, 0.6666666666666666),
     (0.5, 0.5, 0.5),
     (0.6666666666666666, 0.6666666666666666, 0.6666666666666666)),
    (["a", "a", "b"], ["a", "b", "b"],
     (0.6666666666666666, 0.6666666666666666, 0.6666666666666666),
     (0.5, 0.5, 0.5),
     (0.6666666666666666, 0.6666666666666666, 0.6666666666666666)),
    (["a", "a", "a"], ["a"],
     (0.3333333333333333, 1.0, 0.5), (0.0, 0.0, 0.0),
     (0.3333333333333333, 1.0, 0.5)),
    (["a"], ["a", "a", "a"],
     (1.0, 0.3333333333333333, 0.5), (0.0, 0.0, 0.0),
     (1.0, 0.3333333333333333, 0.5)),
    (["w", "x", "y", "z"], ["z", "y", "x", "w"],
     (1.0, 1.0, 1.0), (0.0, 0.0, 0.0), (0.25, 0.25, 0.25)),
    (["p", "q", "r", "s", "t"], ["q", "s", "t", "p"],
     (0.8, 1.0, 0.888888888888889),
     (0.25, 0.3333333333333333, 0.28571428571428575),
     (0.6, 0.75, 0.6666666666666665)),
    (["m", "n"], ["n", "m"],
     (1.0, 1.0, 1.0), (0.0, 0.0, 0.0), (0.5, 0.5, 0.5)),
    (["a", "b", "a", "b"], ["b", "a", "b", "a"],
     (1.0, 1.0, 1.0),
     (0.6666666666666666, 0.6666666666666666, 0.6666666666666666),
     (0.75, 0.75, 0.75)),
    (["one", "two", "three", "four", "five"], ["two", "four", "six"],
     (0.4, 0.6666666666666666, 0.5), (0.0, 0.0, 0.0),
     (0.4, 0.6666666666666666, 0.5)),
    (["s1", "s2", "s3", "s4", "s5", "s6"], ["s2", "s3", "s5", "s6", "s7"],
     (0.6666666666666666, 0.8, 0.7272727272727272),
     (0.4, 0.5, 0.4444444444444445),
     (0.6666666666666666, 0.8, 0.7272727272727272)),
    (["dog"], ["dog"],
     (1.0, 1.0, 1.0), (0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
    (["dog", "barks"], ["cat", "meows"],
     (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
    (["a", "b", "c", "d", "e", "f"], ["a", "c", "e"],
     (0.5, 1.0, 0.6666666666666666), (0.0, 0.0, 0.0),
     (0.5, 1.0, 0.6666666666666666)),
    (["u", "v", "u", "w"], ["u", "u", "v", "w"],
     (1.0, 1.0, 1.0),
     (0.3333333333333333, 0.3333333333333333, 0.3333333333333333),
     (0.75, 0.75, 0.75)),
    (["k", "k", "k", "k"], ["k", "k"],
     (0.5, 1.0, 0.6666666666666666), (0.3333333333333333, 1.0, 0.5),
     (0.5, 1.0, 0.6666666666666666)),
    (["alpha", "beta", "gamma"], ["beta", "gamma", "delta", "alpha"],
     (1.0, 0.75, 0.8571428571428571), (0.5, 0.3333333333333333, 0.4),
     (0.6666666666666666, 0.5, 0.5714285714285715)),
    (["r", "s", "t", "r", "s"], ["s", "r", "s", "t"],
     (0.8, 1.0, 0.888888888888889),
     (0.5, 0.6666666666666666, 0.5714285714285715),
     (0.6, 0.75, 0.6666666666666665)),
    (["h", "i", "j", "k", "l", "m", "n", "o"],
     ["o", "n", "m", "l", "k", "j", "i", "h"],
     (1.0, 1.0, 1.0), (0.0, 0.0, 0.0), (0.125, 0.125, 0.125)),
]


def brute_force_lcs(a, b):
    """Exhaustive subsequence enumeration; only viable for short lists."""
    if len(a) > len(b):
        a, b = b, a
    for size in range(len(a), 0, -1):
        for picked in itertools.combinations(a, size):
            it = iter(b)
            if all(tok in it for tok in picked):
                return size
    return 0


@pytest.mark.parametrize("cand,ref,r1,r2,rl", FROZEN_CASES)
def test_frozen_table(cand, ref, r1, r2, rl):
    for score, expected in ((rouge.rouge_n(cand, ref, 1), r1),
                            (rouge.rouge_n(cand, ref, 2), r2),
                            (rouge.rouge_l(cand, ref), rl)):
        assert score.precision == pytest.approx(expected[0], abs=1e-9)
        assert score.recall == pytest.approx(expected[1], abs=1e-9)
        assert score.f1 == pytest.approx(expected[2], abs=1e-9)


class TestRougeN:
    def test_identical_texts(self):
        assert rouge.rouge_n(["a", "b", "c"], ["a", "b", "c"], 1).f1 == 1.0
        assert rouge.rouge_n(["a", "b", "c"], ["a", "b", "c"], 2).f1 == 1.0

    def test_disjoint_vocabulary(self):
        assert rouge.rouge_n(["a", "b"], ["c", "d"], 1).f1 == 0.0

    def test_empty_inputs(self):
        assert rouge.rouge_n([], ["a"], 1) == rouge.RougeScore(0.0, 0.0, 0.0)
        assert rouge.rouge_n(["a"], [], 2) == rouge.RougeScore(0.0, 0.0, 0.0)

    def test_rejects_other_orders(self):
        with pytest.raises(ValueError):
            rouge.rouge_n(["a"], ["a"], 3)

    @given(st.lists(st.sampled_from("abcd"), max_size=10),
           st.lists(st.sampled_from("abcd"), min_size=1, max_size=10))
    @settings(max_examples=150)
    def test_appending_reference_ngram_never_decreases_recall(self, cand, ref):
        before = rouge.rouge_n(cand, ref, 1).recall
        after = rouge.rouge_n(cand + [ref[0]], ref, 1).recall
        assert after >= before


class TestRougeL:
    def test_identical(self):
        assert rouge.rouge_l(["x", "y"], ["x", "y"]).f1 == 1.0

    def test_single_disjoint_tokens(self):
        assert rouge.rouge_l(["x"], ["y"]).f1 == 0.0

    def test_empty(self):
        assert rouge.rouge_l([], []) == rouge.RougeScore(0.0, 0.0, 0.0)

    @given(st.lists(st.sampled_from("abc"), max_size=8),
           st.lists(st.sampled_from("abc"), max_size=8))
    @settings(max_examples=200)
    def test_matches_brute_force_enumeration(self, cand, ref):
        expected = brute_force_lcs(cand, ref)
        got = rouge.rouge_l(cand, ref)
        if not cand or not ref:
            assert got.f1 == 0.0
        else:
            assert got.precision * len(cand) == pytest.approx(expected)


class TestMeanRouge:
    def test_identical(self):
        assert rouge.mean_rouge(["a", "b"], ["a", "b"]) == 1.0

    def test_disjoint(self):
        assert rouge.mean_rouge(["a"], ["b"]) == 0.0

    def test_component_mean(self):
        # R1 = 0.5, R2 = 0.0, RL = 0.5 from the frozen table's first case.
        assert rouge.mean_rouge(["a", "b"], ["a", "c"]) == pytest.approx(1.0 / 3.0)


class TestMultiReference:
    def test_per_metric_maximum(self):
        refs = [["a", "b"], ["c", "d"]]
        r1, r2, rl = rouge.rouge_max(["a", "b"], refs)
        assert r1 == 1.0 and r2 == 1.0 and rl == 1.0

    def test_maxima_can_come_from_different_references(self):
        refs = [["a", "x"], ["y", "b"]]
        r1, _, _ = rouge.rouge_max(["a", "b"], refs)
        assert r1 == pytest.approx(0.5)

    def test_requires_a_reference(self):
        with pytest.raises(ValueError):
            rouge.rouge_max(["a"], [])
