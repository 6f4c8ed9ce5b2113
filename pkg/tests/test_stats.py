import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from reviewlens.learn.stats import (
    LengthMismatch,
    StatTestResult,
    compare,
    shapiro_wilk,
    wilcoxon_signed_rank,
)

# Ten tie-free differences with magnitudes 1..10 and a single negative sign
# on magnitude 8. The smaller rank sum is then 8 and the exact two-sided
# p-value is 2 * 25 / 2^10 (25 subsets of {1..10} sum to at most 8).
EXACT_A = np.array([1, 2, 3, 4, 5, 6, 7, -8, 9, 10], float)
EXACT_B = np.zeros(10)
EXACT_P = 0.048828125


class TestWilcoxon:
    def test_textbook_exact_case(self):
        w, p, n = wilcoxon_signed_rank(EXACT_A, EXACT_B)
        assert w == 8.0
        assert n == 10
        assert p == EXACT_P

    def test_exact_case_agrees_with_scipy(self):
        _, p, _ = wilcoxon_signed_rank(EXACT_A, EXACT_B)
        assert p == pytest.approx(sps.wilcoxon(EXACT_A, EXACT_B, method="exact").pvalue)

    def test_large_sample_uses_normal_approximation(self):
        a = np.array([-1, -2] + list(range(3, 27)), float)
        b = np.zeros(26)
        w, p, n = wilcoxon_signed_rank(a, b)
        assert n == 26
        assert w == 3.0
        ref = sps.wilcoxon(a, b, method="approx", correction=True).pvalue
        assert p == pytest.approx(ref, rel=1e-9)

    def test_tied_magnitudes_fall_back_to_approximation(self):
        a = np.array([5, -5, 3, 2, 7, -3], float)
        b = np.zeros(6)
        w, p, n = wilcoxon_signed_rank(a, b)
        assert w == 7.0
        assert p == pytest.approx(
            sps.wilcoxon(a, b, method="approx", correction=True).pvalue
        )

    def test_zero_differences_dropped(self):
        a = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        b = np.array([1.0, 2.0, 0.0, 0.0, 0.0])
        _, _, n = wilcoxon_signed_rank(a, b)
        assert n == 3

    def test_all_zero_differences_give_p_one(self):
        a = np.array([0.5, 0.5, 0.5])
        w, p, n = wilcoxon_signed_rank(a, a.copy())
        assert (w, p, n) == (0.0, 1.0, 0)

    def test_statistic_is_smaller_rank_sum(self):
        # Negative signs on magnitudes 1 and 2 only: w_minus = 3 < w_plus.
        a = np.array([-1, -2, 3, 4, 5], float)
        w, _, _ = wilcoxon_signed_rank(a, np.zeros(5))
        assert w == 3.0

    def test_symmetry_in_argument_order(self):
        rng = np.random.default_rng(0)
        a = rng.normal(0.8, 0.1, 12)
        b = rng.normal(0.7, 0.1, 12)
        _, p_ab, _ = wilcoxon_signed_rank(a, b)
        _, p_ba, _ = wilcoxon_signed_rank(b, a)
        assert p_ab == p_ba

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            wilcoxon_signed_rank([1.0, 2.0], [1.0])


class TestShapiro:
    def test_classic_weight_sample(self):
        # Eleven adult weights; a long right tail makes the sample visibly
        # non-normal, with a published statistic of about 0.79.
        weights = [148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236]
        w, p = shapiro_wilk(weights)
        assert w == pytest.approx(0.7888, abs=5e-4)
        assert p < 0.05

    def test_normal_sample_not_rejected(self):
        rng = np.random.default_rng(1)
        w, p = shapiro_wilk(rng.normal(0, 1, 60))
        assert p > 0.05
        assert 0.9 < w <= 1.0

    def test_constant_vector_is_degenerate(self):
        assert shapiro_wilk([0.85] * 20) == (1.0, 1.0)

    def test_too_short_vector_is_degenerate(self):
        assert shapiro_wilk([0.1, 0.9]) == (1.0, 1.0)


class TestCompare:
    def test_identical_vectors(self):
        scores = [0.8, 0.82, 0.79, 0.81]
        result = compare(scores, list(scores))
        assert result.p_value == 1.0
        assert result.mean_delta == 0.0
        assert result.test_used == "wilcoxon_signed_rank"

    def test_clear_separation_is_significant(self):
        rng = np.random.default_rng(2)
        a = rng.normal(0.9, 0.01, 20)
        b = rng.normal(0.6, 0.01, 20)
        result = compare(a, b)
        assert result.p_value < 0.01
        assert result.mean_delta == pytest.approx(0.3, abs=0.02)

    def test_shapiro_fields_populated(self):
        rng = np.random.default_rng(3)
        a = rng.normal(0.8, 0.05, 15)
        result = compare(a, a + rng.normal(0, 0.01, 15))
        assert 0.0 <= result.shapiro_p_a <= 1.0
        assert 0.0 <= result.shapiro_p_b <= 1.0

    def test_result_is_frozen_dataclass(self):
        result = compare([0.1, 0.2], [0.1, 0.2])
        assert isinstance(result, StatTestResult)
        with pytest.raises(AttributeError):
            result.p_value = 0.5

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            compare([0.1], [0.1, 0.2])


@settings(deadline=None, max_examples=50)
@given(
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=40),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_wilcoxon_p_always_valid(deltas, seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(0, 1, len(deltas))
    a = b + np.array(deltas)
    w, p, n = wilcoxon_signed_rank(a, b)
    assert 0.0 < p <= 1.0
    assert w >= 0.0
    assert 0 <= n <= len(deltas)
