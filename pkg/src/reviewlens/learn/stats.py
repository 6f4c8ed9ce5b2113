"""Paired comparison of cross-validated score vectors.

Normality is probed with Shapiro-Wilk (scipy's implementation); the paired
comparison itself is a two-sided Wilcoxon signed-rank test written out
here because its conventions are pinned: zero differences are dropped, the
distribution is exact for small tie-free samples and a normal
approximation with continuity correction otherwise, and an all-zero
difference vector yields p = 1.0 instead of an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import erf, sqrt

import numpy as np
from scipy.stats import rankdata, shapiro

EXACT_LIMIT = 25


class LengthMismatch(ValueError):
    """Paired vectors must have equal length."""


class AllDifferencesZero(ValueError):
    """Every paired difference is zero; kept importable, by convention
    compare() maps this case to p = 1.0 rather than raising."""


@dataclass(frozen=True)
class StatTestResult:
    shapiro_p_a: float
    shapiro_p_b: float
    test_used: str
    p_value: float
    mean_delta: float


def shapiro_wilk(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 3 or np.ptp(values) == 0.0:
        # Too short or zero-variance vectors are degenerate; report them as
        # trivially compatible with normality rather than erroring.
        return 1.0, 1.0
    w, p = shapiro(values)
    return float(w), float(p)


def _exact_two_sided_p(w_min: float, n: int) -> float:
    # Count subsets of {1..n} with rank sum <= w_min; under H0 each of the
    # 2^n sign patterns is equally likely.
    limit = int(w_min)
    total = n * (n + 1) // 2
    ways = [0] * (total + 1)
    ways[0] = 1
    for rank in range(1, n + 1):
        for s in range(total, rank - 1, -1):
            ways[s] += ways[s - rank]
    at_most = sum(ways[: min(limit, total) + 1])
    p = 2.0 * at_most / (2.0**n)
    return min(1.0, p)


def wilcoxon_signed_rank(a, b) -> tuple[float, float, int]:
    """Two-sided paired test; returns (W, p_value, n_used).

    W is the smaller of the positive- and negative-rank sums over the
    nonzero differences. n_used counts the retained pairs; zero means
    every difference was zero and p is 1.0 by convention.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) != len(b):
        raise LengthMismatch(f"paired vectors of length {len(a)} and {len(b)}")
    diff = a - b
    diff = diff[diff != 0.0]
    n = len(diff)
    if n == 0:
        return 0.0, 1.0, 0
    magnitude = np.abs(diff)
    ranks = rankdata(magnitude)
    w_plus = float(ranks[diff > 0].sum())
    w_minus = float(ranks[diff < 0].sum())
    w = min(w_plus, w_minus)
    tie_free = len(np.unique(magnitude)) == n
    if n <= EXACT_LIMIT and tie_free:
        return w, _exact_two_sided_p(w, n), n
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(magnitude, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    if variance <= 0.0:
        return w, 1.0, n
    # W is the smaller sum, so the continuity correction moves it up
    # toward the mean before standardizing.
    z = (w - mean + 0.5) / sqrt(variance)
    p = 2.0 * _normal_cdf(z)
    return w, min(1.0, p), n


def _normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + erf(z / sqrt(2.0)))


def compare(scores_a, scores_b) -> StatTestResult:
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if len(a) != len(b):
        raise LengthMismatch(f"paired vectors of length {len(a)} and {len(b)}")
    _, shapiro_a = shapiro_wilk(a)
    _, shapiro_b = shapiro_wilk(b)
    _, p_value, _ = wilcoxon_signed_rank(a, b)
    return StatTestResult(
        shapiro_p_a=shapiro_a,
        shapiro_p_b=shapiro_b,
        test_used="wilcoxon_signed_rank",
        p_value=p_value,
        mean_delta=float(a.mean() - b.mean()),
    )
