"""Paired significance tests and effect sizes for model comparisons.

All tests are implemented from first principles (binomial sums, signed-rank
enumeration, rank arithmetic) so results are exactly reproducible and
independently checkable. Small samples use exact distributions; larger ones
use normal approximations with continuity and tie corrections.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from math import comb

import numpy as np

EXACT_THRESHOLD = 25


class DegenerateTest(ValueError):
    """The input has no variation to test."""


@dataclass
class TestResult:
    label: str
    test_name: str
    statistic: float
    p_value: float
    n: int
    effect_name: str | None = None
    effect_size: float | None = None
    adjusted_p: float | None = None
    degenerate: bool = False

    def to_record(self) -> dict:
        return {
            "label": self.label,
            "test_name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n": self.n,
            "effect_name": self.effect_name,
            "effect_size": self.effect_size,
            "adjusted_p": self.adjusted_p,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class ConfusionCounts:
    """Paired-outcome confusion counts: n10 = first right / second wrong."""

    n00: int
    n01: int
    n10: int
    n11: int


def confusion_counts(a: Sequence[bool], b: Sequence[bool]) -> ConfusionCounts:
    if len(a) != len(b):
        raise ValueError("paired outcome vectors must have equal length")
    n00 = n01 = n10 = n11 = 0
    for x, y in zip(a, b):
        if x and y:
            n11 += 1
        elif x:
            n10 += 1
        elif y:
            n01 += 1
        else:
            n00 += 1
    return ConfusionCounts(n00=n00, n01=n01, n10=n10, n11=n11)


def _normal_sf_two_sided(z: float) -> float:
    """Two-sided tail probability for a standard normal statistic."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def mcnemar(
    n10: int | ConfusionCounts,
    n01: int | None = None,
    exact_threshold: int = EXACT_THRESHOLD,
    label: str = "",
) -> TestResult:
    """McNemar's test on discordant pair counts.

    Accepts either a ConfusionCounts or the two discordant counts directly.
    Uses the exact two-sided binomial test when the discordant total is at
    most ``exact_threshold``, otherwise the chi-square approximation with
    continuity correction. The effect size is the matched-pairs odds ratio
    n10/n01 (with a +0.5 Haldane correction when either count is zero).
    """
    if isinstance(n10, ConfusionCounts):
        if n01 is not None:
            raise TypeError("pass either ConfusionCounts or two counts, not both")
        n10, n01 = n10.n10, n10.n01
    if n01 is None:
        raise TypeError("n01 is required when n10 is a bare count")
    if n10 < 0 or n01 < 0:
        raise ValueError("counts must be non-negative")
    m = n10 + n01
    if m == 0:
        return TestResult(
            label=label,
            test_name="mcnemar-exact",
            statistic=0.0,
            p_value=1.0,
            n=0,
            effect_name="odds_ratio",
            effect_size=1.0,
            degenerate=True,
        )
    if n10 == 0 or n01 == 0:
        odds_ratio = (n10 + 0.5) / (n01 + 0.5)
    else:
        odds_ratio = n10 / n01
    if m <= exact_threshold:
        k = min(n10, n01)
        tail = sum(comb(m, i) for i in range(k + 1))
        p = min(1.0, 2.0 * tail / 2.0**m)
        return TestResult(
            label=label,
            test_name="mcnemar-exact",
            statistic=float(k),
            p_value=p,
            n=m,
            effect_name="odds_ratio",
            effect_size=odds_ratio,
        )
    statistic = (abs(n10 - n01) - 1.0) ** 2 / m
    p = _normal_sf_two_sided(math.sqrt(statistic))
    return TestResult(
        label=label,
        test_name="mcnemar-chi2",
        statistic=statistic,
        p_value=p,
        n=m,
        effect_name="odds_ratio",
        effect_size=odds_ratio,
    )


def benjamini_hochberg(p_values: Sequence[float]) -> list[float]:
    """Step-up adjusted p-values controlling the false discovery rate.

    Output order matches input order; adjusted values are monotone in the
    sorted p-values and never smaller than the raw ones.
    """
    m = len(p_values)
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value out of range: {p}")
    if m == 0:
        return []
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 1.0
    for pos in reversed(range(m)):
        i = order[pos]
        running = min(running, p_values[i] * m / (pos + 1))
        adjusted[i] = running
    return adjusted


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _signed_rank_exact_p(doubled: list[int], observed_doubled: int) -> float:
    """Exact two-sided p for the signed-rank sum via subset-sum counting.

    Works on doubled ranks (midranks times two are integers). Counts, over
    all 2^n sign assignments, how many positive-rank sums fall at or beyond
    the observed one.
    """
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        for s in range(total - r, -1, -1):
            if counts[s]:
                counts[s + r] += counts[s]
    at_most = sum(counts[: observed_doubled + 1])
    at_least = sum(counts[observed_doubled:])
    n = len(doubled)
    return min(1.0, 2.0 * min(at_most, at_least) / 2.0**n)


def wilcoxon_signed_rank(
    a: Sequence[float],
    b: Sequence[float],
    exact_threshold: int = EXACT_THRESHOLD,
    label: str = "",
) -> TestResult:
    """Two-sided Wilcoxon signed-rank test on paired real values.

    Zero differences are dropped; ties get midranks. At most
    ``exact_threshold`` nonzero differences triggers exact enumeration,
    otherwise the normal approximation with tie and continuity corrections.
    The statistic is min(W+, W-).
    """
    if len(a) != len(b):
        raise ValueError("paired vectors must have equal length")
    diffs = [x - y for x, y in zip(a, b)]
    diffs = [d for d in diffs if d != 0.0]
    n = len(diffs)
    if n == 0:
        return TestResult(
            label=label,
            test_name="wilcoxon-exact",
            statistic=0.0,
            p_value=1.0,
            n=0,
            degenerate=True,
        )
    magnitudes = [abs(d) for d in diffs]
    ranks = _midranks(magnitudes)
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_minus = sum(ranks) - w_plus
    statistic = min(w_plus, w_minus)

    if n <= exact_threshold:
        doubled = [int(round(2.0 * r)) for r in ranks]
        p = _signed_rank_exact_p(doubled, int(round(2.0 * w_plus)))
        return TestResult(
            label=label,
            test_name="wilcoxon-exact",
            statistic=statistic,
            p_value=p,
            n=n,
        )

    mu = n * (n + 1) / 4.0
    tie_counts: dict[float, int] = {}
    for magnitude in magnitudes:
        tie_counts[magnitude] = tie_counts.get(magnitude, 0) + 1
    tie_term = sum(t**3 - t for t in tie_counts.values()) / 48.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    if variance <= 0:
        return TestResult(
            label=label,
            test_name="wilcoxon-approx",
            statistic=statistic,
            p_value=1.0,
            n=n,
            degenerate=True,
        )
    deviation = w_plus - mu
    if deviation > 0:
        deviation -= 0.5
    elif deviation < 0:
        deviation += 0.5
    z = deviation / math.sqrt(variance)
    return TestResult(
        label=label,
        test_name="wilcoxon-approx",
        statistic=statistic,
        p_value=_normal_sf_two_sided(z),
        n=n,
    )


def cliffs_delta(a: Sequence[float], b: Sequence[float]) -> float:
    """Cliff's delta: P(a > b) - P(a < b) over all cross pairs.

    Rank-based O((n+m) log m) evaluation; integer counting makes it exactly
    equal to the quadratic definition.
    """
    from bisect import bisect_left, bisect_right

    if not len(a) or not len(b):
        raise ValueError("cliffs_delta requires non-empty samples")
    sorted_b = sorted(b)
    greater = 0
    less = 0
    m = len(sorted_b)
    for x in a:
        greater += bisect_left(sorted_b, x)
        less += m - bisect_right(sorted_b, x)
    return (greater - less) / (len(a) * m)


_AD_STAR_COEFFS = (
    # (lower bound on the corrected statistic, c0, c1, c2, complementary)
    (0.6, 1.2937, -5.709, 0.0186, False),
    (0.34, 0.9177, -4.279, -1.38, False),
    (0.2, -8.318, 42.796, -59.938, True),
    (float("-inf"), -13.436, 101.14, -223.73, True),
)


def anderson_darling_normality(x: Sequence[float], label: str = "") -> TestResult:
    """Anderson-Darling test of normality with estimated mean and variance.

    Uses the small-sample corrected statistic and the standard
    piecewise-exponential p-value approximation for the normal case.
    Requires at least 8 observations; raises :class:`DegenerateTest` on a
    constant sample.
    """
    n = len(x)
    if n < 8:
        raise ValueError("anderson_darling_normality requires at least 8 observations")
    mean = math.fsum(x) / n
    variance = math.fsum((v - mean) ** 2 for v in x) / (n - 1)
    if variance == 0.0:
        raise DegenerateTest("sample has zero variance")
    sd = math.sqrt(variance)
    z = sorted((v - mean) / sd for v in x)
    sqrt2 = math.sqrt(2.0)
    log_cdf = [math.log(max(0.5 * math.erfc(-t / sqrt2), 1e-308)) for t in z]
    log_sf = [math.log(max(0.5 * math.erfc(t / sqrt2), 1e-308)) for t in z]
    a2 = -n - sum(
        (2 * i + 1) * (log_cdf[i] + log_sf[n - 1 - i]) for i in range(n)
    ) / n
    corrected = a2 * (1.0 + 0.75 / n + 2.25 / n**2)
    for bound, c0, c1, c2, complementary in _AD_STAR_COEFFS:
        if corrected >= bound:
            value = math.exp(c0 + c1 * corrected + c2 * corrected**2)
            p = 1.0 - value if complementary else value
            break
    p = min(1.0, max(0.0, p))
    return TestResult(
        label=label,
        test_name="anderson-darling",
        statistic=corrected,
        p_value=p,
        n=n,
    )


def _is_boolean_vector(values: Sequence[object]) -> bool:
    # numpy bools are not bool subclasses
    return all(
        isinstance(v, (bool, np.bool_)) or (isinstance(v, int) and v in (0, 1))
        for v in values
    )


def compare_models(
    comparisons: Sequence[tuple[str, Sequence, Sequence]],
    exact_threshold: int = EXACT_THRESHOLD,
) -> list[TestResult]:
    """Run one paired test per labeled comparison and adjust the family.

    Boolean outcome vectors get McNemar's test with a matched-pairs odds
    ratio; real-valued vectors get the Wilcoxon signed-rank test with
    Cliff's delta. Benjamini-Hochberg adjusted p-values are computed across
    the whole family.
    """
    results: list[TestResult] = []
    for label, a, b in comparisons:
        if len(a) != len(b):
            raise ValueError(f"comparison {label!r}: unequal lengths")
        if not len(a):
            raise ValueError(f"comparison {label!r}: empty vectors")
        if _is_boolean_vector(a) and _is_boolean_vector(b):
            counts = confusion_counts([bool(v) for v in a], [bool(v) for v in b])
            result = mcnemar(counts.n10, counts.n01, exact_threshold=exact_threshold, label=label)
        else:
            result = wilcoxon_signed_rank(a, b, exact_threshold=exact_threshold, label=label)
            result.effect_name = "cliffs_delta"
            result.effect_size = cliffs_delta(a, b)
        results.append(result)
    adjusted = benjamini_hochberg([r.p_value for r in results])
    for result, adj in zip(results, adjusted):
        result.adjusted_p = adj
    return results


__all__ = [
    "ConfusionCounts",
    "DegenerateTest",
    "EXACT_THRESHOLD",
    "TestResult",
    "anderson_darling_normality",
    "benjamini_hochberg",
    "cliffs_delta",
    "compare_models",
    "confusion_counts",
    "mcnemar",
    "wilcoxon_signed_rank",
]
