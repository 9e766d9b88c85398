"""Classical (limited-fluctuation) credibility for backtest results.

Coverage probabilities, full-credibility standards and partial-credibility
weights. Criteria are rounded to the nearest integer and weights are always
computed against the rounded criterion, which is what the published tables
use.

Example
-------
>>> q = CredibilityQuery(coverage=0.90, half_width=0.10)
>>> full_credibility_uniform(q).rounded
90
>>> round(linear_credibility(22, 90).value, 3)
0.244
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from credbt.statdist import (
    DistributionMoments,
    check_probability,
    std_normal_quantile,
    uniform01_moments,
)

DEFAULT_COVERAGE = 0.90
DEFAULT_HALF_WIDTH = 0.10
DEFAULT_GAMMA = 0.30


class WeightMethod(str, Enum):
    LINEAR = "linear"
    LONGLEY_COOK = "longley_cook"

    @classmethod
    def parse(cls, value: "str | WeightMethod") -> "WeightMethod":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(
                f"unknown weight method {value!r}; expected 'linear' or 'longley-cook'"
            ) from None


@dataclass(frozen=True)
class CredibilityQuery:
    """Target coverage probability ``P`` and relative half-width ``k``."""

    coverage: float = DEFAULT_COVERAGE
    half_width: float = DEFAULT_HALF_WIDTH

    def __post_init__(self):
        check_probability(self.coverage, "coverage", open_interval=True)
        k = self.half_width
        if not (math.isfinite(k) and 0.0 < k <= 1.0):
            raise ValueError(f"half_width must lie in (0, 1], got {k!r}")


@dataclass(frozen=True)
class FullCredibilityCriterion:
    raw: float
    rounded: int
    y: float

    def __int__(self):
        return self.rounded


@dataclass(frozen=True)
class CredibilityWeight:
    """Partial-credibility weight ``Z``.

    ``value`` is clamped to [0, 1]; ``unclamped`` keeps the raw ratio, which
    is what the weight tables print (e.g. 367% for a sample well above the
    full-credibility standard).
    """

    value: float
    unclamped: float
    method: WeightMethod
    sample_size: int
    criterion: int
    gamma: float = 0.0

    def __float__(self):
        return self.value


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _check_count(n, name: str, minimum: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {n}")
    return n


def _check_half_width(k: float) -> float:
    k = float(k)
    if not (math.isfinite(k) and 0.0 < k <= 1.0):
        raise ValueError(f"k must lie in (0, 1], got {k!r}")
    return k


def y_for_coverage(q: CredibilityQuery) -> float:
    """Normal quantile ``y`` with ``Phi(y) = (1 + P) / 2``."""
    return std_normal_quantile((1.0 + q.coverage) / 2.0)


def coverage_probability_poisson(n: int, k: float) -> float:
    """``P = 2 Phi(k sqrt(n)) - 1`` for a Poisson count with mean ``n``."""
    n = _check_count(n, "n", 1)
    k = _check_half_width(k)
    # 2*Phi(t) - 1 == erf(t / sqrt 2); avoids the subtraction near 1
    return math.erf(k * math.sqrt(n) / math.sqrt(2.0))


def coverage_probability_uniform(N: int, k: float) -> float:
    """Coverage for the mean of ``N`` U(0, 1) draws: ``2 Phi(k sqrt(3N)) - 1``."""
    N = _check_count(N, "N", 1)
    k = _check_half_width(k)
    return math.erf(k * math.sqrt(3.0 * N) / math.sqrt(2.0))


def _criterion(raw: float, y: float) -> FullCredibilityCriterion:
    return FullCredibilityCriterion(raw=raw, rounded=max(1, _round_half_up(raw)), y=y)


def full_credibility_poisson(q: CredibilityQuery) -> FullCredibilityCriterion:
    """Full-credibility standard ``n0 = y^2 / k^2``."""
    y = y_for_coverage(q)
    return _criterion((y / q.half_width) ** 2, y)


def full_credibility_general(q: CredibilityQuery, m: DistributionMoments) -> FullCredibilityCriterion:
    """Mayerson's generalisation ``N = (y / k)^2 * CV^2``."""
    cv2 = m.cv_squared
    y = y_for_coverage(q)
    return _criterion((y / q.half_width) ** 2 * cv2, y)


def full_credibility_uniform(q: CredibilityQuery) -> FullCredibilityCriterion:
    """Full-credibility standard for U(0, 1) data, ``n0 / 3``."""
    return full_credibility_general(q, uniform01_moments())


def linear_credibility(n: int, N: int) -> CredibilityWeight:
    """``Z = min(1, n / N)``."""
    n = _check_count(n, "n", 0)
    N = _check_count(N, "N", 1)
    ratio = n / N
    return CredibilityWeight(
        value=min(1.0, ratio), unclamped=ratio, method=WeightMethod.LINEAR,
        sample_size=n, criterion=N,
    )


def longley_cook_credibility(n: int, N: int, gamma: float = DEFAULT_GAMMA) -> CredibilityWeight:
    """``Z = min(1, (1 + gamma) n / (n + gamma N))``."""
    n = _check_count(n, "n", 0)
    N = _check_count(N, "N", 1)
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise ValueError(f"gamma must be a finite value >= 0, got {gamma!r}")
    denom = n + gamma * N
    if denom <= 0:
        raise ValueError("Longley-Cook weight undefined for n = 0 and gamma * N = 0")
    ratio = (1.0 + gamma) * n / denom
    return CredibilityWeight(
        value=min(1.0, ratio), unclamped=ratio, method=WeightMethod.LONGLEY_COOK,
        sample_size=n, criterion=N, gamma=gamma,
    )


def credibility_weight(n: int, N: int, method="linear", gamma: float = DEFAULT_GAMMA) -> CredibilityWeight:
    method = WeightMethod.parse(method)
    if method is WeightMethod.LINEAR:
        return linear_credibility(n, N)
    return longley_cook_credibility(n, N, gamma)


def _weight_value(z) -> float:
    value = z.value if isinstance(z, CredibilityWeight) else float(z)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"credibility weight must lie in [0, 1], got {value!r}")
    return value


def adjust_pvalue(pvalue: float, z) -> float:
    """Lower confidence bound ``pvalue * Z`` of a p-value with credibility ``Z``."""
    pvalue = check_probability(pvalue, "pvalue")
    return pvalue * _weight_value(z)


def pvalue_interval(pvalue: float, z) -> tuple[float, float]:
    """``(pvalue * Z, min(1, pvalue * (2 - Z)))``. Only the lower end drives decisions."""
    pvalue = check_probability(pvalue, "pvalue")
    zv = _weight_value(z)
    return pvalue * zv, min(1.0, pvalue * (2.0 - zv))


def percent(x: float) -> int:
    """Whole-percent display rounding used when comparing with printed reports."""
    return _round_half_up(100.0 * x)
