"""Standard-normal primitives and the moments of the (0, 1) uniform.

The CDF goes through ``math.erfc`` (the fdlibm rational approximations, which
stay accurate in both tails because the complementary form is evaluated
directly). The quantile starts from Wichura's AS241 approximation shipped in
:class:`statistics.NormalDist` and is polished with one Newton step against
:func:`std_normal_cdf`, so that the CDF/quantile round trip holds to ~1e-16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_STD_NORMAL = NormalDist()


def check_probability(p: float, name: str = "probability", *, open_interval: bool = False) -> float:
    """Validate a probability and return it as a float."""
    p = float(p)
    if math.isnan(p):
        raise ValueError(f"{name} is NaN")
    if open_interval:
        if not 0.0 < p < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {p!r}")
    elif not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def std_normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF.

    Raises
    ------
    ValueError
        If ``x`` is NaN or infinite.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"std_normal_cdf needs a finite argument, got {x!r}")
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_sf(x: float) -> float:
    """Upper tail ``1 - Phi(x)`` without cancellation."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"std_normal_sf needs a finite argument, got {x!r}")
    return 0.5 * math.erfc(x / _SQRT2)


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    p = check_probability(p, "p", open_interval=True)
    x = _STD_NORMAL.inv_cdf(p)
    # one Newton step; work on the smaller tail to keep the residual exact
    if p < 0.5:
        resid = std_normal_cdf(x) - p
    else:
        resid = (1.0 - p) - std_normal_sf(x)
    dens = std_normal_pdf(x)
    if dens > 0.0:
        x -= resid / dens
    return x


@dataclass(frozen=True)
class DistributionMoments:
    """Mean and variance of the distribution a sampled statistic is drawn from."""

    mean: float
    variance: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("moments must be finite")
        if self.variance < 0:
            raise ValueError(f"variance must be >= 0, got {self.variance!r}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def cv_squared(self) -> float:
        if self.mean == 0:
            raise ValueError("coefficient of variation is undefined for a zero mean")
        return self.variance / (self.mean * self.mean)

    @property
    def cv(self) -> float:
        return math.sqrt(self.cv_squared)


def uniform01_moments() -> DistributionMoments:
    """Moments of U(0, 1): mean 1/2, variance 1/12."""
    return DistributionMoments(mean=0.5, variance=1.0 / 12.0)
