"""Goodness-of-fit tests of a PIT sample against U(0, 1).

Anderson-Darling is the primary test; Kolmogorov-Smirnov and Cramer-von Mises
are supported alternatives. The statistic functions accept either a single
sample or a 2-D array of samples (one per row), which is what the Monte-Carlo
calibration code relies on.

P-value approximations
----------------------
* AD: Marsaglia & Marsaglia (2004), asymptotic CDF ``adinf`` plus the
  finite-n ``errfix`` correction. Good to about 1e-4 for n >= 5.
* KS: exact distribution for n <= 140 (Marsaglia, Tsang & Wang 2003 matrix
  method); above that the Pelz-Good (1976) asymptotic expansion, with twice
  the exact one-sided Smirnov tail once p drops below about 3e-3.
* CvM: Anderson & Darling (1952) asymptotic series with the first-order
  finite-n correction of Csorgo & Faraway (1996). The far upper tail uses the
  leading chi-square term, rescaled to join the series continuously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc, gamma, gammaln, kv, smirnov

CLAMP_EPS = 1e-10
KS_EXACT_MAX_N = 140


class TestKind(str, Enum):
    ANDERSON_DARLING = "anderson_darling"
    KOLMOGOROV_SMIRNOV = "kolmogorov_smirnov"
    CRAMER_VON_MISES = "cramer_von_mises"

    @property
    def short(self) -> str:
        return _SHORT[self]

    @classmethod
    def parse(cls, value: "str | TestKind") -> "TestKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown uniformity test {value!r}; expected ad, ks or cvm") from None


_SHORT = {
    TestKind.ANDERSON_DARLING: "ad",
    TestKind.KOLMOGOROV_SMIRNOV: "ks",
    TestKind.CRAMER_VON_MISES: "cvm",
}
_ALIASES = {v: k.value for k, v in _SHORT.items()}


@dataclass(frozen=True, eq=False)
class Sample01:
    """Sorted sample of values in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size == 0:
            raise ValueError("uniformity tests need a non-empty sample")
        if np.isnan(v).any() or v[0] < 0.0 or v[-1] > 1.0:
            raise ValueError("sample values must lie in [0, 1]")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class TestOutcome:
    test: TestKind
    statistic: float
    pvalue: float
    n: int


def _sorted_rows(sample) -> np.ndarray:
    if isinstance(sample, Sample01):
        return sample.values
    u = np.asarray(sample, dtype=float)
    if u.ndim == 0:
        u = u.reshape(1)
    if u.shape[-1] == 0:
        raise ValueError("uniformity tests need a non-empty sample")
    if np.isnan(u).any() or (u < 0).any() or (u > 1).any():
        raise ValueError("sample values must lie in [0, 1]")
    return np.sort(u, axis=-1)


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------

def ad_statistic(sample) -> np.ndarray | float:
    """Anderson-Darling A^2 against U(0, 1).

    Values are clamped to ``[1e-10, 1 - 1e-10]`` so boundary PITs keep A^2
    finite. Both ``u`` and ``1 - u`` are clamped at ``1e-10`` directly, which
    keeps the statistic exactly symmetric under ``u -> 1 - u``.
    """
    u = _sorted_rows(sample)
    n = u.shape[-1]
    w = 2.0 * np.arange(1, n + 1) - 1.0
    log_u = np.log(np.maximum(u, CLAMP_EPS))
    log_1mu = np.log(np.maximum(1.0 - u[..., ::-1], CLAMP_EPS))
    s = np.sum(w * (log_u + log_1mu), axis=-1)
    a2 = -n - s / n
    return float(a2) if np.ndim(a2) == 0 else a2


def ks_statistic(sample) -> np.ndarray | float:
    """Two-sided Kolmogorov-Smirnov distance ``D_n`` to the U(0, 1) CDF."""
    u = _sorted_rows(sample)
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - u, axis=-1)
    d_minus = np.max(u - (i - 1) / n, axis=-1)
    d = np.maximum(d_plus, d_minus)
    return float(d) if np.ndim(d) == 0 else d


def cvm_statistic(sample) -> np.ndarray | float:
    """Cramer-von Mises ``W^2`` against U(0, 1)."""
    u = _sorted_rows(sample)
    n = u.shape[-1]
    pos = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    w2 = 1.0 / (12.0 * n) + np.sum((u - pos) ** 2, axis=-1)
    return float(w2) if np.ndim(w2) == 0 else w2


# --------------------------------------------------------------------------
# Anderson-Darling p-value
# --------------------------------------------------------------------------

def _adinf(z: np.ndarray) -> np.ndarray:
    """Asymptotic CDF of A^2 (Marsaglia & Marsaglia 2004)."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    lo = (z > 0) & (z < 2.0)
    hi = z >= 2.0
    zl = z[lo]
    out[lo] = (
        np.exp(-1.2337141 / zl) / np.sqrt(zl)
        * (2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * zl) * zl) * zl) * zl) * zl)
    )
    zh = z[hi]
    out[hi] = np.exp(
        -np.exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * zh) * zh) * zh) * zh) * zh)
    )
    return out


def _errfix(n: int, x: np.ndarray) -> np.ndarray:
    """Finite-n correction added to the asymptotic CDF value ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    c = 0.01265 + 0.1757 / n

    top = x > 0.8
    xt = x[top]
    out[top] = (-130.2137 + (745.2337 - (1705.091 - (1950.646 - (1116.360 - 255.7844 * xt) * xt) * xt) * xt) * xt) / n

    low = x < c
    t = x[low] / c
    t = np.sqrt(t) * (1.0 - t) * (49.0 * t - 102.0)
    out[low] = t * (0.0037 / (n * n) + 0.00078 / n + 0.00006) / n

    mid = ~(top | low)
    xm = (x[mid] - c) / (0.8 - c)
    t = -0.00022633 + (6.54034 - (14.6538 - (14.458 - (8.259 - 1.91864 * xm) * xm) * xm) * xm) * xm
    out[mid] = t * (0.04213 + 0.01365 / n) / n
    return out


def _adinf_sf(z: np.ndarray) -> np.ndarray:
    """``1 - adinf(z)`` without cancellation in the upper branch."""
    z = np.asarray(z, dtype=float)
    zh = np.maximum(z, 2.0)
    log_cdf = -np.exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * zh) * zh) * zh) * zh) * zh)
    return np.where(z >= 2.0, -np.expm1(log_cdf), 1.0 - _adinf(z))


# Beyond this asymptotic CDF level errfix flattens to a constant -6e-4/n,
# which would put a floor under the p-value; the tail is rescaled instead.
_AD_SWITCH_CDF = 0.995
_AD_SWITCH_A2 = float(brentq(lambda z: _adinf(np.array([z]))[0] - _AD_SWITCH_CDF, 2.0, 10.0, xtol=1e-14))


def ad_pvalue(a2, n: int):
    """Upper-tail p-value of A^2 for a sample of size ``n`` under U(0, 1)."""
    n = _check_n(n)
    a2 = np.asarray(a2, dtype=float)
    if (a2 < 0).any() or np.isnan(a2).any():
        raise ValueError("A^2 must be >= 0")
    if n == 1:
        # A^2 = -1 - ln(u(1 - u)); invert u(1 - u) <= exp(-1 - a)
        q = np.minimum(4.0 * np.exp(-1.0 - a2), 1.0)
        p = 1.0 - np.sqrt(1.0 - q)
        return float(p) if p.ndim == 0 else p
    x = _adinf(a2)
    body = _adinf_sf(a2) - _errfix(n, x)
    switch_sf = 1.0 - _AD_SWITCH_CDF
    ratio = (switch_sf - _errfix(n, np.array([_AD_SWITCH_CDF]))[0]) / switch_sf
    tail = _adinf_sf(a2) * ratio
    p = np.clip(np.where(a2 > _AD_SWITCH_A2, tail, body), 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov p-value
# --------------------------------------------------------------------------

def _ks_cdf_exact(d: float, n: int) -> float:
    """P(D_n < d), Marsaglia-Tsang-Wang."""
    nd = n * d
    if nd <= 0.5:
        return 0.0
    if d >= 1.0:
        return 1.0
    k = int(math.floor(nd)) + 1
    m = 2 * k - 1
    h = k - nd
    idx = np.arange(m)
    diff = idx[:, None] - idx[None, :] + 1
    H = (diff >= 0).astype(float)
    powers = h ** np.arange(1, m + 1)
    H[:, 0] -= powers
    H[m - 1, :] -= powers[::-1]
    if 2.0 * h - 1.0 > 0.0:
        H[m - 1, 0] += (2.0 * h - 1.0) ** m
    H = np.where(diff > 0, H * np.exp(-gammaln(np.maximum(diff, 1) + 1.0)), H)

    # H^n by repeated squaring, rescaling to keep entries representable
    result = np.eye(m)
    res_exp = 0
    base = H
    base_exp = 0
    p = n
    while p:
        if p & 1:
            result = result @ base
            res_exp += base_exp
            scale = np.abs(result).max()
            if scale > 1e140:
                result = result / 1e140
                res_exp += 140
        p >>= 1
        if p:
            base = base @ base
            base_exp *= 2
            scale = np.abs(base).max()
            if scale > 1e140:
                base = base / 1e140
                base_exp += 140
    log_front = math.lgamma(n + 1) - n * math.log(n) + res_exp * math.log(10.0)
    value = result[k - 1, k - 1]
    if value <= 0:
        return 0.0
    return min(1.0, math.exp(log_front + math.log(value)))


_SQRT_2PI = math.sqrt(2.0 * math.pi)
_PI2 = math.pi ** 2
# above z = sqrt(n) d of 1.8 (p around 3e-3) the tail is 2 x the one-sided law
_KS_TAIL_Z = 1.8


def _pelz_good_cdf(d: float, n: int) -> float:
    """``P(D_n <= d)`` from the Pelz-Good expansion to order ``n^(-3/2)``."""
    z = math.sqrt(n) * d
    if z <= 0.04:
        return 0.0
    z2 = z * z
    z4 = z2 * z2
    z6 = z4 * z2
    kmax = int(math.ceil(16.0 * z / math.pi)) + 2
    s0 = s1 = s2 = s3 = 0.0
    for k in range(1, kmax + 1):
        m2 = (2 * k - 1) ** 2
        a = _PI2 * m2 / 4.0  # pi^2 (k - 1/2)^2
        e = math.exp(-a / (2.0 * z2))
        s0 += e
        s1 += (a - z2) * e
        s2 += (6 * z6 + 2 * z4 + (2 * z4 - 5 * z2) * a + (1 - 2 * z2) * a * a) * e
        s3 += (-30 * z6 - 90 * z6 * z2 + (135 * z4 - 96 * z6) * a
               + (212 * z4 - 60 * z2) * a * a + (5 - 30 * z2) * a ** 3) * e
    t2 = t3 = 0.0
    for k in range(1, kmax + 1):
        b = _PI2 * k * k
        e = math.exp(-b / (2.0 * z2))
        t2 += k * k * e
        t3 += (3 * z2 - b) * k * k * e
    k0 = _SQRT_2PI * s0 / z
    k1 = _SQRT_2PI * s1 / (6.0 * z4)
    k2 = _SQRT_2PI * (s2 / (72.0 * z6 * z) - _PI2 * t2 / (36.0 * z2 * z))
    k3 = _SQRT_2PI * (s3 / (6480.0 * z6 * z4) + _PI2 * t3 / (216.0 * z6))
    sn = math.sqrt(n)
    return k0 + k1 / sn + k2 / n + k3 / (n * sn)


def _ks_pvalue_large_n(d: float, n: int) -> float:
    d_tail = _KS_TAIL_Z / math.sqrt(n)
    if d <= d_tail:
        return min(1.0, max(0.0, 1.0 - _pelz_good_cdf(d, n)))
    # P(D_n >= d) = 2 P(D_n+ >= d) up to a term of order p^2; scaled to join
    ratio = (1.0 - _pelz_good_cdf(d_tail, n)) / (2.0 * smirnov(n, d_tail))
    return min(1.0, 2.0 * smirnov(n, d) * ratio)


def _ks_pvalue_scalar(d: float, n: int) -> float:
    if d <= 0.0:
        return 1.0
    if d >= 1.0:
        return 0.0
    if n <= KS_EXACT_MAX_N:
        if n * d <= 0.5:
            return 1.0
        return max(0.0, 1.0 - _ks_cdf_exact(d, n))
    return _ks_pvalue_large_n(d, n)


def ks_pvalue(d, n: int):
    """Two-sided KS p-value: exact for ``n <= 140``, asymptotic above."""
    n = _check_n(n)
    arr = np.asarray(d, dtype=float)
    if np.isnan(arr).any() or (arr < 0).any() or (arr > 1).any():
        raise ValueError("KS distance must lie in [0, 1]")
    if arr.ndim == 0:
        return _ks_pvalue_scalar(float(arr), n)
    flat = arr.ravel()
    # the exact path is a small matrix power per value; share repeated values
    uniq, inverse = np.unique(flat, return_inverse=True)
    pv = np.array([_ks_pvalue_scalar(float(v), n) for v in uniq])
    return pv[inverse].reshape(arr.shape)


# --------------------------------------------------------------------------
# Cramer-von Mises p-value
# --------------------------------------------------------------------------

_CVM_TERMS = 12
_CVM_COEF = np.exp(
    gammaln(np.arange(_CVM_TERMS) + 0.5) - gammaln(0.5) - gammaln(np.arange(_CVM_TERMS) + 1.0)
)


def _cvm_cdf_inf(x: np.ndarray) -> np.ndarray:
    """Asymptotic CDF of W^2 (Anderson & Darling 1952 series)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 1e-3
    xp = x[pos]
    total = np.zeros_like(xp)
    for j in range(_CVM_TERMS):
        m = 4 * j + 1
        z = m * m / (16.0 * xp)
        total += _CVM_COEF[j] * math.sqrt(m) * np.exp(-z) * kv(0.25, z)
    out[pos] = total / (np.pi * np.sqrt(xp))
    # large x: Bessel terms underflow to 0 * inf; the CDF is 1 to machine precision
    out = np.where(np.isfinite(out), out, 1.0)
    return np.clip(out, 0.0, 1.0)


def _cvm_sf_tail(x: np.ndarray) -> np.ndarray:
    """Leading term of ``1 - F(x)``: W^2 = sum Z_j^2 / (j pi)^2 is dominated by j = 1."""
    # prod_{j>=2} (1 - 1/j^2)^(-1/2) = sqrt(2)
    return math.sqrt(2.0) * erfc(np.pi * np.sqrt(np.asarray(x, dtype=float)) / math.sqrt(2.0))


def _ed2(y):
    z = y * y / 4.0
    return np.exp(-z) * (y / 2.0) ** 1.5 * (kv(0.25, z) + kv(0.75, z)) / math.sqrt(math.pi)


def _ed3(y):
    z = y * y / 4.0
    b = 2.0 * kv(0.25, z) + 3.0 * kv(0.75, z) - kv(1.25, z)
    return np.exp(-z) * (y / 2.0) ** 2.5 * b / math.sqrt(math.pi)


def _cvm_psi1(x: np.ndarray) -> np.ndarray:
    """First-order 1/n correction to the CDF of W^2, without its ``F(x)/12`` term."""
    sx = 2.0 * np.sqrt(x)
    y1 = x ** 0.75
    y2 = x ** 1.25
    total = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(50):
        if not active.any():
            break
        m = 2 * k + 1
        g0 = gamma(k + 0.5)
        g1 = gamma(k + 1.5)
        sa, a1, a2 = sx[active], y1[active], y2[active]
        a = (m * g0 * _ed2((4 * k + 3) / sa) / (9.0 * a1)
             + g0 * _ed3((4 * k + 1) / sa) / (72.0 * a2)
             + 2.0 * (m + 2) * g1 * _ed3((4 * k + 5) / sa) / (12.0 * a2)
             + 7.0 * m * g0 * _ed2((4 * k + 1) / sa) / (144.0 * a1)
             + 7.0 * m * g0 * _ed2((4 * k + 5) / sa) / (144.0 * a1))
        term = -np.nan_to_num(a) / (math.pi * math.factorial(k))
        total[active] += term
        still = np.abs(term) >= 1e-10
        active[active] = still
    return total


def _cvm_cdf_n(x: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(x)
    inside = (x > 1.0 / (12 * n)) & (x < n / 3.0)
    xi = x[inside]
    out[inside] = _cvm_cdf_inf(xi) * (1.0 + 1.0 / (12 * n)) + _cvm_psi1(xi) / n
    out[x >= n / 3.0] = 1.0
    return np.clip(out, 0.0, 1.0)


_CVM_SWITCH = 1.5


def cvm_pvalue(w2, n: int):
    """Upper-tail p-value of ``W^2`` for a sample of size ``n``."""
    n = _check_n(n)
    w2 = np.asarray(w2, dtype=float)
    if np.isnan(w2).any() or (w2 < 0).any():
        raise ValueError("W^2 must be >= 0")
    if n == 1:
        # W^2 = 1/12 + (u - 1/2)^2
        p = np.clip(1.0 - 2.0 * np.sqrt(np.maximum(w2 - 1.0 / 12.0, 0.0)), 0.0, 1.0)
        return float(p) if p.ndim == 0 else p
    x = np.atleast_1d(w2)
    body = 1.0 - _cvm_cdf_n(np.minimum(x, _CVM_SWITCH), n)
    switch_sf = 1.0 - _cvm_cdf_n(np.array([_CVM_SWITCH]), n)[0]
    tail = _cvm_sf_tail(x) * (switch_sf / _cvm_sf_tail(_CVM_SWITCH))
    p = np.clip(np.where(x > _CVM_SWITCH, tail, body), 0.0, 1.0)
    p = np.where(x >= n / 3.0, 0.0, p)
    return float(p[0]) if w2.ndim == 0 else p.reshape(w2.shape)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

_STATISTIC = {
    TestKind.ANDERSON_DARLING: (ad_statistic, ad_pvalue),
    TestKind.KOLMOGOROV_SMIRNOV: (ks_statistic, ks_pvalue),
    TestKind.CRAMER_VON_MISES: (cvm_statistic, cvm_pvalue),
}


def uniformity_test(sample, test="anderson_darling") -> TestOutcome:
    kind = TestKind.parse(test)
    s = sample if isinstance(sample, Sample01) else Sample01(sample)
    stat_fn, p_fn = _STATISTIC[kind]
    stat = float(stat_fn(s))
    return TestOutcome(test=kind, statistic=stat, pvalue=float(p_fn(stat, s.n)), n=s.n)


def statistic_and_pvalue(samples: np.ndarray, test="anderson_darling") -> tuple[np.ndarray, np.ndarray]:
    """Vectorised (statistic, p-value) over the rows of a 2-D sample array."""
    kind = TestKind.parse(test)
    stat_fn, p_fn = _STATISTIC[kind]
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    stats = np.asarray(stat_fn(samples))
    return stats, np.asarray(p_fn(stats, samples.shape[-1]))


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or int(n) < 1:
        raise ValueError(f"sample size must be an integer >= 1, got {n!r}")
    return int(n)
