"""Seeded synthetic PIT scenarios from a Gaussian random walk.

The realised process is a single daily random walk over the calendar. At each
initialisation date the forecaster simulates ``forecast_paths`` terminal
values with the model volatility; the realisation uses ``volatility *
misspecification``. With ``misspecification == 1`` the PITs are uniform.

Random streams come from :class:`numpy.random.SeedSequence` with a spawn key
per purpose: one stream for the realised path and one per (init date,
horizon) for the forecast draws, so adding horizons or dates leaves existing
forecast streams untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Sequence

import numpy as np
from scipy.special import ndtr
from scipy.stats import binom

from credbt.backtest import PitObservation, parse_horizon, pit_transform

_PATH_KEY = 0
_FORECAST_KEY = 1


@dataclass(frozen=True)
class ScenarioSpec:
    calendar: tuple[date, ...]
    horizons: tuple[int, ...]
    seed: int
    forecast_paths: int = 999
    drift: float = 0.0
    volatility: float = 0.01
    misspecification: float = 1.0
    model: str = "gaussian_random_walk"
    risk_factor: str = "SYNTH"

    def __post_init__(self):
        object.__setattr__(self, "calendar", tuple(sorted(set(self.calendar))))
        object.__setattr__(self, "horizons", tuple(parse_horizon(h) for h in self.horizons))
        if self.model not in ("gaussian_random_walk", "gauss-rw"):
            raise ValueError(f"unsupported model {self.model!r}")
        if not self.calendar:
            raise ValueError("calendar must contain at least one date")
        if not self.horizons:
            raise ValueError("at least one horizon is required")
        if not (math.isfinite(self.volatility) and self.volatility > 0):
            raise ValueError(f"volatility must be > 0, got {self.volatility!r}")
        if not (math.isfinite(self.misspecification) and self.misspecification > 0):
            raise ValueError(f"misspecification must be > 0, got {self.misspecification!r}")
        if int(self.forecast_paths) < 2:
            raise ValueError("forecast_paths must be >= 2")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")


def monthly_calendar(start: date, end: date) -> list[date]:
    """First-of-month dates from ``start``'s month to ``end``'s month inclusive."""
    out = []
    y, m = start.year, start.month
    while (y, m) <= (end.year, end.month):
        out.append(date(y, m, 1))
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return out


def day_calendar(start: date, end: date, freq: int) -> list[date]:
    if freq < 1:
        raise ValueError("freq must be >= 1 day")
    if end < start:
        raise ValueError("end precedes start")
    n = (end - start).days // freq + 1
    return [start + timedelta(days=i * freq) for i in range(n)]


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def realised_path(spec: ScenarioSpec) -> tuple[date, np.ndarray]:
    """Daily realised path, starting at 0 on the first calendar date.

    The increments are drawn in one pass from the path stream, so extending
    the horizon set only appends days; earlier values are unchanged.
    """
    origin = spec.calendar[0]
    days = (spec.calendar[-1] - origin).days + max(spec.horizons)
    rng = _stream(spec.seed, _PATH_KEY)
    sigma = spec.volatility * spec.misspecification
    steps = spec.drift + sigma * rng.standard_normal(days)
    return origin, np.concatenate(([0.0], np.cumsum(steps)))


def generate(spec: ScenarioSpec) -> list[PitObservation]:
    """PIT observations for every (init date, horizon) pair of ``spec``."""
    origin, path = realised_path(spec)
    out = []
    for d in spec.calendar:
        t0 = (d - origin).days
        x0 = path[t0]
        for h in spec.horizons:
            rng = _stream(spec.seed, _FORECAST_KEY, d.toordinal(), h)
            forecast = x0 + spec.drift * h + spec.volatility * math.sqrt(h) * rng.standard_normal(spec.forecast_paths)
            forecast.sort()
            pit = pit_transform(path[t0 + h], forecast)
            out.append(PitObservation(spec.risk_factor, d, h, float(pit)))
    return out


def simulate_pit_series(
    reps: int,
    n: int,
    *,
    forecast_paths: int = 999,
    misspecification: float = 1.0,
    rng: np.random.Generator | None = None,
    normals: np.ndarray | None = None,
    uniforms: np.ndarray | None = None,
) -> np.ndarray:
    """``reps`` independent PIT series of length ``n``, shape ``(reps, n)``.

    Equivalent in distribution to bucketed output of :func:`generate`:
    non-overlapping random-walk increments are independent, and the count of
    forecast draws below the realisation is Binomial(M, Phi(s Z)) with
    ``s`` the misspecification and Z the standardised realised increment.
    Passing ``normals``/``uniforms`` gives common random numbers across
    misspecification levels.
    """
    if rng is None:
        rng = np.random.default_rng()
    if normals is None:
        normals = rng.standard_normal((reps, n))
    if uniforms is None:
        uniforms = rng.random((reps, n))
    prob = ndtr(misspecification * normals)
    below = np.maximum(binom.ppf(uniforms, forecast_paths, prob), 0.0)
    return (below + 0.5) / (forecast_paths + 1)


def synthetic_calendar(start: date, end: date, freq: int | None = None) -> Sequence[date]:
    """Monthly calendar when ``freq`` is None, else every ``freq`` days."""
    return monthly_calendar(start, end) if freq is None else day_calendar(start, end, freq)
