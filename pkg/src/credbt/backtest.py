"""Backtesting pipeline: PIT series -> uniformity test -> credibility verdict.

A verdict is produced per (risk factor, horizon). Inputs are either raw PIT
observations, which are bucketed into non-overlapping series and tested, or
pre-computed ``(risk_factor, horizon, pvalue, n)`` rows such as the shipped
EUR-curve fixture.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from credbt.credibility import (
    DEFAULT_COVERAGE,
    DEFAULT_GAMMA,
    DEFAULT_HALF_WIDTH,
    CredibilityQuery,
    CredibilityWeight,
    WeightMethod,
    adjust_pvalue,
    credibility_weight,
    full_credibility_uniform,
)
from credbt.statdist import check_probability
from credbt.uniformity import Sample01, TestKind, uniformity_test

log = logging.getLogger(__name__)

HORIZON_DAYS = {"2w": 14, "1m": 30, "3m": 91, "6m": 182, "1y": 365, "18m": 547, "2y": 730}
_HORIZON_LABELS = {v: k for k, v in HORIZON_DAYS.items()}

PIT_HEADER = ("risk_factor", "init_date", "horizon", "pit")
FIXTURE_HEADER = ("risk_factor", "horizon", "pvalue", "n")
VERDICT_HEADER = (
    "risk_factor", "horizon", "n", "test", "raw_pvalue",
    "criterion_N", "z", "adjusted_pvalue", "decision",
)


def parse_horizon(value) -> int:
    """Horizon in calendar days from a label (``"1y"``) or a day count."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        days = int(value)
    else:
        text = str(value).strip().lower()
        if text in HORIZON_DAYS:
            return HORIZON_DAYS[text]
        try:
            days = int(text)
        except ValueError:
            raise ValueError(
                f"unknown horizon {value!r}; use one of {', '.join(HORIZON_DAYS)} or a day count"
            ) from None
    if days <= 0:
        raise ValueError(f"horizon must be positive, got {days}")
    return days


def horizon_label(days: int) -> str:
    return _HORIZON_LABELS.get(days, str(days))


class Decision(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"


@dataclass(frozen=True)
class PitObservation:
    risk_factor: str
    init_date: date
    horizon: int
    pit: float

    def __post_init__(self):
        if not self.risk_factor:
            raise ValueError("risk_factor must be non-empty")
        if not isinstance(self.init_date, date):
            raise ValueError(f"init_date must be a date, got {self.init_date!r}")
        if int(self.horizon) <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon!r}")
        check_probability(self.pit, "pit")


@dataclass(frozen=True)
class FixtureRow:
    """Pre-computed test result for one (risk factor, horizon)."""

    risk_factor: str
    horizon: int
    pvalue: float
    n: int

    def __post_init__(self):
        if not self.risk_factor:
            raise ValueError("risk_factor must be non-empty")
        check_probability(self.pvalue, "pvalue")
        if int(self.n) < 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")


@dataclass(frozen=True)
class HorizonSeries:
    risk_factor: str
    horizon: int
    dates: tuple[date, ...]
    pits: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.pits)

    @property
    def sample(self) -> Sample01:
        return Sample01(self.pits)


@dataclass(frozen=True)
class BacktestConfig:
    coverage: float = DEFAULT_COVERAGE
    half_width: float = DEFAULT_HALF_WIDTH
    method: WeightMethod = WeightMethod.LINEAR
    gamma: float = DEFAULT_GAMMA
    test: TestKind = TestKind.ANDERSON_DARLING
    threshold: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "method", WeightMethod.parse(self.method))
        object.__setattr__(self, "test", TestKind.parse(self.test))
        check_probability(self.threshold, "threshold", open_interval=True)
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        CredibilityQuery(self.coverage, self.half_width)

    @property
    def query(self) -> CredibilityQuery:
        return CredibilityQuery(self.coverage, self.half_width)


@dataclass(frozen=True)
class BacktestVerdict:
    risk_factor: str
    horizon: int
    n: int
    test: TestKind
    raw_pvalue: float
    criterion_N: int
    z: CredibilityWeight
    adjusted_pvalue: float
    decision: Decision

    @property
    def horizon_label(self) -> str:
        return horizon_label(self.horizon)


@dataclass(frozen=True)
class RowError:
    line: int
    message: str


def pit_transform(realized: float, forecast_sample: Sequence[float]) -> float:
    """Mid-rank empirical CDF of ``realized`` within a forecast sample.

    ``(#{x < r} + #{x == r} / 2 + 1/2) / (m + 1)``, which stays strictly
    inside (0, 1).
    """
    xs = np.asarray(forecast_sample, dtype=float)
    m = xs.size
    if m == 0:
        raise ValueError("forecast sample must be non-empty")
    if not np.all(xs[:-1] <= xs[1:]):
        xs = np.sort(xs)
    below = np.searchsorted(xs, realized, side="left")
    upto = np.searchsorted(xs, realized, side="right")
    return (below + 0.5 * (upto - below) + 0.5) / (m + 1)


def bucket_nonoverlapping(
    observations: Iterable[PitObservation],
    horizon,
    end: date | None = None,
) -> dict[str, HorizonSeries]:
    """Greedy earliest-first selection of non-overlapping forecast intervals.

    Observations for other horizons are ignored. With ``end`` set, only
    intervals whose realisation date ``init_date + horizon`` falls on or
    before ``end`` are eligible.
    """
    days = parse_horizon(horizon)
    step = timedelta(days=days)
    by_factor: dict[str, list[PitObservation]] = {}
    for obs in observations:
        if obs.horizon != days:
            continue
        if end is not None and obs.init_date + step > end:
            continue
        by_factor.setdefault(obs.risk_factor, []).append(obs)

    out = {}
    for rf in sorted(by_factor):
        kept_dates, kept_pits = [], []
        last = None
        for obs in sorted(by_factor[rf], key=lambda o: o.init_date):
            if last is None or obs.init_date >= last + step:
                kept_dates.append(obs.init_date)
                kept_pits.append(float(obs.pit))
                last = obs.init_date
        out[rf] = HorizonSeries(rf, days, tuple(kept_dates), tuple(kept_pits))
    return out


def credibility_verdict(
    risk_factor: str, horizon: int, n: int, raw_pvalue: float, cfg: BacktestConfig
) -> BacktestVerdict:
    """Weight a raw p-value by the credibility of a sample of size ``n``."""
    if n < 1:
        raise ValueError("cannot backtest an empty series")
    N = full_credibility_uniform(cfg.query).rounded
    z = credibility_weight(n, N, cfg.method, cfg.gamma)
    adjusted = adjust_pvalue(raw_pvalue, z)
    decision = Decision.ACCEPT if adjusted >= cfg.threshold else Decision.REJECT
    return BacktestVerdict(
        risk_factor=risk_factor, horizon=horizon, n=n, test=cfg.test,
        raw_pvalue=float(raw_pvalue), criterion_N=N, z=z,
        adjusted_pvalue=adjusted, decision=decision,
    )


def run_backtest(series: HorizonSeries, cfg: BacktestConfig = BacktestConfig()) -> BacktestVerdict:
    if series.n == 0:
        raise ValueError(f"empty series for {series.risk_factor} at horizon {series.horizon}")
    outcome = uniformity_test(series.sample, cfg.test)
    return credibility_verdict(series.risk_factor, series.horizon, series.n, outcome.pvalue, cfg)


def _sort_key(v: BacktestVerdict):
    return (v.risk_factor, v.horizon)


def run_portfolio(
    inputs: Iterable,
    cfg: BacktestConfig = BacktestConfig(),
    *,
    errors: list[RowError] | None = None,
    end: date | None = None,
    max_workers: int | None = None,
) -> list[BacktestVerdict]:
    """Verdicts for every (risk factor, horizon) in ``inputs``.

    ``inputs`` may mix :class:`PitObservation`, :class:`FixtureRow` and raw
    CSV-style dicts. Rows that fail to parse are appended to ``errors`` (when
    given) and logged; the rest are processed.
    """
    if errors is None:
        errors = []
    observations: list[PitObservation] = []
    fixture: list[FixtureRow] = []
    for line, item in enumerate(inputs, start=1):
        try:
            if isinstance(item, PitObservation):
                observations.append(item)
            elif isinstance(item, FixtureRow):
                fixture.append(item)
            elif isinstance(item, dict):
                parsed = _parse_row(item)
                (observations if isinstance(parsed, PitObservation) else fixture).append(parsed)
            else:
                raise ValueError(f"unsupported input {type(item).__name__}")
        except (ValueError, KeyError, TypeError) as exc:
            errors.append(RowError(line, str(exc)))
            log.warning("skipping row %d: %s", line, exc)

    jobs = [(r.risk_factor, r.horizon, r.n, r.pvalue) for r in fixture]
    verdicts = []
    for rf, h, n, p in jobs:
        try:
            verdicts.append(credibility_verdict(rf, h, n, p, cfg))
        except ValueError as exc:
            errors.append(RowError(0, f"{rf}/{horizon_label(h)}: {exc}"))

    series = []
    for h in sorted({o.horizon for o in observations}):
        series.extend(bucket_nonoverlapping(observations, h, end=end).values())
    series = [s for s in series if s.n > 0]
    if max_workers and max_workers > 1 and len(series) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            verdicts.extend(pool.map(lambda s: run_backtest(s, cfg), series))
    else:
        verdicts.extend(run_backtest(s, cfg) for s in series)
    return sorted(verdicts, key=_sort_key)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def _parse_row(row: dict):
    if "pit" in row and row.get("pit") not in (None, ""):
        return PitObservation(
            risk_factor=str(row["risk_factor"]).strip(),
            init_date=date.fromisoformat(str(row["init_date"]).strip()),
            horizon=parse_horizon(row["horizon"]),
            pit=_parse_float(row["pit"], "pit"),
        )
    n = _parse_float(row["n"], "n")
    if n != int(n):
        raise ValueError(f"n must be an integer, got {row['n']!r}")
    return FixtureRow(
        risk_factor=str(row["risk_factor"]).strip(),
        horizon=parse_horizon(row["horizon"]),
        pvalue=_parse_float(row["pvalue"], "pvalue"),
        n=int(n),
    )


def _parse_float(text, name: str) -> float:
    if text is None:
        raise ValueError(f"missing {name}")
    try:
        value = float(str(text).strip())
    except ValueError:
        raise ValueError(f"{name} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {text!r}")
    return value


def read_rows(source, errors: list[RowError] | None = None) -> list:
    """Parse a PIT or fixture CSV (detected from the header).

    ``source`` is a path or an open text stream. Malformed rows are reported
    through ``errors`` with their 1-based file line number.
    """
    if errors is None:
        errors = []
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_rows(fh, errors)
    reader = csv.DictReader(source)
    header = tuple(h.strip() for h in (reader.fieldnames or ()))
    if set(PIT_HEADER) <= set(header):
        kind = "pit"
    elif set(FIXTURE_HEADER) <= set(header):
        kind = "fixture"
    else:
        raise ValueError(
            f"unrecognised CSV header {','.join(header)!r}; expected "
            f"{','.join(PIT_HEADER)!r} or {','.join(FIXTURE_HEADER)!r}"
        )
    reader.fieldnames = list(header)
    rows = []
    for raw in reader:
        line = reader.line_num
        try:
            if None in raw:
                raise ValueError("too many fields")
            if kind == "fixture":
                raw = {k: raw.get(k) for k in FIXTURE_HEADER}
            rows.append(_parse_row(raw))
        except (ValueError, KeyError, TypeError) as exc:
            errors.append(RowError(line, str(exc)))
            log.warning("line %d: %s", line, exc)
    return rows


def load_eur_fixture() -> list[FixtureRow]:
    """Anderson-Darling p-values for the EUR curve, Jan 2002 - Jun 2013."""
    text = resources.files("credbt").joinpath("data/eur_pvalues.csv").read_text()
    return read_rows(io.StringIO(text))


def _fmt(x: float) -> str:
    return format(float(x), ".10g")


def write_verdicts_csv(verdicts: Iterable[BacktestVerdict], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(VERDICT_HEADER)
    for v in verdicts:
        w.writerow([
            v.risk_factor, v.horizon_label, v.n, v.test.value, _fmt(v.raw_pvalue),
            v.criterion_N, _fmt(v.z.value), _fmt(v.adjusted_pvalue), v.decision.value,
        ])


def write_pit_csv(observations: Iterable[PitObservation], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(PIT_HEADER)
    for o in observations:
        w.writerow([o.risk_factor, o.init_date.isoformat(), horizon_label(o.horizon), repr(float(o.pit))])
