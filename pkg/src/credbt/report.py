"""Table rendering for coverage, criterion, weight and adjusted p-value grids."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

from credbt.backtest import BacktestConfig, BacktestVerdict, FixtureRow, run_portfolio
from credbt.credibility import (
    DEFAULT_GAMMA,
    CredibilityQuery,
    WeightMethod,
    coverage_probability_poisson,
    coverage_probability_uniform,
    credibility_weight,
    full_credibility_poisson,
    full_credibility_uniform,
)

COVERAGE_N_GRID = (10, 50, 100, 500, 1000, 5000, 10000)
COVERAGE_K_GRID = (0.10, 0.05, 0.025, 0.01, 0.005)
CRITERION_K_GRID = (0.30, 0.20, 0.10, 0.05, 0.01)
NORMAL_P_GRID = (0.80, 0.90, 0.95, 0.975, 0.99, 0.995, 0.9999)
UNIFORM_P_GRID = (0.80, 0.85, 0.90, 0.95, 0.975, 0.99, 0.9999)

# k labels printed over the n = 6 and n = 5 linear-weight blocks; the cells
# themselves correspond to CRITERION_K_GRID
PRINTED_SMALL_N_K_LABELS = (0.50, 0.40, 0.30, 0.10, 0.05)
PRINTED_SMALL_N = (6, 5)

KINDS = ("coverage", "criterion", "weights", "adjusted")
DISTRIBUTIONS = ("normal", "uniform")


@dataclass
class TableRequest:
    kind: str
    distribution: str = "uniform"
    p_grid: Sequence[float] | None = None
    k_grid: Sequence[float] | None = None
    n_grid: Sequence[int] | None = None
    n: int | None = None
    method: WeightMethod = WeightMethod.LINEAR
    gamma: float = DEFAULT_GAMMA
    printed_headers: bool = False
    rows: Sequence[FixtureRow] | None = None
    config: BacktestConfig | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown table kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        self.method = WeightMethod.parse(self.method)
        if self.p_grid is None:
            self.p_grid = NORMAL_P_GRID if self.distribution == "normal" else UNIFORM_P_GRID
        if self.k_grid is None:
            self.k_grid = COVERAGE_K_GRID if self.kind == "coverage" else CRITERION_K_GRID
        if self.n_grid is None:
            self.n_grid = COVERAGE_N_GRID
        for p in self.p_grid:
            if not 0.0 < p < 1.0:
                raise ValueError(f"probability {p!r} outside (0, 1)")
        for k in self.k_grid:
            if not 0.0 < k <= 1.0:
                raise ValueError(f"half-width k={k!r} outside (0, 1]")
        for n in self.n_grid:
            if int(n) != n or n < 1:
                raise ValueError(f"sample size {n!r} must be a positive integer")
        if self.kind == "weights" and (self.n is None or self.n < 0):
            raise ValueError("weights tables need a sample size n >= 0")
        if self.kind == "adjusted" and self.rows is None:
            raise ValueError("adjusted tables need fixture rows")
        if not (self.p_grid and self.k_grid and self.n_grid):
            raise ValueError("grids must be non-empty")


@dataclass
class Table:
    """A rendered grid: ``values`` hold full precision, ``cells`` the display text."""

    title: str
    corner: str
    columns: list[str]
    row_labels: list[str]
    values: list[list[float]]
    cells: list[list[str]]
    preamble: list[list[str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        header = [self.corner, *self.columns]
        body = [[lbl, *row] for lbl, row in zip(self.row_labels, self.cells)]
        pre = [[lbl, *row] for lbl, *row in self.preamble]
        everything = [header, *pre, *body]
        ncol = max(len(r) for r in everything)
        widths = [max(len(r[i]) for r in everything if i < len(r)) for i in range(ncol)]

        def fmt(row):
            first = row[0].ljust(widths[0])
            rest = [c.rjust(widths[i + 1]) for i, c in enumerate(row[1:])]
            return "  ".join([first, *rest]).rstrip()

        lines = [self.title, ""]
        lines += [fmt(r) for r in pre]
        lines.append(fmt(header))
        lines += [fmt(r) for r in body]
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.corner, *self.columns])
        for lbl, row in zip(self.row_labels, self.cells):
            w.writerow([lbl, *(c.rstrip("%") for c in row)])
        return buf.getvalue()


def _pct_label(x: float) -> str:
    s = f"{100 * x:.4f}".rstrip("0").rstrip(".")
    return f"{s}%"


def _pct_cell(x: float) -> str:
    return f"{100 * x:.2f}%"


def _coverage(req: TableRequest) -> Table:
    fn = coverage_probability_poisson if req.distribution == "normal" else coverage_probability_uniform
    values = [[fn(int(n), k) for k in req.k_grid] for n in req.n_grid]
    return Table(
        title=f"Probability of being within +/-k of the mean ({req.distribution.capitalize()} distribution)",
        corner="n",
        columns=[f"k={_pct_label(k)}" for k in req.k_grid],
        row_labels=[str(int(n)) for n in req.n_grid],
        values=values,
        cells=[[_pct_cell(v) for v in row] for row in values],
    )


def _criterion(req: TableRequest) -> Table:
    fn = full_credibility_poisson if req.distribution == "normal" else full_credibility_uniform
    crit = [[fn(CredibilityQuery(p, k)) for k in req.k_grid] for p in req.p_grid]
    title = (
        "Full credibility criterion, normal approximation to Poisson"
        if req.distribution == "normal"
        else "Full credibility criterion, uniform distribution"
    )
    return Table(
        title=title,
        corner="P",
        columns=[f"k={_pct_label(k)}" for k in req.k_grid],
        row_labels=[_pct_label(p) for p in req.p_grid],
        values=[[float(c.rounded) for c in row] for row in crit],
        cells=[[str(c.rounded) for c in row] for row in crit],
    )


def _weights(req: TableRequest) -> Table:
    values = []
    for p in req.p_grid:
        row = []
        for k in req.k_grid:
            N = full_credibility_uniform(CredibilityQuery(p, k)).rounded
            row.append(credibility_weight(req.n, N, req.method, req.gamma).unclamped)
        values.append(row)
    labels = req.k_grid
    notes = []
    if (
        req.printed_headers
        and req.method is WeightMethod.LINEAR
        and req.n in PRINTED_SMALL_N
        and tuple(req.k_grid) == CRITERION_K_GRID
    ):
        labels = PRINTED_SMALL_N_K_LABELS
        notes.append(
            "column labels as printed in the source table; cells are computed for k = "
            + ", ".join(_pct_label(k) for k in CRITERION_K_GRID)
        )
    method = "Longley-Cook" if req.method is WeightMethod.LONGLEY_COOK else "linear"
    return Table(
        title=f"Credibility weights ({method}), n={req.n}; values above 100% mean full credibility",
        corner="P/k",
        columns=[f"k={_pct_label(k)}" for k in labels],
        row_labels=[_pct_label(p) for p in req.p_grid],
        values=values,
        cells=[[_pct_cell(v) for v in row] for row in values],
        notes=notes,
    )


def verdict_matrix(
    verdicts: Sequence[BacktestVerdict],
    title: str = "Adjusted p-values",
    factor_order: Sequence[str] | None = None,
) -> Table:
    """Risk factors x horizons grid of adjusted p-values with Z header rows."""
    horizons = sorted({v.horizon for v in verdicts})
    factors = list(dict.fromkeys(factor_order or ()))
    for v in verdicts:
        if v.risk_factor not in factors:
            factors.append(v.risk_factor)
    factors = [f for f in factors if any(v.risk_factor == f for v in verdicts)]
    cell = {(v.risk_factor, v.horizon): v for v in verdicts}
    labels = {v.horizon: v.horizon_label for v in verdicts}

    z_row, comp_row, n_row = [], [], []
    for h in horizons:
        zs = {round(v.z.value, 12) for v in verdicts if v.horizon == h}
        ns = {v.n for v in verdicts if v.horizon == h}
        if len(zs) == 1:
            z = zs.pop()
            z_row.append(_pct_cell(z))
            comp_row.append(_pct_cell(1.0 - z))
        else:
            z_row.append("mixed")
            comp_row.append("mixed")
        n_row.append(str(ns.pop()) if len(ns) == 1 else "mixed")

    values, cells = [], []
    for rf in factors:
        row_v, row_c = [], []
        for h in horizons:
            v = cell.get((rf, h))
            if v is None:
                row_v.append(float("nan"))
                row_c.append("")
            else:
                row_v.append(v.adjusted_pvalue)
                mark = "" if v.decision.value == "accept" else "*"
                row_c.append(_pct_cell(v.adjusted_pvalue) + mark)
        values.append(row_v)
        cells.append(row_c)
    return Table(
        title=title,
        corner="risk factor",
        columns=[labels[h] for h in horizons],
        row_labels=factors,
        values=values,
        cells=cells,
        preamble=[["Z", *z_row], ["1-Z", *comp_row], ["n", *n_row]],
        notes=["* marks a rejection (adjusted p-value below the warning threshold)"],
    )


def render_table(req: TableRequest) -> Table:
    if req.kind == "coverage":
        return _coverage(req)
    if req.kind == "criterion":
        return _criterion(req)
    if req.kind == "weights":
        return _weights(req)
    cfg = req.config or BacktestConfig(method=req.method, gamma=req.gamma)
    order = [r.risk_factor for r in req.rows if hasattr(r, "risk_factor")]
    return verdict_matrix(run_portfolio(req.rows, cfg), factor_order=order)
