"""Acceptance suite: one recorded PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are repeated
in the "acceptance criteria" section of the terminal summary.
"""

import csv
import io
import itertools
import math
import time
from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LEVELS, ORACLE_LARGE_N, ORACLE_SMALL_N
from credbt.backtest import PitObservation, bucket_nonoverlapping, horizon_label, load_eur_fixture
from credbt.cli import cli_main
from credbt.credibility import (
    CredibilityQuery,
    adjust_pvalue,
    full_credibility_poisson,
    full_credibility_uniform,
    linear_credibility,
    longley_cook_credibility,
)
from credbt.report import TableRequest, render_table
from credbt.statdist import std_normal_cdf, std_normal_quantile
from credbt.synthetic import ScenarioSpec, generate, simulate_pit_series
from credbt.uniformity import ad_pvalue, ad_statistic, cvm_pvalue, ks_pvalue, statistic_and_pvalue
from reference_tables import (
    CRITERION_K,
    HORIZONS,
    RISK_FACTORS,
    COVERAGE_NORMAL,
    CRITERION_NORMAL,
    COVERAGE_UNIFORM,
    CRITERION_UNIFORM,
    WEIGHTS_LINEAR,
    EUR_ADJ_LINEAR,
    EUR_Z_LINEAR,
    WEIGHTS_LONGLEY_COOK,
    EUR_ADJ_LONGLEY_COOK,
    EUR_Z_LONGLEY_COOK,
    UNIFORM_P,
)

PVALUE = {"ad": ad_pvalue, "ks": ks_pvalue, "cvm": cvm_pvalue}


def cli_csv(argv, capsys):
    code = cli_main(argv)
    out, err = capsys.readouterr()
    assert code == 0, err
    rows = list(csv.reader(io.StringIO(out)))
    return rows[0], rows[1:]


def ecdf_deviation(p):
    ps = np.sort(p)
    R = ps.size
    i = np.arange(1, R + 1) / R
    return float(max((i - ps).max(), (ps - (i - 1.0 / R)).max()))


@pytest.mark.parametrize("number,dist,table", [(1, "normal", CRITERION_NORMAL), (2, "uniform", CRITERION_UNIFORM)])
def test_criterion_tables(number, dist, table, capsys, acceptance_record):
    t0 = time.perf_counter()
    _, rows = cli_csv(["tables", "criterion", "--dist", dist, "--format", "csv"], capsys)
    elapsed = time.perf_counter() - t0
    got = [[int(c) for c in r[1:]] for r in rows]
    mismatches = sum(g != w for gr, wr in zip(got, table) for g, w in zip(gr, wr))
    ok = mismatches == 0 and len(got) == 7 and elapsed < 1.0
    acceptance_record(number, ok, f"{dist} criterion: {35 - mismatches}/35 cells exact, {elapsed * 1000:.0f} ms")
    assert ok


def test_criterion_3_coverage(acceptance_record):
    worst = 0.0
    for dist, table in (("normal", COVERAGE_NORMAL), ("uniform", COVERAGE_UNIFORM)):
        got = np.array(render_table(TableRequest("coverage", dist)).values) * 100
        worst = max(worst, float(np.max(np.abs(got - np.array(table)))))
    spot = (
        round(100 * render_table(TableRequest("coverage", "normal", n_grid=[100], k_grid=[0.1])).values[0][0], 2),
        round(100 * render_table(TableRequest("coverage", "uniform", n_grid=[100], k_grid=[0.1])).values[0][0], 2),
    )
    ok = worst <= 0.01 + 1e-9 and spot == (68.27, 91.67)
    acceptance_record(3, ok, f"70 coverage cells, max deviation {worst:.4f} pp; spot {spot[0]}% / {spot[1]}%")
    assert ok


def test_criterion_4_weights(acceptance_record):
    worst = 0.0
    for blocks, weight in ((WEIGHTS_LINEAR, lambda n, N: linear_credibility(n, N)),
                           (WEIGHTS_LONGLEY_COOK, lambda n, N: longley_cook_credibility(n, N, 0.30))):
        for n, block in blocks.items():
            for i, p in enumerate(UNIFORM_P):
                for j, k in enumerate(CRITERION_K):
                    N = full_credibility_uniform(CredibilityQuery(p, k)).rounded
                    worst = max(worst, abs(100 * weight(n, N).unclamped - block[i][j]))
    spots = (
        round(100 * linear_credibility(22, 90).value),
        round(100 * longley_cook_credibility(22, 90, 0.3).value),
        round(100 * longley_cook_credibility(11, 90, 0.3).value),
        round(100 * longley_cook_credibility(45, 90, 0.3).value),
    )
    ok = worst <= 1.0 and spots == (24, 58, 38, 81)
    acceptance_record(4, ok, f"weight blocks n=136,45,22,11,6,5 max deviation {worst:.3f} pp; spot checks {spots}")
    assert ok


def test_criterion_5_fixture_tables(tmp_path, capsys, acceptance_record):
    path = tmp_path / "eur_pvalues.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["risk_factor", "horizon", "pvalue", "n"])
        for r in load_eur_fixture():
            w.writerow([r.risk_factor, horizon_label(r.horizon), repr(r.pvalue), r.n])
    worst = 0.0
    z_ok = True
    for method, table, zrow in (("linear", EUR_ADJ_LINEAR, EUR_Z_LINEAR), ("longley-cook", EUR_ADJ_LONGLEY_COOK, EUR_Z_LONGLEY_COOK)):
        _, rows = cli_csv(["backtest", "--input", str(path), "--method", method,
                           "--p", "0.90", "--k", "0.10", "--threshold", "0.01"], capsys)
        adj = {(r[0], r[1]): 100 * float(r[7]) for r in rows}
        z = {(r[0], r[1]): 100 * float(r[6]) for r in rows}
        for i, rf in enumerate(RISK_FACTORS):
            for j, h in enumerate(HORIZONS):
                worst = max(worst, abs(adj[(rf, h)] - table[i][j]))
        z_ok &= [round(z[(RISK_FACTORS[0], h)]) for h in HORIZONS] == zrow
        z_ok &= all(len({round(z[(rf, h)], 9) for rf in RISK_FACTORS}) == 1 for h in HORIZONS)
    ok = worst <= 0.1 + 1e-9 and z_ok
    acceptance_record(5, ok, f"154 adjusted cells, max deviation {worst:.3f} pp; Z header rows {'match' if z_ok else 'differ'}")
    assert ok


@pytest.mark.slow
def test_criterion_6_synthetic(acceptance_record):
    t0 = time.perf_counter()
    reps = 100_000
    noise = 1.95 / math.sqrt(reps)  # 0.1% KS critical distance for R draws
    devs = {}
    for n in (5, 11, 22, 45):
        pits = simulate_pit_series(reps, n, forecast_paths=999, rng=np.random.default_rng(60_000 + n))
        _, p = statistic_and_pvalue(pits, "ad")
        devs[n] = ecdf_deviation(p)
    null_ok = all(d <= 0.01 + noise for d in devs.values())

    power = {}
    for n in (45, 90):
        cal = [date(2000, 1, 3) + timedelta(days=30 * i) for i in range(n)]
        rejected = 0
        for r in range(1000):
            spec = ScenarioSpec(calendar=cal, horizons=(30,), seed=70_000 + 1000 * n + r,
                                forecast_paths=199, misspecification=3.0)
            s = bucket_nonoverlapping(generate(spec), 30)["SYNTH"]
            rejected += ad_pvalue(ad_statistic(s.pits), s.n) < 0.05
        power[n] = rejected / 1000
    power_ok = all(v >= 0.90 for v in power.values())
    elapsed = time.perf_counter() - t0
    ok = null_ok and power_ok and elapsed < 300
    dev_txt = ", ".join(f"n={n}: {d:.4f}" for n, d in devs.items())
    pow_txt = ", ".join(f"n={n}: {v:.3f}" for n, v in power.items())
    acceptance_record(6, ok, f"null ECDF deviation ({dev_txt}; bound {0.01 + noise:.4f}); "
                             f"power at misspecification 3 ({pow_txt}); {elapsed:.0f} s")
    assert ok


def test_criterion_7_oracles(mc_critical, acceptance_record):
    worst = 0.0
    where = None
    for name in ("ad", "ks", "cvm"):
        for n in ORACLE_SMALL_N + (ORACLE_LARGE_N,):
            for level in LEVELS:
                err = abs(float(PVALUE[name](mc_critical[(name, n, level)], n)) - level)
                if err > worst:
                    worst, where = err, (name, n, level)
    ok = worst <= 0.005
    acceptance_record(7, ok, f"36 oracle points, max |p - level| {worst:.4f} at {where}")
    assert ok


def _run_property(fn):
    try:
        settings(max_examples=300, deadline=None)(fn)()
    except Exception as exc:  # noqa: BLE001
        return f"{fn.__name__}: {type(exc).__name__}"
    return None


def test_criterion_8_invariants(acceptance_record):
    probs = st.floats(0.05, 0.99)
    widths = st.floats(0.005, 0.99)

    @given(probs, st.floats(0.001, 0.009), widths, st.floats(1.001, 1.01))
    def n0_monotone(p, dp, k, fk):
        base = full_credibility_poisson(CredibilityQuery(p, k)).raw
        assert full_credibility_poisson(CredibilityQuery(p + dp, k)).raw > base
        assert full_credibility_poisson(CredibilityQuery(p, min(1.0, k * fk))).raw < base

    @given(st.floats(0.01, 0.9999), widths)
    def uniform_is_third(p, k):
        q = CredibilityQuery(p, k)
        assert math.isclose(full_credibility_uniform(q).raw, full_credibility_poisson(q).raw / 3, rel_tol=1e-14)

    @given(st.integers(0, 3000), st.integers(1, 3000), st.floats(0, 5))
    def longley_cook_dominates(n, N, g):
        if n <= N and n + g * N > 0:
            assert longley_cook_credibility(n, N, g).value >= linear_credibility(n, N).value - 1e-15

    @given(st.floats(0, 1), st.integers(0, 3000), st.integers(1, 3000), st.floats(0, 5))
    def adjusted_and_clamped(p, n, N, g):
        for z in (linear_credibility(n, N), longley_cook_credibility(n, N, g) if n + g * N > 0 else None):
            if z is None:
                continue
            assert 0.0 <= z.value <= 1.0
            assert adjust_pvalue(p, z) <= p

    @given(st.sets(st.integers(0, 300), min_size=1, max_size=12), st.integers(1, 60))
    def bucketing(offsets, days):
        cal = sorted(date(2020, 1, 1) + timedelta(days=o) for o in offsets)
        s = bucket_nonoverlapping([PitObservation("RF", d, days, 0.5) for d in cal], days)["RF"]
        assert all((b - a).days >= days for a, b in zip(s.dates, s.dates[1:]))
        best = max(
            size for size in range(1, len(cal) + 1)
            for combo in itertools.combinations(cal, size)
            if all((b - a).days >= days for a, b in zip(combo, combo[1:]))
        )
        assert s.n == best

    failures = [f for f in map(_run_property, (n0_monotone, uniform_is_third, longley_cook_dominates,
                                               adjusted_and_clamped, bucketing)) if f]
    grid = np.round(np.arange(1, 10_000) / 10_000.0, 4)
    round_trip = max(abs(std_normal_cdf(std_normal_quantile(p)) - p) for p in grid)
    if round_trip > 1e-10:
        failures.append(f"normal round trip {round_trip:.2e}")
    ok = not failures
    detail = "n0 monotone, N = n0/3, LC >= linear, adjusted <= raw, clamp, bucketing, " \
             f"CDF/quantile round trip {round_trip:.1e}"
    acceptance_record(8, ok, detail if ok else "; ".join(failures))
    assert ok
