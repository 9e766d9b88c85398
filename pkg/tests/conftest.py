import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from credbt.uniformity import ad_statistic, cvm_statistic, ks_statistic  # noqa: E402

ORACLE_SMALL_N = (5, 11, 22)
ORACLE_SMALL_REPS = 100_000
ORACLE_LARGE_N = 200
ORACLE_LARGE_REPS = 1_000_000
LEVELS = (0.10, 0.05, 0.01)


def _null_statistics(n: int, reps: int, seed: int, chunk: int = 50_000) -> dict[str, np.ndarray]:
    """Null distribution of the three statistics from sorted U(0,1) samples.

    Written from the textbook definitions (not the package functions) so the
    oracle stays independent of the code under test.
    """
    rng = np.random.default_rng(seed)
    out = {"ad": [], "ks": [], "cvm": []}
    i = np.arange(1, n + 1)
    w = 2 * i - 1
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        u = np.sort(rng.random((m, n)), axis=1)
        logs = np.log(u) + np.log(1.0 - u[:, ::-1])
        out["ad"].append(-n - (w * logs).sum(axis=1) / n)
        out["ks"].append(np.maximum((i / n - u).max(axis=1), (u - (i - 1) / n).max(axis=1)))
        out["cvm"].append(1.0 / (12 * n) + ((u - w / (2.0 * n)) ** 2).sum(axis=1))
        done += m
    return {k: np.concatenate(v) for k, v in out.items()}


@pytest.fixture(scope="session")
def mc_null():
    """Seeded Monte-Carlo null statistics keyed by sample size."""
    table = {n: _null_statistics(n, ORACLE_SMALL_REPS, seed=1000 + n) for n in ORACLE_SMALL_N}
    table[ORACLE_LARGE_N] = _null_statistics(ORACLE_LARGE_N, ORACLE_LARGE_REPS, seed=2024)
    return table


@pytest.fixture(scope="session")
def mc_critical(mc_null):
    """Upper-tail critical values ``{(test, n, level): statistic}``."""
    return {
        (test, n, level): float(np.quantile(stats, 1.0 - level))
        for n, by_test in mc_null.items()
        for test, stats in by_test.items()
        for level in LEVELS
    }


STATISTIC = {"ad": ad_statistic, "ks": ks_statistic, "cvm": cvm_statistic}


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_record():
    """Call with (number, ok, detail); the line is echoed in the run summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
