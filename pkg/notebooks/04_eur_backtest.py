"""
Credibility-adjusted backtest of the EUR rate fixture
=====================================================

Raw Anderson-Darling p-values per risk factor and horizon are shrunk by the
credibility of their sample size before the 1% decision.
"""

from credbt.backtest import BacktestConfig, Decision, load_eur_fixture, run_portfolio
from credbt.credibility import WeightMethod
from credbt.report import verdict_matrix

rows = load_eur_fixture()
print(f"{len(rows)} fixture rows")

for method in (WeightMethod.LINEAR, WeightMethod.LONGLEY_COOK):
    cfg = BacktestConfig(coverage=0.90, half_width=0.10, method=method, threshold=0.01)
    verdicts = run_portfolio(rows, cfg)
    print(verdict_matrix(verdicts, title=f"Adjusted p-values ({method.value})").to_text())
    rejected = [(v.risk_factor, v.horizon) for v in verdicts if v.decision is Decision.REJECT]
    print(f"{len(rejected)} rejections")
