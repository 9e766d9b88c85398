"""Credibility-weighted uniformity backtesting of risk-model forecasts."""

from credbt.backtest import (
    BacktestConfig,
    BacktestVerdict,
    Decision,
    FixtureRow,
    HorizonSeries,
    PitObservation,
    bucket_nonoverlapping,
    load_eur_fixture,
    pit_transform,
    run_backtest,
    run_portfolio,
)
from credbt.credibility import (
    CredibilityQuery,
    CredibilityWeight,
    FullCredibilityCriterion,
    WeightMethod,
    adjust_pvalue,
    coverage_probability_poisson,
    coverage_probability_uniform,
    full_credibility_general,
    full_credibility_poisson,
    full_credibility_uniform,
    linear_credibility,
    longley_cook_credibility,
    y_for_coverage,
)
from credbt.statdist import DistributionMoments, std_normal_cdf, std_normal_quantile, uniform01_moments
from credbt.uniformity import (
    Sample01,
    TestKind,
    TestOutcome,
    ad_pvalue,
    ad_statistic,
    cvm_pvalue,
    cvm_statistic,
    ks_pvalue,
    ks_statistic,
    uniformity_test,
)

__version__ = "0.1.0"

__all__ = [
    "BacktestConfig",
    "BacktestVerdict",
    "CredibilityQuery",
    "CredibilityWeight",
    "Decision",
    "DistributionMoments",
    "FixtureRow",
    "FullCredibilityCriterion",
    "HorizonSeries",
    "PitObservation",
    "Sample01",
    "TestKind",
    "TestOutcome",
    "WeightMethod",
    "ad_pvalue",
    "ad_statistic",
    "adjust_pvalue",
    "bucket_nonoverlapping",
    "coverage_probability_poisson",
    "coverage_probability_uniform",
    "cvm_pvalue",
    "cvm_statistic",
    "full_credibility_general",
    "full_credibility_poisson",
    "full_credibility_uniform",
    "ks_pvalue",
    "ks_statistic",
    "linear_credibility",
    "load_eur_fixture",
    "longley_cook_credibility",
    "pit_transform",
    "run_backtest",
    "run_portfolio",
    "std_normal_cdf",
    "std_normal_quantile",
    "uniform01_moments",
    "uniformity_test",
    "y_for_coverage",
]
