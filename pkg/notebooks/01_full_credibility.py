"""
Full-credibility standards
==========================

How many observations are needed before a sample mean sits within
``k`` of its expectation with probability ``P``.
"""

from credbt.credibility import (
    CredibilityQuery,
    coverage_probability_poisson,
    coverage_probability_uniform,
    full_credibility_poisson,
    full_credibility_uniform,
)
from credbt.report import TableRequest, render_table

# coverage of a 10% band after 100 observations
print(f"normal  : {coverage_probability_poisson(100, 0.10):.4f}")
print(f"uniform : {coverage_probability_uniform(100, 0.10):.4f}")

# standards for P = 90%, k = 10%
q = CredibilityQuery(0.90, 0.10)
print(full_credibility_poisson(q))
print(full_credibility_uniform(q))

# the uniform standard is a third of the normal one
for dist in ("normal", "uniform"):
    print(render_table(TableRequest("criterion", dist)).to_text())
