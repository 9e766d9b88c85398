"""
Partial-credibility weights
===========================

Linear and Longley-Cook weights for the sample sizes that non-overlapping
horizons leave in a monthly backtest.
"""

import numpy as np

from credbt.credibility import CredibilityQuery, full_credibility_uniform, linear_credibility, longley_cook_credibility
from credbt.credibility import WeightMethod
from credbt.report import TableRequest, render_table

N = full_credibility_uniform(CredibilityQuery(0.90, 0.10)).rounded
print(f"N = {N}")

for n in (136, 45, 22, 11, 6, 5):
    lin = linear_credibility(n, N).value
    lc = longley_cook_credibility(n, N, 0.30).value
    print(f"n={n:4d}  linear {lin:6.1%}  longley-cook {lc:6.1%}")

# Longley-Cook always sits above the linear rule, the gap closes at n = 0 and n = N
n = np.arange(0, N + 1)
gap = np.array([longley_cook_credibility(int(i), N, 0.30).value - linear_credibility(int(i), N).value for i in n])
print(f"largest gap {gap.max():.3f} at n = {n[gap.argmax()]}")

print(render_table(TableRequest("weights", n=22, method=WeightMethod.LONGLEY_COOK)).to_text())
