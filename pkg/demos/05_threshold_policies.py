"""
What equalization does and does not promise about decisions
============================================================

The equalized joint has outcome independent of group. A deterministic rule
that thresholds its scores ``Pr(target | u, w)`` can still allocate at
different rates across groups, because thresholding is not linear. The audit
reports that disparity as measured rather than assuming it away.
"""

import numpy as np

from outcome_equal import JointDistribution, VariableSchema, audit, outcome_equalize
from outcome_equal.audit import ThresholdPolicy, allocation_rates

rng = np.random.default_rng(42)
schema = VariableSchema.build(("admit", ["yes", "no"]), [("group", ["a", "b"])], [("test", ["low", "mid", "high"])])
d = JointDistribution(schema, rng.dirichlet(np.ones(12)).reshape(2, 3, 2))
eq = outcome_equalize(d)

print(f"{'tau':>5} {'orig a':>8} {'orig b':>8} {'eq a':>8} {'eq b':>8}")
for tau in np.linspace(0.0, 1.0, 11):
    policy = ThresholdPolicy("yes", float(tau))
    before = allocation_rates(d, policy).rates
    after = allocation_rates(eq, policy, population=d).rates
    print(f"{tau:5.1f} {before['a']:8.3f} {before['b']:8.3f} {after['a']:8.3f} {after['b']:8.3f}")

print()
print(audit(d, eq, ThresholdPolicy("yes", 0.5)).to_table())
