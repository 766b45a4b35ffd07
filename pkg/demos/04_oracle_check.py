"""
Checking the closed form against brute force
============================================

The brute-force projector never uses the closed form: it starts each
(outcome, group) slice at the best of many random points on the feasible
simplex and improves it by moving mass between pairs of cells. If the two
agree, the closed form is the optimum. Random feasible points give a second,
cruder check: none of them should cost less.
"""

import numpy as np

from outcome_equal import JointDistribution, VariableSchema, brute_force_project, information_cost, outcome_equalize
from outcome_equal.projection import feasible_samples, max_cell_difference, sample_costs

rng = np.random.default_rng(0)
schema = VariableSchema.build(
    ("risk", ["low", "mid", "high"]), [("group", ["g1", "g2", "g3"])], [("score", ["s1", "s2", "s3"])]
)

for trial in range(5):
    d = JointDistribution(schema, rng.dirichlet(np.ones(27)).reshape(3, 3, 3))
    eq = outcome_equalize(d)
    bf = brute_force_project(d, iterations=200, samples=256, seed=trial)
    costs = sample_costs(d, feasible_samples(d, 10_000, rng))
    print(
        f"trial {trial}: closed form {information_cost(d, eq):.6f} nats, "
        f"brute force {information_cost(d, bf):.6f}, best of 10k random {costs.min():.6f}, "
        f"max cell diff {max_cell_difference(eq, bf):.1e}"
    )
