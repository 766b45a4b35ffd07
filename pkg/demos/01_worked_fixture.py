"""
Equalizing a two-group table by hand and by library
===================================================

A binary outcome ``y`` and a binary protected group ``a``/``b``, nothing else.
Group ``a`` gets ``y = 1`` 80% of the time, group ``b`` only 40%.
"""

import math

import numpy as np

from outcome_equal import S, W, information_cost, marginal, mutual_information, outcome_equalize, verify_insensitivity
from outcome_equal.fixtures import two_by_two

d = two_by_two()
print("original Pr(y, group), rows y=0,1 / cols a,b:")
print(d.mass[:, 0, :])

# %%
# Knowing the outcome tells you something about the group:
print(f"I(y; group) = {mutual_information(d, S, W):.6f} nats")
print(f"largest |Pr(y, g) - Pr(y) Pr(g)| = {verify_insensitivity(d).max_violation:.3f}")

# %%
# With no unprotected variable the only way to decouple outcome from group is
# to replace the table with the product of its marginals, and that is exactly
# what the projection returns.
eq = outcome_equalize(d)
print("equalized:")
print(eq.mass[:, 0, :])
print("product of marginals:")
print(np.outer(marginal(d, S), marginal(d, W)))

# %%
# The price, in nats, is KL(equalized || original). Spelled out cell by cell:
by_hand = 0.3 * math.log(0.3 / 0.4) + 0.2 * math.log(0.2 / 0.1) + 0.3 * math.log(0.3 / 0.2) + 0.2 * math.log(0.2 / 0.3)
print(f"information cost {information_cost(d, eq):.7f} nats (by hand {by_hand:.7f})")
print(f"I(y; group) after = {mutual_information(eq, S, W):.2e}")
