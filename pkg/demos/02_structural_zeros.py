"""
Structural zeros: prenatal care
===============================

Men never receive prenatal care. Asking for care to be independent of sex is
asking for the impossible, so the projection refuses. Scoping by sex treats
women and men as separate populations and removes only the race correlation
inside each.
"""

from outcome_equal import ScopeSpec, feasibility_check, outcome_equalize, verify_scoped
from outcome_equal.errors import Infeasible
from outcome_equal.fixtures import prenatal

d = prenatal()
print(feasibility_check(d).render())

try:
    outcome_equalize(d)
except Infeasible as exc:
    print("\nunscoped equalization refused:", len(exc.report.infeasible_pairs), "blocked pairs")

# %%
sex = ScopeSpec(("sex",))
print("\nbefore, within each sex:")
for cell, rep in verify_scoped(d, sex).items():
    print(f"  {cell[0]:<7} max violation {rep.max_violation:.4f}")

eq = outcome_equalize(d, sex)
print("after --scope sex:")
for cell, rep in verify_scoped(eq, sex).items():
    print(f"  {cell[0]:<7} max violation {rep.max_violation:.1e}  passed={rep.passed}")

# %%
# Men's rows have a single outcome already, so nothing about them moves.
men = [i for i, lab in enumerate(d.schema.axis_labels("W")) if lab[0] == "male"]
print("\nlargest change in men's cells:", abs(eq.mass[:, :, men] - d.mass[:, :, men]).max())
