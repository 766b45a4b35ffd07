"""Finite discrete joint distributions over (outcome, unprotected, protected).

Every joint is stored as a dense ``|S| x |U| x |W|`` array where ``S`` indexes
outcome levels, ``U`` the row-major product of all unprotected variables' levels
(size 1 when there are none) and ``W`` the row-major product of all protected
variables' levels. Logarithms are natural throughout, so every information
quantity is in nats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadAssignment,
    DuplicateCell,
    EmptyKeepSet,
    InfiniteDivergence,
    NegativeMass,
    NotNormalized,
    OverlappingAxes,
    SameAxis,
    SchemaError,
    SchemaMismatch,
)

OUTCOME = "outcome"
UNPROTECTED = "unprotected"
PROTECTED = "protected"
ROLES = (OUTCOME, UNPROTECTED, PROTECTED)

S, U, W = "S", "U", "W"
AXES = (S, U, W)

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class Variable:
    name: str
    role: str
    levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(str(lv) for lv in self.levels))
        if self.role not in ROLES:
            raise SchemaError(f"variable {self.name!r}: unknown role {self.role!r}")
        if not self.levels:
            raise SchemaError(f"variable {self.name!r} has no levels")
        if len(set(self.levels)) != len(self.levels):
            raise SchemaError(f"variable {self.name!r} has duplicate levels")


@dataclass(frozen=True)
class VariableSchema:
    """Ordered variables with roles; derives the flattened S, U, W axes."""

    variables: tuple[Variable, ...]

    def __post_init__(self):
        variables = tuple(
            v if isinstance(v, Variable) else Variable(*v) for v in self.variables
        )
        object.__setattr__(self, "variables", variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise SchemaError("variable names must be unique")
        roles = [v.role for v in variables]
        if roles.count(OUTCOME) != 1:
            raise SchemaError("schema needs exactly one outcome variable")
        if roles.count(PROTECTED) < 1:
            raise SchemaError("schema needs at least one protected variable")

    @classmethod
    def build(cls, outcome, protected, unprotected=()):
        """Shorthand: each argument is ``(name, levels)`` or a list of them."""
        return cls(
            (Variable(outcome[0], OUTCOME, outcome[1]),)
            + tuple(Variable(n, UNPROTECTED, lv) for n, lv in unprotected)
            + tuple(Variable(n, PROTECTED, lv) for n, lv in protected)
        )

    def by_role(self, role: str) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if v.role == role)

    @property
    def outcome(self) -> Variable:
        return self.by_role(OUTCOME)[0]

    @property
    def unprotected(self) -> tuple[Variable, ...]:
        return self.by_role(UNPROTECTED)

    @property
    def protected(self) -> tuple[Variable, ...]:
        return self.by_role(PROTECTED)

    @property
    def protected_dims(self) -> tuple[int, ...]:
        return tuple(len(v.levels) for v in self.protected)

    @property
    def unprotected_dims(self) -> tuple[int, ...]:
        return tuple(len(v.levels) for v in self.unprotected)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (
            len(self.outcome.levels),
            int(np.prod(self.unprotected_dims, dtype=int)),
            int(np.prod(self.protected_dims, dtype=int)),
        )

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def axis_labels(self, axis: str) -> list[tuple[str, ...]]:
        """Level-label tuples for each flattened index along ``axis``."""
        group = {S: (self.outcome,), U: self.unprotected, W: self.protected}[axis]
        return list(itertools.product(*(v.levels for v in group)))

    def cell_index(self, assignment: Sequence[int]) -> tuple[int, int, int]:
        """Map one level index per schema variable to flat ``(s, u, w)``."""
        if len(assignment) != len(self.variables):
            raise BadAssignment(
                f"assignment has {len(assignment)} entries, schema has "
                f"{len(self.variables)} variables"
            )
        by_role: dict[str, list[int]] = {r: [] for r in ROLES}
        for var, idx in zip(self.variables, assignment):
            if not (0 <= int(idx) < len(var.levels)) or int(idx) != idx:
                raise BadAssignment(f"level index {idx!r} invalid for {var.name!r}")
            by_role[var.role].append(int(idx))
        u = int(np.ravel_multi_index(by_role[UNPROTECTED], self.unprotected_dims)) if by_role[UNPROTECTED] else 0
        w = int(np.ravel_multi_index(by_role[PROTECTED], self.protected_dims))
        return by_role[OUTCOME][0], u, w

    def to_dict(self) -> dict:
        return {
            "variables": [
                {"name": v.name, "role": v.role, "levels": list(v.levels)}
                for v in self.variables
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VariableSchema":
        try:
            return cls(
                tuple(Variable(d["name"], d["role"], tuple(d["levels"])) for d in data["variables"])
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed schema: {exc}") from exc


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Normalized probability tensor of shape ``schema.shape``.

    The mass array is copied and made read-only on construction.
    """

    schema: VariableSchema
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        if mass.shape != self.schema.shape:
            raise SchemaMismatch(f"mass has shape {mass.shape}, schema implies {self.schema.shape}")
        if not np.all(np.isfinite(mass)):
            raise NotNormalized("mass contains non-finite entries")
        if np.any(mass < 0):
            raise NegativeMass(f"minimum entry {mass.min()!r} is negative")
        total = mass.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"entries sum to {total!r}")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.mass.shape

    def __repr__(self):
        return f"JointDistribution(shape={self.shape}, schema={[v.name for v in self.schema.variables]})"


def from_table(
    schema: VariableSchema, entries: Iterable[tuple[Sequence[int], float]]
) -> JointDistribution:
    """Build a joint from ``(assignment, probability)`` pairs; unlisted cells are 0."""
    mass = np.zeros(schema.shape)
    seen = set()
    for assignment, p in entries:
        cell = schema.cell_index(assignment)
        if cell in seen:
            raise DuplicateCell(f"cell {tuple(assignment)} listed twice")
        seen.add(cell)
        mass[cell] = p
    return JointDistribution(schema, mass)


def _axes_tuple(axes) -> tuple[str, ...]:
    if isinstance(axes, str):
        axes = (axes,)
    axes = tuple(axes)
    for a in axes:
        if a not in AXES:
            raise ValueError(f"unknown axis {a!r}; expected one of {AXES}")
    # canonical S, U, W order regardless of how the caller listed them
    return tuple(a for a in AXES if a in axes)


def marginal(dist: JointDistribution, keep) -> np.ndarray:
    """Sum out every axis not in ``keep``; kept axes stay in S, U, W order."""
    keep = _axes_tuple(keep)
    if not keep:
        raise EmptyKeepSet("keep must name at least one axis")
    drop = tuple(i for i, a in enumerate(AXES) if a not in keep)
    return dist.mass.sum(axis=drop)


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """``Pr(target | given)``.

    ``values`` has the target axes first, then the given axes (each group in
    S, U, W order). Columns whose given-cell has zero mass are NaN and flagged
    ``False`` in ``defined``.
    """

    target: tuple[str, ...]
    given: tuple[str, ...]
    values: np.ndarray
    defined: np.ndarray


def conditional(dist: JointDistribution, target, given) -> ConditionalTable:
    target = _axes_tuple(target)
    given = _axes_tuple(given)
    if not target or not given:
        raise EmptyKeepSet("target and given must both be nonempty")
    if set(target) & set(given):
        raise OverlappingAxes(f"{target} and {given} overlap")
    joint = marginal(dist, target + given)
    kept = _axes_tuple(target + given)
    order = [kept.index(a) for a in target + given]
    joint = np.transpose(joint, order)
    n_t = len(target)
    denom = joint.sum(axis=tuple(range(n_t)))
    defined = denom > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(defined, joint / np.where(defined, denom, 1.0), np.nan)
    return ConditionalTable(target, given, values, defined)


def _xlogy_ratio(p: np.ndarray, q: np.ndarray) -> float:
    support = p > 0
    if np.any(q[support] <= 0):
        raise InfiniteDivergence("support of p is not contained in support of q")
    ps, qs = p[support], q[support]
    return float(np.sum(ps * np.log(ps / qs)))


def kl_array(p: np.ndarray, q: np.ndarray) -> float:
    """KL divergence between two same-shaped probability arrays, in nats."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise SchemaMismatch(f"shapes {p.shape} and {q.shape} differ")
    # clamp tiny negative rounding to zero; true negatives can't reach here
    return max(_xlogy_ratio(p, q), 0.0)


def kl_divergence(p: JointDistribution, q: JointDistribution) -> float:
    """``sum_y p(y) ln(p(y)/q(y))`` with ``0 ln(0/q) = 0``."""
    if p.schema != q.schema:
        raise SchemaMismatch("distributions have different schemas")
    return kl_array(p.mass, q.mass)


def mutual_information(dist: JointDistribution, x: str, y: str) -> float:
    """I(x; y) in nats, as KL of the pair marginal against its product."""
    if x == y:
        raise SameAxis(f"cannot take mutual information of {x!r} with itself")
    pair = marginal(dist, (x, y))
    product = np.outer(pair.sum(axis=1), pair.sum(axis=0))
    return kl_array(pair, product)
