"""Outcome-equal projection.

Given a joint ``Pr(s, u, w)``, find the distribution ``Q`` closest to it in
``KL(Q, Pr)`` among those whose (outcome, protected) marginal factorizes as
``Pr(s) Pr(w)``. The minimizer rescales every (s, w) slice by a single factor::

    Q(s, u, w) = Pr(s, u, w) * Pr(s) / Pr(s | w)

so the conditional ``Pr(u | s, w)`` is left untouched. Structural zeros
(``Pr(s, w) = 0`` although ``Pr(s) Pr(w) > 0``) make the constraint
unsatisfiable; such inputs are rejected unless a scope splits the population
along the protected variables responsible for them.

:func:`brute_force_project` solves the same problem as a generic constrained
minimization and exists only to check the closed form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
import numpy as np

from .dist import S, W, JointDistribution, kl_divergence, marginal
from .errors import EmptyScopeCellSchema, Infeasible, InstanceTooLarge, SchemaError

DEFAULT_TOL = 1e-10
ORACLE_MAX_CELLS = 200


@dataclass(frozen=True)
class InfeasiblePair:
    outcome: str
    protected: tuple[str, ...]
    demanded: float
    actual: float = 0.0

    @property
    def protected_label(self) -> str:
        return "∧".join(self.protected)


@dataclass(frozen=True)
class FeasibilityReport:
    infeasible_pairs: tuple[InfeasiblePair, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.infeasible_pairs

    def render(self) -> str:
        if self.feasible:
            return "feasible: no structural zeros block the independence constraint"
        lines = ["infeasible: Pr(s, w) = 0 where Pr(s) Pr(w) > 0 for"]
        for p in self.infeasible_pairs:
            lines.append(
                f"  outcome={p.outcome}  protected={p.protected_label}  "
                f"demanded={p.demanded:.6g}  actual={p.actual:g}"
            )
        return "\n".join(lines)


@dataclass(frozen=True)
class ScopeSpec:
    """Protected variables whose cells are equalized separately."""

    scope_variables: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "scope_variables", tuple(self.scope_variables))

    def validate(self, schema) -> None:
        protected = [v.name for v in schema.protected]
        unknown = [n for n in self.scope_variables if n not in protected]
        if unknown:
            raise SchemaError(f"scope variables {unknown} are not protected variables")
        if len(set(self.scope_variables)) == len(protected):
            raise EmptyScopeCellSchema("scope exempts every protected variable")


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    max_violation: float
    tol: float
    # (s, w) index of the worst residual
    worst_cell: tuple[int, int]


# -- array-level core ---------------------------------------------------------


def _blocked(mass: np.ndarray) -> np.ndarray:
    """Boolean (S, W) mask of pairs with Pr(s, w) = 0 but Pr(s) Pr(w) > 0."""
    sw = mass.sum(axis=1)
    demanded = np.outer(sw.sum(axis=1), sw.sum(axis=0))
    return (sw <= 0) & (demanded > 0)


def _equalize_array(mass: np.ndarray) -> np.ndarray:
    sw = mass.sum(axis=1)
    demanded = np.outer(sw.sum(axis=1), sw.sum(axis=0))
    positive = sw > 0
    scale = np.zeros_like(sw)
    scale[positive] = demanded[positive] / sw[positive]
    return mass * scale[:, None, :]


def _residual(mass: np.ndarray) -> np.ndarray:
    sw = mass.sum(axis=1)
    return np.abs(sw - np.outer(sw.sum(axis=1), sw.sum(axis=0)))


def _scope_split(schema, scope: ScopeSpec):
    """Index helpers for splitting the W axis into (scope cell, remainder).

    Returns ``(scope_dims, rest_dims, perm)`` where ``perm`` reorders the
    protected dimensions so scope variables come first.
    """
    names = [v.name for v in schema.protected]
    dims = schema.protected_dims
    scope_pos = [i for i, n in enumerate(names) if n in scope.scope_variables]
    rest_pos = [i for i, n in enumerate(names) if n not in scope.scope_variables]
    return (
        tuple(dims[i] for i in scope_pos),
        tuple(dims[i] for i in rest_pos),
        scope_pos + rest_pos,
    )


def _to_scoped(mass: np.ndarray, schema, scope: ScopeSpec) -> np.ndarray:
    """Reshape (S, U, W) into (G, S, U, W_rest) for G scope cells."""
    scope_dims, rest_dims, perm = _scope_split(schema, scope)
    n_s, n_u, _ = mass.shape
    full = mass.reshape((n_s, n_u) + schema.protected_dims)
    full = np.transpose(full, (0, 1) + tuple(2 + p for p in perm))
    g = int(np.prod(scope_dims, dtype=int))
    r = int(np.prod(rest_dims, dtype=int))
    full = full.reshape(n_s, n_u, g, r)
    return np.transpose(full, (2, 0, 1, 3))


def _from_scoped(scoped: np.ndarray, schema, scope: ScopeSpec) -> np.ndarray:
    scope_dims, rest_dims, perm = _scope_split(schema, scope)
    n_s, n_u = scoped.shape[1], scoped.shape[2]
    full = np.transpose(scoped, (1, 2, 0, 3)).reshape((n_s, n_u) + scope_dims + rest_dims)
    inverse = np.argsort(perm)
    full = np.transpose(full, (0, 1) + tuple(2 + p for p in inverse))
    return full.reshape(n_s, n_u, -1)


def _scope_labels(schema, scope: ScopeSpec):
    names = [v.name for v in schema.protected]
    levels = [v.levels for v in schema.protected]
    scope_pos = [i for i, n in enumerate(names) if n in scope.scope_variables]
    rest_pos = [i for i, n in enumerate(names) if n not in scope.scope_variables]
    g_labels = list(itertools.product(*(levels[i] for i in scope_pos)))
    r_labels = list(itertools.product(*(levels[i] for i in rest_pos)))

    def full_label(g, r):
        out = [None] * len(names)
        for i, lv in zip(scope_pos, g_labels[g]):
            out[i] = lv
        for i, lv in zip(rest_pos, r_labels[r]):
            out[i] = lv
        return tuple(out)

    return g_labels, r_labels, full_label


# -- public operations --------------------------------------------------------


def feasibility_check(
    dist: JointDistribution, scope: ScopeSpec | None = None
) -> FeasibilityReport:
    """List the (s, w) pairs whose demanded mass ``Pr(s) Pr(w)`` cannot be placed.

    With a scope, the check runs inside every scope cell against that cell's
    own marginals; demanded masses are reported on the joint scale.
    """
    schema = dist.schema
    s_levels = schema.outcome.levels
    pairs = []
    if scope is None or not scope.scope_variables:
        w_labels = schema.axis_labels(W)
        sw = marginal(dist, (S, W))
        demanded = np.outer(sw.sum(axis=1), sw.sum(axis=0))
        for s, w in zip(*np.nonzero(_blocked(dist.mass))):
            pairs.append(InfeasiblePair(s_levels[s], w_labels[w], float(demanded[s, w])))
        return FeasibilityReport(tuple(pairs))

    scope.validate(schema)
    scoped = _to_scoped(dist.mass, schema, scope)
    _, _, full_label = _scope_labels(schema, scope)
    for g, block in enumerate(scoped):
        pg = block.sum()
        if pg <= 0:
            continue
        sw = block.sum(axis=1)
        demanded = np.outer(sw.sum(axis=1), sw.sum(axis=0)) / pg
        for s, r in zip(*np.nonzero(_blocked(block))):
            pairs.append(InfeasiblePair(s_levels[s], full_label(g, r), float(demanded[s, r])))
    return FeasibilityReport(tuple(pairs))


def outcome_equalize(
    dist: JointDistribution, scope: ScopeSpec | None = None
) -> JointDistribution:
    """KL-closest joint in which the outcome is independent of the protected axis.

    Without a scope the whole protected axis is decorrelated. With a scope,
    each cell of the scope variables (e.g. each sex) is treated as its own
    population: its conditional joint is equalized over the remaining
    protected variables and re-weighted by the cell's original mass.

    Raises :class:`Infeasible` if structural zeros block the constraint.
    """
    report = feasibility_check(dist, scope)
    if not report.feasible:
        raise Infeasible(report)
    schema = dist.schema
    if scope is None or not scope.scope_variables:
        out = _equalize_array(dist.mass)
    else:
        scoped = _to_scoped(dist.mass, schema, scope)
        result = np.zeros_like(scoped)
        for g, block in enumerate(scoped):
            pg = block.sum()
            if pg > 0:
                result[g] = _equalize_array(block / pg) * pg
        out = _from_scoped(result, schema, scope)
    # fold rounding drift back in; the algebra already sums to 1
    return JointDistribution(schema, out / out.sum())


def verify_insensitivity(dist: JointDistribution, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Largest ``|sum_u Pr(s,u,w) - Pr(s) Pr(w)|`` over (s, w), against ``tol``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    res = _residual(dist.mass)
    worst = np.unravel_index(int(np.argmax(res)), res.shape)
    max_violation = float(res[worst])
    return VerificationReport(max_violation <= tol, max_violation, tol, tuple(int(i) for i in worst))


def verify_scoped(
    dist: JointDistribution, scope: ScopeSpec, tol: float = DEFAULT_TOL
) -> dict[tuple[str, ...], VerificationReport]:
    """Run :func:`verify_insensitivity` on the conditional of every positive-mass scope cell.

    Keys are the scope cells' level tuples.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    scope.validate(dist.schema)
    scoped = _to_scoped(dist.mass, dist.schema, scope)
    g_labels, _, _ = _scope_labels(dist.schema, scope)
    out = {}
    for g, block in enumerate(scoped):
        pg = block.sum()
        if pg <= 0:
            continue
        res = _residual(block / pg)
        worst = np.unravel_index(int(np.argmax(res)), res.shape)
        v = float(res[worst])
        out[g_labels[g]] = VerificationReport(v <= tol, v, tol, tuple(int(i) for i in worst))
    return out


def scope_cell_masses(dist: JointDistribution, scope: ScopeSpec) -> dict[tuple[str, ...], float]:
    scope.validate(dist.schema)
    scoped = _to_scoped(dist.mass, dist.schema, scope)
    g_labels, _, _ = _scope_labels(dist.schema, scope)
    return {g_labels[g]: float(block.sum()) for g, block in enumerate(scoped)}


def information_cost(original: JointDistribution, equalized: JointDistribution) -> float:
    """``KL(equalized, original)``: the corrected joint goes first."""
    return kl_divergence(equalized, original)


# -- brute-force oracle -------------------------------------------------------


def _cell_objective(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Sum over the last axis of ``q ln(q/p)``, with 0 ln 0 = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, q * np.log(q / p), 0.0)
    return terms.sum(axis=-1)


def _pair_minimize(qi, qj, pi, pj, active, steps=80):
    """Exactly minimize ``f(x) + f(t - x)`` on ``[0, t]`` for each lane, by bisection
    on the derivative ``ln(x/pi) - ln((t-x)/pj)``.

    ``f(x) = x ln(x / p)``; lanes where ``active`` is False are returned unchanged.
    """
    t = qi + qj
    lo = np.zeros_like(t)
    hi = t.copy()
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            grad = np.log(mid / pi) - np.log((t - mid) / pj)
        go_up = grad < 0
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    x = 0.5 * (lo + hi)
    x = np.where(active & (t > 0), x, qi)
    return x, t - x


def brute_force_project(
    dist: JointDistribution,
    iterations: int = 200,
    samples: int = 256,
    seed: int = 0,
) -> JointDistribution:
    """Numerically minimize ``KL(Q, Pr)`` over the feasible polytope.

    Every (s, w) slice of ``Q`` is a vector over U that must sum to
    ``Pr(s) Pr(w)``. Each slice starts at the best of ``samples`` Dirichlet
    draws scaled to that mass, then gets ``iterations`` sweeps of pairwise
    coordinate descent: for each pair of U-coordinates, mass is moved between
    them to minimize the objective with everything else held fixed, which keeps
    the iterate on the scaled simplex. Cells where ``Pr`` is zero stay zero.

    Deterministic for a given seed. Meant for desk-scale verification only.
    """
    report = feasibility_check(dist)
    if not report.feasible:
        raise Infeasible(report)
    n_s, n_u, n_w = dist.shape
    if n_s * n_u * n_w > ORACLE_MAX_CELLS:
        raise InstanceTooLarge(f"{n_s * n_u * n_w} cells exceeds {ORACLE_MAX_CELLS}")
    rng = np.random.default_rng(seed)

    # lanes: one per (s, w) pair, vectors over u
    p = np.transpose(dist.mass, (0, 2, 1)).reshape(n_s * n_w, n_u)
    sw = marginal(dist, (S, W))
    target = np.outer(sw.sum(axis=1), sw.sum(axis=0)).reshape(-1)
    support = p > 0
    p_safe = np.where(support, p, 1.0)

    draws = rng.dirichlet(np.ones(n_u), size=(samples, n_s * n_w))
    draws = np.where(support, draws, 0.0)
    norms = draws.sum(axis=-1, keepdims=True)
    # lanes with empty support have zero target mass, so zeros are right there
    draws = draws / np.where(norms > 0, norms, 1.0)
    draws *= target[None, :, None]
    scores = _cell_objective(draws, p_safe[None])
    best = np.argmin(scores, axis=0)
    q = draws[best, np.arange(n_s * n_w)]

    pairs = list(itertools.combinations(range(n_u), 2))
    for _ in range(iterations):
        before = q.copy()
        for i, j in pairs:
            active = support[:, i] & support[:, j]
            q[:, i], q[:, j] = _pair_minimize(q[:, i], q[:, j], p_safe[:, i], p_safe[:, j], active)
        if np.array_equal(before, q):
            break

    mass = np.transpose(q.reshape(n_s, n_w, n_u), (0, 2, 1))
    return JointDistribution(dist.schema, mass / mass.sum())


def feasible_samples(
    dist: JointDistribution, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Random points of the feasible polytope, as a ``(count, S, U, W)`` array.

    Each (s, w) slice is a Dirichlet draw over the support of ``Pr(., ., w)``
    at s, scaled to ``Pr(s) Pr(w)``, so every sample has finite cost.
    """
    n_s, n_u, n_w = dist.shape
    p = np.transpose(dist.mass, (0, 2, 1))
    support = p > 0
    sw = marginal(dist, (S, W))
    target = np.outer(sw.sum(axis=1), sw.sum(axis=0))
    draws = rng.dirichlet(np.ones(n_u), size=(count, n_s, n_w))
    draws = np.where(support, draws, 0.0)
    norms = draws.sum(axis=-1, keepdims=True)
    draws = draws / np.where(norms > 0, norms, 1.0)
    draws *= target[None, :, :, None]
    return np.transpose(draws, (0, 1, 3, 2))


def sample_costs(dist: JointDistribution, samples: np.ndarray) -> np.ndarray:
    """``KL(sample, dist)`` for each sample along the leading axis."""
    flat = samples.reshape(samples.shape[0], -1)
    p = dist.mass.reshape(-1)
    return _cell_objective(flat, np.where(p > 0, p, 1.0)[None])


def max_cell_difference(a: JointDistribution, b: JointDistribution) -> float:
    return float(np.max(np.abs(a.mass - b.mass)))
