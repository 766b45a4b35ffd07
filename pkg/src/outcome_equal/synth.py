"""Synthetic populations drawn from a protected -> unprotected -> outcome chain.

Tables are indexed on the flattened axes of the schema:

* ``p_w[w]``               protected-cell prior, length ``|W|``
* ``p_u_given_w[w][u]``    ``|W| x |U|``
* ``p_s_given_uw[u][w][s]`` ``|U| x |W| x |S|``

Sampling uses numpy's PCG64 bit generator seeded with ``seed``
(``numpy.random.default_rng``) and draws every variable by inverse-CDF lookup
on one uniform stream, in the order: all ``w``, then all ``u``, then all ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist import JointDistribution, VariableSchema
from .errors import InvalidTable
from .estimation import Dataset

ROW_TOL = 1e-9


def _check_rows(name, table, shape):
    if table.shape != shape:
        raise InvalidTable(f"{name} has shape {table.shape}, expected {shape}")
    if not np.all(np.isfinite(table)) or np.any(table < 0):
        raise InvalidTable(f"{name} has negative or non-finite entries")
    sums = table.reshape(-1, table.shape[-1]).sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOL)
    if bad.size:
        row = np.unravel_index(bad[0], table.shape[:-1]) if table.ndim > 1 else ()
        raise InvalidTable(f"{name} row {tuple(int(i) for i in row)} sums to {sums[bad[0]]!r}")


@dataclass(frozen=True, eq=False)
class SynthConfig:
    schema: VariableSchema
    p_w: np.ndarray = field(repr=False)
    p_u_given_w: np.ndarray = field(repr=False)
    p_s_given_uw: np.ndarray = field(repr=False)
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        n_s, n_u, n_w = self.schema.shape
        for name, shape in (
            ("p_w", (n_w,)),
            ("p_u_given_w", (n_w, n_u)),
            ("p_s_given_uw", (n_u, n_w, n_s)),
        ):
            try:
                arr = np.array(getattr(self, name), dtype=float)
            except (TypeError, ValueError) as exc:
                raise InvalidTable(f"{name}: {exc}") from exc
            _check_rows(name, arr, shape)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if int(self.n) != self.n or self.n < 1:
            raise InvalidTable(f"sample count must be a positive integer, got {self.n!r}")

    def with_overrides(self, n=None, seed=None) -> "SynthConfig":
        return SynthConfig(
            self.schema,
            self.p_w,
            self.p_u_given_w,
            self.p_s_given_uw,
            self.n if n is None else n,
            self.seed if seed is None else seed,
        )


def ground_truth_joint(config: SynthConfig) -> JointDistribution:
    """``Pr(s, u, w) = Pr(w) Pr(u | w) Pr(s | u, w)``."""
    mass = np.einsum("w,wu,uws->suw", config.p_w, config.p_u_given_w, config.p_s_given_uw)
    return JointDistribution(config.schema, mass)


def _inverse_cdf(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Row-wise categorical draw: ``probs`` is (n, k), one uniform per row."""
    cdf = np.cumsum(probs, axis=1)
    idx = (uniforms[:, None] >= cdf).sum(axis=1)
    # float slack at the top of the cdf
    return np.minimum(idx, probs.shape[1] - 1)


def sample(config: SynthConfig) -> Dataset:
    rng = np.random.default_rng(config.seed)
    n = int(config.n)
    schema = config.schema
    w = _inverse_cdf(np.broadcast_to(config.p_w, (n, len(config.p_w))), rng.random(n))
    u = _inverse_cdf(config.p_u_given_w[w], rng.random(n))
    s = _inverse_cdf(config.p_s_given_uw[u, w], rng.random(n))

    columns = {"outcome": [s]}
    columns["unprotected"] = (
        list(np.unravel_index(u, schema.unprotected_dims)) if schema.unprotected else []
    )
    columns["protected"] = list(np.unravel_index(w, schema.protected_dims))
    counters = {role: iter(cols) for role, cols in columns.items()}
    records = np.column_stack([next(counters[v.role]) for v in schema.variables])
    return Dataset(schema, records)
