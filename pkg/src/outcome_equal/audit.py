"""Before/after comparison of a joint and its equalized counterpart.

Two different things get measured and are kept apart in the report:

1. ``I(S; W)`` of each joint. Equalization drives this to zero exactly.
2. Allocation rates of a deterministic threshold policy per protected group.
   Thresholding the equalized scores does *not* inherit the independence
   guarantee, so disparity here is whatever it measures to be.

Population weights ``Pr(u | w)`` always come from the original joint; the
equalized joint only supplies the scores ``Pr(target | u, w)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .dist import S, U, W, JointDistribution, conditional, mutual_information
from .errors import SchemaMismatch
from .projection import information_cost


@dataclass(frozen=True)
class ThresholdPolicy:
    """Allocate to ``(u, w)`` iff ``Pr(target | u, w) >= tau``."""

    target_outcome: str
    tau: float

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau!r}")

    def target_index(self, schema) -> int:
        levels = schema.outcome.levels
        if self.target_outcome not in levels:
            raise ValueError(
                f"target {self.target_outcome!r} is not a level of outcome "
                f"{schema.outcome.name!r} {list(levels)}"
            )
        return levels.index(self.target_outcome)


@dataclass(frozen=True)
class AllocationRates:
    # protected-group label -> rate; NaN for groups with no population mass
    rates: dict[str, float]
    disparity: float
    # (u, w) cells the policy had to skip because the scoring joint has no mass there
    undefined_cells: int


def _group_label(labels) -> str:
    return "∧".join(labels)


def allocation_rates(
    scores: JointDistribution,
    policy: ThresholdPolicy,
    population: JointDistribution | None = None,
) -> AllocationRates:
    """Per-group share of the population the policy allocates to."""
    population = scores if population is None else population
    if scores.schema != population.schema:
        raise SchemaMismatch("scores and population have different schemas")
    t = policy.target_index(scores.schema)

    score = conditional(scores, S, (U, W))
    allocate = np.zeros(score.defined.shape, dtype=bool)
    allocate[score.defined] = score.values[t][score.defined] >= policy.tau

    # Pr(u | w) as Pr(u, w) / Pr(w); dividing last keeps an all-allocated group at exactly 1
    uw = population.mass.sum(axis=0)
    group = uw.sum(axis=0)
    live_group = group > 0
    # zero-mass (u, w) cells inside groups that exist in the population
    skipped = (~score.defined) & live_group[None, :]

    allocated = (uw * allocate).sum(axis=0)
    rates = np.full(group.shape, np.nan)
    rates[live_group] = allocated[live_group] / group[live_group]
    labels = [_group_label(lb) for lb in scores.schema.axis_labels(W)]
    live = rates[~np.isnan(rates)]
    disparity = float(live.max() - live.min()) if live.size else 0.0
    return AllocationRates(
        dict(zip(labels, (float(r) for r in rates))), disparity, int(skipped.sum())
    )


def policy_disparity(dist: JointDistribution, policy: ThresholdPolicy) -> float:
    """Largest pairwise gap in allocation rate across protected groups."""
    return allocation_rates(dist, policy).disparity


def chernoff_stein_note(cost: float) -> str:
    return (
        f"KL(equalized || original) = {cost:.6g} nats per sample. As a Chernoff-Stein "
        f"exponent: testing 'equalized' (null) against 'original' (alternative) from n "
        f"i.i.d. draws at a fixed false-alarm rate, the best test's miss probability "
        f"decays like exp(-{cost:.6g} n). Smaller cost means the equalized joint is "
        f"harder to distinguish from the original."
    )


@dataclass(frozen=True)
class AuditReport:
    mi_before: float
    mi_after: float
    information_cost: float
    chernoff_stein_note: str
    policy: ThresholdPolicy | None = None
    rates_before: AllocationRates | None = None
    rates_after: AllocationRates | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "independence": {
                "mi_before_nats": self.mi_before,
                "mi_after_nats": self.mi_after,
            },
            "information_cost_nats": self.information_cost,
            "chernoff_stein_note": self.chernoff_stein_note,
            "policy": None,
            "metadata": self.metadata,
        }
        if self.policy is not None:
            out["policy"] = {
                "target_outcome": self.policy.target_outcome,
                "tau": self.policy.tau,
                "original": _rates_dict(self.rates_before),
                "equalized": _rates_dict(self.rates_after),
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_table(self) -> str:
        lines = [
            "joint-distribution property (outcome vs protected)",
            f"  I(S;W) original   {self.mi_before:.6e} nats",
            f"  I(S;W) equalized  {self.mi_after:.6e} nats",
            f"  information cost  {self.information_cost:.6e} nats",
        ]
        if self.policy is not None:
            lines.append("")
            lines.append(
                f"threshold policy: allocate iff Pr({self.policy.target_outcome} | u, w) >= {self.policy.tau:g}"
                " (measured; not covered by the independence guarantee)"
            )
            lines.append(f"  {'group':<24}{'original':>12}{'equalized':>12}")
            for g in self.rates_before.rates:
                lines.append(
                    f"  {g:<24}{self.rates_before.rates[g]:>12.6f}{self.rates_after.rates[g]:>12.6f}"
                )
            lines.append(
                f"  {'disparity':<24}{self.rates_before.disparity:>12.6f}{self.rates_after.disparity:>12.6f}"
            )
            skipped = self.rates_before.undefined_cells + self.rates_after.undefined_cells
            if skipped:
                lines.append(f"  undefined (u, w) cells skipped: {skipped}")
        lines.append("")
        lines.append(self.chernoff_stein_note)
        return "\n".join(lines) + "\n"


def _rates_dict(r: AllocationRates) -> dict:
    d = asdict(r)
    # JSON has no NaN; empty groups become null
    d["rates"] = {k: (None if np.isnan(v) else v) for k, v in d["rates"].items()}
    return d


def audit(
    original: JointDistribution,
    equalized: JointDistribution,
    policy: ThresholdPolicy | None = None,
) -> AuditReport:
    if original.schema != equalized.schema:
        raise SchemaMismatch("original and equalized joints have different schemas")
    cost = information_cost(original, equalized)
    rates_before = rates_after = None
    if policy is not None:
        rates_before = allocation_rates(original, policy)
        rates_after = allocation_rates(equalized, policy, population=original)
    return AuditReport(
        mi_before=mutual_information(original, S, W),
        mi_after=mutual_information(equalized, S, W),
        information_cost=cost,
        chernoff_stein_note=chernoff_stein_note(cost),
        policy=policy,
        rates_before=rates_before,
        rates_after=rates_after,
        metadata={
            "population_weights": "Pr(u | w) from the original joint",
            "scores": "Pr(target | u, w) from each joint separately",
            "log_base": "e",
        },
    )
