"""Small named joints and configs used by the tests and demos."""

import numpy as np

from .dist import JointDistribution, VariableSchema, from_table
from .synth import SynthConfig


def two_by_two() -> JointDistribution:
    """Binary outcome, no unprotected variable, binary protected group.

    ``Pr(1, a) = 0.4, Pr(0, a) = 0.1, Pr(1, b) = 0.2, Pr(0, b) = 0.3``.
    """
    schema = VariableSchema.build(("y", ["0", "1"]), [("group", ["a", "b"])])
    return from_table(
        schema,
        [((1, 0), 0.4), ((0, 0), 0.1), ((1, 1), 0.2), ((0, 1), 0.3)],
    )


def prenatal() -> JointDistribution:
    """Prenatal care allocation where men never receive care.

    Protected axis is sex x race, with one unprotected age band. Among women,
    care rates differ by race, so the population is correlated both ways;
    only the race correlation can be removed.
    """
    schema = VariableSchema.build(
        ("care", ["care", "no_care"]),
        [("sex", ["female", "male"]), ("race", ["r1", "r2"])],
        [("age", ["under_35", "35_plus"])],
    )
    p_w = np.array([0.3, 0.2, 0.25, 0.25])  # female r1, female r2, male r1, male r2
    p_u_given_w = np.array([[0.6, 0.4], [0.5, 0.5], [0.55, 0.45], [0.45, 0.55]])
    p_care = np.array([[0.7, 0.4, 0.0, 0.0], [0.5, 0.2, 0.0, 0.0]])  # [u, w]
    p_s_given_uw = np.stack([p_care, 1.0 - p_care], axis=-1)
    return JointDistribution(
        schema, np.einsum("w,wu,uws->suw", p_w, p_u_given_w, p_s_given_uw)
    )


def playground(n: int = 100_000, seed: int = 2015) -> SynthConfig:
    """Neighborhood -> fitness -> graduation.

    Graduation depends only on fitness, but fitness depends on the
    neighborhood, so outcome and neighborhood end up correlated.
    """
    schema = VariableSchema.build(
        ("outcome", ["grad", "no_grad"]),
        [("neighborhood", ["a", "b"])],
        [("fitness", ["fit", "unfit"])],
    )
    return SynthConfig(
        schema,
        p_w=[0.5, 0.5],
        p_u_given_w=[[0.7, 0.3], [0.3, 0.7]],
        p_s_given_uw=[[[0.8, 0.2], [0.8, 0.2]], [[0.4, 0.6], [0.4, 0.6]]],
        n=n,
        seed=seed,
    )
