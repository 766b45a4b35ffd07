import math

import numpy as np
import pytest

from outcome_equal.dist import S, W, VariableSchema, mutual_information
from outcome_equal.errors import InvalidTable
from outcome_equal.estimation import csv_text, estimate_joint
from outcome_equal.projection import outcome_equalize
from outcome_equal.synth import SynthConfig, ground_truth_joint, sample


def total_variation(p, q):
    return 0.5 * float(np.abs(p - q).sum())


def playground_mi_by_hand():
    """I(S;W) of the playground chain, enumerated cell by cell."""
    p_w = {"a": 0.5, "b": 0.5}
    fit = {"a": 0.7, "b": 0.3}
    grad = {"fit": 0.8, "unfit": 0.4}
    joint = {}
    for w in p_w:
        for u, pu in (("fit", fit[w]), ("unfit", 1 - fit[w])):
            for s, ps in (("grad", grad[u]), ("no", 1 - grad[u])):
                joint[s, w] = joint.get((s, w), 0.0) + p_w[w] * pu * ps
    p_s = {s: sum(v for (s2, _), v in joint.items() if s2 == s) for s in ("grad", "no")}
    return sum(v * math.log(v / (p_s[s] * p_w[w])) for (s, w), v in joint.items())


def test_playground_leaks(playground):
    truth = ground_truth_joint(playground)
    assert truth.mass[0, 0, 0] == pytest.approx(0.5 * 0.7 * 0.8, abs=1e-15)
    mi = mutual_information(truth, S, W)
    assert mi == pytest.approx(playground_mi_by_hand(), abs=1e-12)
    assert mi > 0.01


def test_no_leakage_path():
    schema = VariableSchema.build(("s", ["0", "1"]), [("w", ["a", "b", "c"])], [("u", ["x", "y"])])
    cfg = SynthConfig(
        schema,
        [0.2, 0.3, 0.5],
        [[0.6, 0.4]] * 3,
        [[[0.9, 0.1]] * 3, [[0.3, 0.7]] * 3],
    )
    assert mutual_information(ground_truth_joint(cfg), S, W) <= 1e-12


def test_deterministic_chain_is_point_mass():
    schema = VariableSchema.build(("s", ["0", "1"]), [("w", ["a", "b"])], [("u", ["x", "y"])])
    cfg = SynthConfig(
        schema,
        [0.0, 1.0],
        [[1.0, 0.0], [0.0, 1.0]],
        [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 1.0], [0.0, 1.0]]],
    )
    truth = ground_truth_joint(cfg)
    assert truth.mass[1, 1, 1] == 1.0 and truth.mass.sum() == 1.0
    data = sample(cfg.with_overrides(n=20))
    assert np.all(data.records == [1, 1, 1])


def test_sample_count_and_determinism(playground):
    small = playground.with_overrides(n=5)
    assert len(sample(small)) == 5
    assert csv_text(sample(playground.with_overrides(n=500))) == csv_text(sample(playground.with_overrides(n=500)))
    assert csv_text(sample(playground.with_overrides(n=500, seed=1))) != csv_text(
        sample(playground.with_overrides(n=500))
    )


def test_large_sample_recovers_truth(playground):
    est = estimate_joint(sample(playground)).joint
    assert total_variation(est.mass, ground_truth_joint(playground).mass) <= 0.02


def test_estimation_error_shrinks(playground):
    truth = ground_truth_joint(playground).mass
    means = []
    for n in (1_000, 10_000, 100_000):
        tvs = [
            total_variation(estimate_joint(sample(playground.with_overrides(n=n, seed=s))).joint.mass, truth)
            for s in range(5)
        ]
        means.append(np.mean(tvs))
    assert means[0] > means[1] > means[2]


def test_equalization_closes_the_loop(playground):
    eq = outcome_equalize(ground_truth_joint(playground))
    assert mutual_information(eq, S, W) <= 1e-10


@pytest.mark.parametrize(
    "field,value",
    [
        ("p_w", [0.5, 0.6]),
        ("p_u_given_w", [[0.7, 0.3], [0.3, 0.6]]),
        ("p_s_given_uw", [[[0.8, 0.2], [0.8, 0.2]], [[0.4, 0.6], [-0.4, 1.4]]]),
        ("p_w", [0.5, 0.25, 0.25]),
    ],
)
def test_invalid_tables(playground, field, value):
    kwargs = dict(
        schema=playground.schema,
        p_w=playground.p_w,
        p_u_given_w=playground.p_u_given_w,
        p_s_given_uw=playground.p_s_given_uw,
    )
    kwargs[field] = value
    with pytest.raises(InvalidTable):
        SynthConfig(**kwargs)


def test_invalid_count(playground):
    with pytest.raises(InvalidTable):
        playground.with_overrides(n=0)
