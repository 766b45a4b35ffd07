import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_joint, schema_for
from outcome_equal.dist import (
    S,
    U,
    W,
    JointDistribution,
    VariableSchema,
    Variable,
    conditional,
    from_table,
    kl_divergence,
    marginal,
    mutual_information,
)
from outcome_equal.errors import (
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


def kl_by_hand(p, q):
    """Term-by-term sum over flattened cells, independent of the numpy path."""
    total = 0.0
    for pi, qi in zip(np.ravel(p), np.ravel(q)):
        if pi > 0:
            total += pi * math.log(pi / qi)
    return total


def binary_schema():
    return VariableSchema.build(("x", ["0", "1"]), [("y", ["0", "1"])])


# -- schema -------------------------------------------------------------------


class TestSchema:
    def test_axes_flatten_row_major(self):
        schema = VariableSchema.build(
            ("s", ["lo", "hi"]),
            [("sex", ["f", "m"]), ("race", ["r1", "r2", "r3"])],
            [("age", ["y", "o"]), ("zip", ["z1", "z2", "z3", "z4"])],
        )
        assert schema.shape == (2, 8, 6)
        assert schema.axis_labels(W)[:4] == [("f", "r1"), ("f", "r2"), ("f", "r3"), ("m", "r1")]
        # assignment order follows schema variable order: s, age, zip, sex, race
        assert schema.cell_index((1, 1, 2, 1, 0)) == (1, 4 + 2, 3)

    def test_trivial_unprotected_axis(self):
        assert binary_schema().shape == (2, 1, 2)

    @pytest.mark.parametrize(
        "variables",
        [
            (Variable("a", "outcome", ("0",)), Variable("a", "protected", ("0",))),
            (Variable("a", "protected", ("0",)),),
            (Variable("a", "outcome", ("0",)), Variable("b", "outcome", ("0",)), Variable("c", "protected", ("0",))),
            (Variable("a", "outcome", ("0",)), Variable("b", "unprotected", ("0",))),
        ],
    )
    def test_invalid_schemas(self, variables):
        with pytest.raises(SchemaError):
            VariableSchema(variables)

    def test_variable_checks(self):
        with pytest.raises(SchemaError):
            Variable("a", "outcome", ())
        with pytest.raises(SchemaError):
            Variable("a", "outcome", ("x", "x"))
        with pytest.raises(SchemaError):
            Variable("a", "bystander", ("x",))

    def test_dict_round_trip(self):
        schema = schema_for((3, 2, 4))
        assert VariableSchema.from_dict(schema.to_dict()) == schema


# -- from_table ----------------------------------------------------------------


class TestFromTable:
    def test_fixture(self, two_by_two):
        assert two_by_two.mass.sum() == pytest.approx(1.0, abs=1e-15)
        assert two_by_two.mass[1, 0, 0] == 0.4

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            from_table(binary_schema(), [((1, 0), 0.4), ((0, 0), 0.1), ((1, 1), 0.2), ((0, 1), 0.2)])

    def test_point_distribution(self):
        schema = VariableSchema.build(("s", ["only"]), [("w", ["only"])])
        d = from_table(schema, [((0, 0), 1.0)])
        assert d.shape == (1, 1, 1)
        assert d.mass[0, 0, 0] == 1.0

    def test_negative(self):
        with pytest.raises(NegativeMass):
            from_table(binary_schema(), [((0, 0), 1.2), ((1, 1), -0.2)])

    def test_duplicate(self):
        with pytest.raises(DuplicateCell):
            from_table(binary_schema(), [((0, 0), 0.5), ((0, 0), 0.5)])

    @pytest.mark.parametrize("assignment", [(2, 0), (0,), (0, -1), (0, 0, 0)])
    def test_bad_assignment(self, assignment):
        with pytest.raises(BadAssignment):
            from_table(binary_schema(), [(assignment, 1.0)])

    def test_tolerance_is_1e9(self):
        from_table(binary_schema(), [((0, 0), 0.5), ((1, 1), 0.5 + 5e-10)])
        with pytest.raises(NotNormalized):
            from_table(binary_schema(), [((0, 0), 0.5), ((1, 1), 0.5 + 5e-9)])

    def test_immutable(self, two_by_two):
        with pytest.raises(ValueError):
            two_by_two.mass[0, 0, 0] = 0.5


# -- marginal / conditional ----------------------------------------------------


class TestMarginal:
    def test_outcome(self, two_by_two):
        m = marginal(two_by_two, {S})
        assert m[1] == pytest.approx(0.6, abs=1e-15)
        assert m[0] == pytest.approx(0.4, abs=1e-15)

    def test_protected(self, two_by_two):
        np.testing.assert_allclose(marginal(two_by_two, [W]), [0.5, 0.5], atol=1e-15)

    def test_identity(self, two_by_two):
        np.testing.assert_array_equal(marginal(two_by_two, (S, U, W)), two_by_two.mass)

    def test_empty(self, two_by_two):
        with pytest.raises(EmptyKeepSet):
            marginal(two_by_two, ())

    def test_keep_order_is_canonical(self, rng):
        d = random_joint(rng, (2, 3, 4))
        assert marginal(d, (W, S)).shape == (2, 4)

    def test_consistency(self, rng):
        for _ in range(20):
            d = random_joint(rng, tuple(rng.integers(1, 5, size=3)))
            sw = marginal(d, (S, W))
            np.testing.assert_allclose(sw.sum(axis=1), marginal(d, S), atol=1e-12, rtol=0)
            assert marginal(d, U).sum() == pytest.approx(1.0, abs=1e-9)


class TestConditional:
    def test_outcome_given_group(self, two_by_two):
        c = conditional(two_by_two, S, W)
        assert c.values[1, 0] == pytest.approx(0.8, abs=1e-15)
        assert c.values[1, 1] == pytest.approx(0.4, abs=1e-15)
        np.testing.assert_allclose(c.values.sum(axis=0), 1.0, atol=1e-9)

    def test_uniform(self):
        d = JointDistribution(schema_for((2, 3, 2)), np.full((2, 3, 2), 1 / 12))
        c = conditional(d, U, (S, W))
        np.testing.assert_allclose(c.values, 1 / 3, atol=1e-15)

    def test_zero_mass_given_cell_is_undefined(self):
        mass = np.zeros((2, 1, 2))
        mass[:, 0, 0] = 0.5
        d = JointDistribution(binary_schema(), mass)
        c = conditional(d, S, W)
        assert c.defined.tolist() == [True, False]
        assert np.all(np.isnan(c.values[:, 1]))

    def test_overlap(self, two_by_two):
        with pytest.raises(OverlappingAxes):
            conditional(two_by_two, (S, W), W)


# -- information measures ------------------------------------------------------


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def _two_cell(p):
    schema = VariableSchema.build(("s", ["0", "1"]), [("w", ["0"])])
    return JointDistribution(schema, np.array(p, dtype=float).reshape(2, 1, 1))


class TestKL:
    def test_identity(self, two_by_two):
        assert kl_divergence(two_by_two, two_by_two) == 0.0

    def test_two_cell_value(self):
        p, q = _two_cell([0.5, 0.5]), _two_cell([0.25, 0.75])
        expected = kl_by_hand([0.5, 0.5], [0.25, 0.75])
        assert expected == pytest.approx(0.143841, abs=1e-6)
        assert kl_divergence(p, q) == pytest.approx(expected, abs=1e-15)

    def test_support_escape(self):
        with pytest.raises(InfiniteDivergence):
            kl_divergence(_two_cell([0.5, 0.5]), _two_cell([1.0, 0.0]))

    def test_zero_times_log_zero(self):
        assert kl_divergence(_two_cell([1.0, 0.0]), _two_cell([0.5, 0.5])) == pytest.approx(math.log(2))

    def test_schema_mismatch(self, two_by_two):
        with pytest.raises(SchemaMismatch):
            kl_divergence(two_by_two, _two_cell([0.5, 0.5]))

    def test_gibbs_inequality(self, rng):
        for _ in range(1000):
            p = rng.dirichlet(np.ones(6))
            q = rng.dirichlet(np.ones(6))
            sch = schema_for((2, 3, 1))
            dp, dq = JointDistribution(sch, p.reshape(2, 3, 1)), JointDistribution(sch, q.reshape(2, 3, 1))
            value = kl_divergence(dp, dq)
            assert value > 1e-12
            assert value == pytest.approx(kl_by_hand(p, q), rel=1e-9, abs=1e-15)
            assert kl_divergence(dp, dp) <= 1e-12


class TestMutualInformation:
    def test_product_is_zero(self, rng):
        ps, pw = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4))
        mass = np.einsum("s,w->sw", ps, pw)[:, None, :]
        d = JointDistribution(schema_for((3, 1, 4)), mass)
        assert mutual_information(d, S, W) <= 1e-12

    def test_correlated_binary(self):
        d = JointDistribution(binary_schema(), np.array([[0.4, 0.1], [0.1, 0.4]])[:, None, :])
        expected = kl_by_hand([0.4, 0.1, 0.1, 0.4], [0.25] * 4)
        assert expected == pytest.approx(0.192745, abs=1e-6)
        assert mutual_information(d, S, W) == pytest.approx(expected, abs=1e-15)

    def test_perfect_correlation(self):
        d = JointDistribution(binary_schema(), np.array([[0.5, 0.0], [0.0, 0.5]])[:, None, :])
        assert mutual_information(d, S, W) == pytest.approx(math.log(2), abs=1e-15)

    def test_same_axis(self, two_by_two):
        with pytest.raises(SameAxis):
            mutual_information(two_by_two, S, S)

    def test_symmetric_and_chain_identity(self, rng):
        d = random_joint(rng, (3, 2, 4))
        sw = marginal(d, (S, W))
        product = np.outer(sw.sum(1), sw.sum(0))
        assert mutual_information(d, S, W) == mutual_information(d, W, S)
        assert mutual_information(d, S, W) == pytest.approx(kl_by_hand(sw, product), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    shape=st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)),
)
def test_normalization_closure(seed, shape):
    d = random_joint(np.random.default_rng(seed), shape)
    for keep in [(S,), (U,), (W,), (S, W), (U, W), (S, U, W)]:
        m = marginal(d, keep)
        assert np.all(m >= 0)
        assert m.sum() == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(
        marginal(d, (S, W)).sum(axis=1), marginal(d, S), atol=1e-12, rtol=0
    )
