import numpy as np
import pytest

from outcome_equal import fixtures
from outcome_equal.dist import JointDistribution, VariableSchema

# criterion id -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE_RESULTS = {}


def schema_for(shape):
    n_s, n_u, n_w = shape
    return VariableSchema.build(
        ("y", [f"s{i}" for i in range(n_s)]),
        [("w", [f"w{i}" for i in range(n_w)])],
        [("u", [f"u{i}" for i in range(n_u)])],
    )


def random_joint(rng, shape, concentration=1.0):
    """Full-support joint with Dirichlet-distributed cell masses."""
    mass = rng.dirichlet(np.full(int(np.prod(shape)), concentration)).reshape(shape)
    # Dirichlet can underflow to exact zeros for small concentrations
    assert np.all(mass > 0)
    return JointDistribution(schema_for(shape), mass)


def random_suite(count, sizes=(2, 3, 4), seed=20150101):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        shape = tuple(int(x) for x in rng.choice(sizes, size=3))
        out.append(random_joint(rng, shape))
    return out


@pytest.fixture
def two_by_two():
    return fixtures.two_by_two()


@pytest.fixture
def prenatal():
    return fixtures.prenatal()


@pytest.fixture
def playground():
    return fixtures.playground()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key}: {detail}")
