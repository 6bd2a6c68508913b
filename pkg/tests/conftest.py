import numpy as np
import pytest

from prefsort import fixtures
from prefsort.core import AssignmentExample, DecisionMatrix, build_scales
from prefsort.inference import PreferenceInstance


@pytest.fixture(scope="session")
def credit_matrix():
    return fixtures.credit_matrix()


@pytest.fixture(scope="session")
def credit_scales(credit_matrix):
    return tuple(build_scales(credit_matrix, fixtures.SUBINTERVALS))


@pytest.fixture(scope="session")
def credit_instance(credit_matrix, credit_scales):
    return PreferenceInstance(
        credit_matrix,
        credit_scales,
        fixtures.INITIAL_EXAMPLES,
        fixtures.Q,
        fixtures.ALPHA,
    )


@pytest.fixture()
def tiny_separable():
    """One criterion, two alternatives at the range ends, cleanly separable."""
    matrix = DecisionMatrix(
        ("low", "high"), np.array([[0.0], [100.0]]), ("g1",)
    )
    scales = tuple(build_scales(matrix, [1]))
    examples = (AssignmentExample("low", 1), AssignmentExample("high", 2))
    return PreferenceInstance(matrix, scales, examples, 2, 0.1)


@pytest.fixture()
def contradictory_pair():
    """Two alternatives with identical rows asserted into different categories."""
    matrix = DecisionMatrix(
        ("x1", "x2", "spread"),
        np.array([[50.0], [50.0], [0.0]]),
        ("g1",),
    )
    scales = tuple(build_scales(matrix, [1]))
    examples = (AssignmentExample("x1", 1), AssignmentExample("x2", 2))
    return PreferenceInstance(matrix, scales, examples, 2, 0.1)
