import math

import pytest

from margitron import HyperParams, SparsePattern, Variant, build_training_set, train


@pytest.fixture
def single_pattern_set():
    """One positive pattern x = (1) with rho = 1 and no extension."""
    return build_training_set([SparsePattern.create(0, 1, [0], [1.0])], rho=1.0, delta=0.0)


@pytest.fixture
def trained_single(single_pattern_set):
    """The single-pattern fixture trained at epsilon = 1, b = 1."""
    params = HyperParams(Variant.T, 1.0, 1.0)
    state, report = train(single_pattern_set, params, record_updates=True)
    return single_pattern_set, state, report


@pytest.fixture
def inseparable_set():
    """The same point with both labels: no direction separates it."""
    return build_training_set(
        [
            SparsePattern.create(0, 1, [0], [1.0]),
            SparsePattern.create(1, -1, [0], [1.0]),
        ],
        rho=1.0,
        delta=0.0,
    )


@pytest.fixture
def sqrt2():
    return math.sqrt(2.0)
