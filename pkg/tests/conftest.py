import numpy as np
import pytest

from conetrace.numerics import QuadratureConfig


@pytest.fixture
def cfg():
    return QuadratureConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)
