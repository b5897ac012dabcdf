import numpy as np
import pytest

from hyperell.elliptic import ParamPair
from hyperell.verification import VerifyParameters


@pytest.fixture
def pair():
    return ParamPair(2.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def serial_params():
    """Single process, small random samples."""
    return VerifyParameters(
        jobs=1,
        property_samples=8,
        reduction_samples=2,
        elliptic_samples=50,
    )
