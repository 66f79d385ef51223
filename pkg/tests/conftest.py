import numpy as np
import pytest

from doubled_spectral import build_rule


@pytest.fixture(scope="session")
def rule8():
    return build_rule(8)


@pytest.fixture(scope="session")
def rule16():
    return build_rule(16)


@pytest.fixture(scope="session")
def rule32():
    return build_rule(32)


@pytest.fixture(scope="session")
def rule64():
    return build_rule(64)


def draw_scales(rng, lo=0.5, hi=2.0, size=4):
    """Log-uniform scale factors, the sampling box used throughout."""
    return tuple(float(v) for v in np.exp(rng.uniform(np.log(lo), np.log(hi), size)))
