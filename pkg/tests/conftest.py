import numpy as np
import pytest

from susytb.systems import (
    HermitianStaticParams,
    PTDynamicParams,
    PTStaticParams,
    make_system,
)

# benchmark parameter sets used throughout
HERM = HermitianStaticParams(k1=0.645, k2=0.865)
PTS = PTStaticParams(k1=1.1, k2=1.2, alpha=0.2)
PTD = PTDynamicParams(k1=1.0, k2=1.1, k3=0.95, alpha=0.1)
PTD_STRONG = PTDynamicParams(k1=1.0, k2=1.1, k3=0.95, alpha=0.5)


@pytest.fixture(scope="session")
def herm_system():
    return make_system(HERM)


@pytest.fixture(scope="session")
def pt_system():
    return make_system(PTS)


@pytest.fixture(scope="session")
def dyn_system():
    return make_system(PTD)


@pytest.fixture(scope="session")
def dyn_strong_system():
    return make_system(PTD_STRONG)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
