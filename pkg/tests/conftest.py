import pytest

from torusdyn.circle import CircleLift
from torusdyn.gallery import (example_fully_essential,
                              example_unbounded_inessential, suspension_map)
from torusdyn.rotation import deviation_profile
from torusdyn.skew import build_centralized
from torusdyn.torus import RigidTranslation

# acceptance constants (quoted double literals, used verbatim)
ALPHA = 0.6180339887
BETA = 0.4142135624


@pytest.fixture(scope="session")
def susp31():
    return suspension_map(CircleLift.rigid(ALPHA), CircleLift.rigid(BETA))


@pytest.fixture(scope="session")
def ex32():
    return example_unbounded_inessential()


@pytest.fixture(scope="session")
def ex33():
    return example_fully_essential()


@pytest.fixture(scope="session")
def profile31(susp31):
    return deviation_profile(susp31.torus_map, (0, 1),
                             susp31.rho_base * susp31.rho_fiber,
                             n_max=10_000, samples=64, seed=0)


@pytest.fixture(scope="session")
def profile32(ex32):
    return deviation_profile(ex32.torus_map, (0, 1), ex32.rho_vertical,
                             n_max=10_000, samples=32, seed=0)


@pytest.fixture(scope="session")
def profile33(ex33):
    return deviation_profile(ex33.torus_map, (0, 1), ex33.rho_vertical,
                             n_max=10_000, samples=32, seed=0)


@pytest.fixture(scope="session")
def skew_rigid():
    return build_centralized(RigidTranslation(ALPHA, BETA), BETA, c_est=0.0)


@pytest.fixture(scope="session")
def skew31(susp31, profile31):
    return build_centralized(susp31.torus_map,
                             susp31.rho_base * susp31.rho_fiber,
                             c_est=profile31.c_est)
