import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def consts():
    from heliobubble.constants import DEFAULT_CONSTANTS
    return DEFAULT_CONSTANTS


@pytest.fixture(scope="session")
def calibrated():
    from heliobubble.potentials import CALIBRATED_POTENTIALS
    return CALIBRATED_POTENTIALS


@pytest.fixture(scope="session")
def sigma_au(consts):
    return consts.sigma_default
