import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sltransmit.characteristic import char_value
from sltransmit.corpus import baseline, corpus, mixed, theta_two

settings.register_profile("suite", deadline=None, max_examples=20, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    # first call compiles (or loads) the integrator kernel
    char_value(baseline(), 1.0)


@pytest.fixture
def b0():
    return baseline()


@pytest.fixture
def th2():
    return theta_two()


@pytest.fixture
def mixed_spec():
    return mixed()


@pytest.fixture(scope="session")
def corpus_specs():
    return corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
