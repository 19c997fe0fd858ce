import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ensemble_lab import RngStream

settings.register_profile(
    "lab", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lab")


@pytest.fixture
def stream():
    return RngStream(20240917)


def mc_mean(x):
    x = np.asarray(x, dtype=float)
    return x.mean(), x.std(ddof=1) / np.sqrt(x.size)
