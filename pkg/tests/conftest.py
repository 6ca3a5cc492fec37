import numpy as np
import pytest

from entspread import WaveState


def random_unit_state(rng, n, origin=None):
    amps = rng.normal(size=n) + 1j * rng.normal(size=n)
    amps /= np.linalg.norm(amps)
    if origin is None:
        origin = n // 2
    return WaveState(amplitudes=amps, time=0.0, origin=origin)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
