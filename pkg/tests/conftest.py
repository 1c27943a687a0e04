import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sicps.weyl import PureState  # noqa: E402

# (0, 1, -1)/sqrt(2): all eight nontrivial overlaps equal 1/4 exactly
FIDUCIAL_3 = PureState(np.array([0, 1, -1]) / np.sqrt(2))

DATA = Path(__file__).parent / "data"


def random_state(d, rng):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState.from_amplitudes(z)


def random_op(d, rng):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_hermitian(d, rng):
    A = random_op(d, rng)
    return (A + A.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
