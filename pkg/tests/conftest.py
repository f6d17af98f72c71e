import numpy as np
import pytest

from vpstest.bitseq import PmSequence


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_pm(rng, n):
    return PmSequence.from_values(rng.choice([-1.0, 1.0], size=n))
