import numpy as np
import pytest

from sparse_rank1 import DenseTensor


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_tensor(rng, shape):
    return DenseTensor.from_array(rng.standard_normal(shape))
