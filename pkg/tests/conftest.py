import numpy as np
import pytest

from rangeproj.generators import GenConfig, derive_seed, random_partition, random_psd
from rangeproj.pinching import PinchingMap

ALL_ONES = np.array([[1.0, 1.0], [1.0, 1.0]])


def psd_cases(seed, count, dim_max=10, field="complex"):
    """Deterministic (A, phi) pairs with varied n, rank and number of blocks."""
    from rangeproj.generators import SplitMix64

    rng = SplitMix64(seed)
    for i in range(count):
        n = rng.integers(1, dim_max)
        rank = rng.integers(0, n)
        k = rng.integers(1, n)
        s = derive_seed(seed, i)
        A = random_psd(GenConfig(s, n, rank, field))
        yield A, PinchingMap(random_partition(derive_seed(s, 1), n, k))


@pytest.fixture
def all_ones():
    return ALL_ONES.copy()
