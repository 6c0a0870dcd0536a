import numpy as np
import pytest

from se3geo.se3 import warmup_kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Compile (or load from cache) the numerical kernels once so individual
    # tests measure algorithm time, not JIT time.
    warmup_kernels()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
