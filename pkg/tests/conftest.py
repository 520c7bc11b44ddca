import numpy as np
import pytest

from gexlab import _kernels
from gexlab.experiments import reference_set


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jit kernels once so per-test runtimes measure the math
    _kernels.warm_up()


@pytest.fixture
def ref_set():
    return reference_set()


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)
