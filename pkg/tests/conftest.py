import pathlib

import numpy as np
import pytest

from cdrlag import kernels

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Touch every jitted kernel once so compile time is not billed to the
    first test that happens to call it (the acceptance gates assert wall
    clock)."""
    sub = np.zeros(2, dtype=np.int64)
    ts = np.array([1, 2], dtype=np.int64)
    pair = np.zeros(2, dtype=np.int64)
    kernels.backward_match(sub, ts, pair, sub, ts + 1, pair, 1)
    kernels.ks_statistic(np.array([1.0, 2.0]), np.array([1.5, 2.5]))
    kernels.ks_asymptotic_sf(0.5)
    kernels.gamma_q(1.0, 1.0)
    kernels.exgauss_nll(np.array([1.0, 2.0]), 1.0, 0.5, 0.5)
    kernels.exgauss_logpdf(np.array([1.0]), 1.0, 0.5, 0.5)


@pytest.fixture(scope="session")
def reference_trace():
    return DATA_DIR / "reference_network.csv", DATA_DIR / "reference_cdr.csv"
