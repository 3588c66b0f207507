from __future__ import annotations

import numpy as np
import pytest

from rydqsp.pauli import build_disordered_heisenberg


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def heis10():
    return build_disordered_heisenberg(10, 0)
