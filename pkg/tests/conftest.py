"""
Shared fixtures: seeded random plants and the small hand-checkable systems.
"""

import os
import sys

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from lodo.systems.generators import build_generator
from lodo.systems.models import SignalGenerator, StateSpaceSystem


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long surrogate-beam runs (deselect with -m 'not slow')")


def random_stable_system(rng: np.random.Generator, n: int) -> StateSpaceSystem:
    """
    Random minimal SISO plant with distinct poles.

    Poles have real parts in [-3, -0.2] and imaginary parts in [-3, 3]; an
    orthogonal similarity hides the block structure.
    """
    blocks = []
    remaining = n
    while remaining > 0:
        if remaining >= 2 and rng.random() < 0.5:
            a = -rng.uniform(0.2, 3.0)
            b = rng.uniform(0.3, 3.0)
            blocks.append(np.array([[a, b], [-b, a]]))
            remaining -= 2
        else:
            blocks.append(np.array([[-rng.uniform(0.2, 3.0)]]))
            remaining -= 1
    D = np.zeros((n, n))
    i = 0
    for block in blocks:
        k = block.shape[0]
        D[i:i + k, i:i + k] = block
        i += k
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = Q @ D @ Q.T
    B = rng.standard_normal((n, 1))
    C = rng.standard_normal((1, n))
    return StateSpaceSystem(A, B, C)


def random_generator(rng: np.random.Generator, nu: int) -> SignalGenerator:
    """dc block plus (nu - 1)/2 distinct frequencies in [0.1, 2], or only frequencies for even nu."""
    pairs = nu // 2
    freqs = np.sort(rng.uniform(0.1, 2.0, pairs))
    while pairs > 1 and np.min(np.diff(freqs)) < 0.05:
        freqs = np.sort(rng.uniform(0.1, 2.0, pairs))
    return build_generator(dc=bool(nu % 2), frequencies=freqs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def scalar_system():
    """x' = -x + u, y = x."""
    return StateSpaceSystem([[-1.0]], [[1.0]], [[1.0]])


@pytest.fixture
def dc_generator():
    """Constant inputs: S = [0], L = [1]."""
    return SignalGenerator([[0.0]], [[1.0]])


@pytest.fixture
def oscillator_system():
    """Lightly damped second-order plant with poles -0.5 +/- 2j."""
    A = np.array([[0.0, 1.0], [-4.25, -1.0]])
    return StateSpaceSystem(A, [[0.0], [1.0]], [[1.0, 0.0]])


@pytest.fixture
def third_order_system():
    """The oscillator behind a lag at -2: 1 / ((s + 2)(s^2 + s + 4.25)) in companion form."""
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-8.5, -6.25, -3.0]])
    return StateSpaceSystem(A, [[0.0], [0.0], [1.0]], [[1.0, 0.0, 0.0]])
