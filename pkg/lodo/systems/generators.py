"""
Signal-generator builders
Gamma blocks and block-diagonal generators with L = [1 ... 1].
"""

from typing import Sequence

import numpy as np
import scipy.linalg as spla

from ..exceptions import GeneratorError
from .models import SignalGenerator


def gamma_block(omega: float) -> np.ndarray:
    """
    Rotation generator [[0, omega], [-omega, 0]] with spectrum {+j omega, -j omega}.

    Args:
        omega: Frequency in rad/s

    Returns:
        2x2 skew-symmetric matrix
    """
    if not np.isfinite(omega):
        raise GeneratorError("omega must be finite")
    return np.array([[0.0, omega], [-omega, 0.0]])


def build_generator(dc: bool = True, frequencies: Sequence[float] = ()) -> SignalGenerator:
    """
    Build S = blockdiag(0, Gamma(f1), ..., Gamma(fk)) with L = [1 ... 1].

    Args:
        dc: Include the scalar 0 block (constant inputs)
        frequencies: Positive, distinct frequencies in rad/s

    Returns:
        SignalGenerator of dimension (1 if dc else 0) + 2k

    Raises:
        GeneratorError: empty generator, non-positive or duplicate frequencies
    """
    freqs = [float(f) for f in frequencies]
    if any(not np.isfinite(f) or f <= 0 for f in freqs):
        raise GeneratorError(f"frequencies must be positive and finite, got {freqs}")
    if len(set(freqs)) != len(freqs):
        raise GeneratorError(f"duplicate frequencies make sigma(S) non-simple: {freqs}")
    blocks = ([np.zeros((1, 1))] if dc else []) + [gamma_block(f) for f in freqs]
    if not blocks:
        raise GeneratorError("generator needs the dc block or at least one frequency")
    S = spla.block_diag(*blocks)
    L = np.ones((1, S.shape[0]))
    return SignalGenerator(S, L)
