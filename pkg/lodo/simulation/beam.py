"""
Surrogate Clamped Beam
Lumped mass-spring-damper chain standing in for a clamped-beam benchmark.

N = n/2 equal masses m are connected by springs k, the first mass is tied to
the wall, and each mass has a dashpot d to ground. The force input acts on the
free end and the output is the free-end displacement:

    x = (q, q'),  A = [[0, I], [-Ks/m, -(d/m) I]],  B = [0; e_N / m],  C = [e_N^T, 0]

Ks is the fixed-free stiffness matrix (2k on the diagonal, k in the last entry,
-k off the diagonal). The DC gain is the free-end compliance N/k.
"""

import logging

import numpy as np

from ..exceptions import ConfigError, NotHurwitzError
from ..systems.models import StateSpaceSystem
from ..systems.validation import validate_sa1

logger = logging.getLogger(__name__)

# Defaults give natural frequencies up to 2 sqrt(k/m) = 10 rad/s and a
# uniform modal decay rate d/(2m) = 0.04 1/s.
BEAM_STATES = 348
BEAM_STIFFNESS = 2.5e8
BEAM_DAMPING = 8.0e5
BEAM_MASS = 1.0e7


def chain_stiffness(masses: int, stiffness: float) -> np.ndarray:
    """Fixed-free stiffness matrix of a chain of ``masses`` springs."""
    diagonal = np.full(masses, 2.0 * stiffness)
    diagonal[-1] = stiffness
    off = np.full(masses - 1, -stiffness)
    return np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1)


def surrogate_beam(n: int = BEAM_STATES, stiffness: float = BEAM_STIFFNESS,
                   damping: float = BEAM_DAMPING, mass: float = BEAM_MASS,
                   verify: bool = True) -> StateSpaceSystem:
    """
    Build the first-order realization of the damped chain.

    Args:
        n: Even state dimension (n/2 masses)
        stiffness: Spring constant k
        damping: Dashpot constant d
        mass: Mass m of each element
        verify: Run the SA1 check (Hurwitz and minimal) on the result

    Returns:
        StateSpaceSystem of order n

    Raises:
        ConfigError: n odd or non-positive parameters
        NotHurwitzError: the realization fails SA1
    """
    if n < 2 or n % 2:
        raise ConfigError(f"beam state dimension must be even and >= 2, got {n}")
    if min(stiffness, damping, mass) <= 0:
        raise ConfigError("stiffness, damping and mass must all be positive")
    masses = n // 2
    Ks = chain_stiffness(masses, stiffness)
    I = np.eye(masses)
    A = np.block([
        [np.zeros((masses, masses)), I],
        [-Ks / mass, -(damping / mass) * I],
    ])
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0 / mass
    C = np.zeros((1, n))
    C[0, masses - 1] = 1.0
    system = StateSpaceSystem(A, B, C)

    if verify:
        report = validate_sa1(system)
        if not report.is_valid:
            raise NotHurwitzError(f"surrogate beam n={n} fails SA1: {'; '.join(report.errors)}")
        logger.info("surrogate beam n=%d built, spectral abscissa %.4g",
                    n, report.details['spectral_abscissa'])
    return system


def static_compliance(n: int, stiffness: float = BEAM_STIFFNESS) -> float:
    """Free-end displacement per unit static force, N/k."""
    return (n // 2) / stiffness
