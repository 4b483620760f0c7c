"""
Moment Matching
Moments, the family of moment-matching reduced-order models and the
stabilizing choice of G from a Lyapunov certificate of the plant.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg as spla

from ..core.linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    as_column,
    eigenvalues,
    identity_if_none,
    is_hurwitz,
    min_spectral_distance,
    numerical_rank,
    solve_lyapunov,
    solve_sylvester,
    spectral_abscissa,
)
from ..exceptions import DimensionError, NumericalError, SpectralCollisionError
from ..systems.models import ReducedOrderModel, SignalGenerator, StateSpaceSystem, ValidationReport

logger = logging.getLogger(__name__)

Realizable = Union[StateSpaceSystem, ReducedOrderModel]


def _rank_message(rank: int, system: StateSpaceSystem, generator: SignalGenerator) -> str:
    if generator.nu > system.n:
        return (f"rank(Pi) = {rank} < nu = {generator.nu}: the generator is larger than "
                f"the plant (n = {system.n}); a reduced model needs n >= nu")
    return f"rank(Pi) = {rank} < nu = {generator.nu}; check SA1 and SA2"


def compute_moment(system: StateSpaceSystem, generator: SignalGenerator) -> np.ndarray:
    """
    Moment of the plant at sigma(S): C Pi with A Pi + B L = Pi S.

    For S = 0 this is the DC gain C (-A)^-1 B.

    Returns:
        1 x nu array
    """
    Pi = solve_sylvester(system.A, system.B, generator.L, generator.S)
    return system.C @ Pi


def build_rom(system: StateSpaceSystem, generator: SignalGenerator, G,
              tolerances: Tolerances = DEFAULT_TOLERANCES) -> ReducedOrderModel:
    """
    Build the reduced-order model F = S - G L, H = C Pi.

    Any G with sigma(S) disjoint from sigma(S - G L) gives a model that
    matches the plant's moments at sigma(S).

    Args:
        system: Plant satisfying SA1
        generator: Generator satisfying SA2 with the plant
        G: nu x 1 free parameter

    Returns:
        ReducedOrderModel

    Raises:
        SpectralCollisionError: sigma(S) meets sigma(A) or sigma(S - G L)
        NumericalError: Pi is rank deficient
    """
    G = as_column(G, "G")
    if G.shape != (generator.nu, 1):
        raise DimensionError(f"G must be {generator.nu}x1, got {G.shape}")
    Pi = solve_sylvester(system.A, system.B, generator.L, generator.S, tolerances)

    F = generator.S - G @ generator.L
    gap = min_spectral_distance(eigenvalues(generator.S), eigenvalues(F))
    if gap < tolerances.spectral_gap:
        raise SpectralCollisionError(
            f"sigma(S) and sigma(S - G L) intersect (distance {gap:.3e}); choose another G"
        )

    rank = numerical_rank(Pi, tolerances.rank_rtol, relative=True)
    if rank != generator.nu:
        raise NumericalError(_rank_message(rank, system, generator))

    rom = ReducedOrderModel(generator=generator, G=G, H=system.C @ Pi, Pi=Pi)
    logger.debug("ROM nu=%d built, F abscissa %.4g", generator.nu, spectral_abscissa(F))
    return rom


def design_G_stabilizing(system: StateSpaceSystem, generator: SignalGenerator, Q=None) -> np.ndarray:
    """
    G = (Pi^T P Pi)^-1 Pi^T P B with A^T P + P A = -Q.

    This G renders S - G L Hurwitz for every Q > 0.

    Args:
        system: Plant with Hurwitz A
        generator: Signal generator
        Q: SPD weight, identity by default

    Returns:
        nu x 1 array

    Raises:
        NumericalError: Pi is rank deficient, or the Hurwitz post-check fails
    """
    Q = identity_if_none(Q, system.n)
    P = solve_lyapunov(system.A, Q)
    Pi = solve_sylvester(system.A, system.B, generator.L, generator.S)
    rank = numerical_rank(Pi, DEFAULT_TOLERANCES.rank_rtol, relative=True)
    if rank != generator.nu:
        raise NumericalError(_rank_message(rank, system, generator))

    gram = Pi.T @ P @ Pi
    try:
        G = spla.solve(0.5 * (gram + gram.T), Pi.T @ P @ system.B, assume_a='pos')
    except spla.LinAlgError as exc:
        raise NumericalError(f"Pi^T P Pi is not positive definite: {exc}") from exc

    F = generator.S - G @ generator.L
    abscissa = spectral_abscissa(F)
    if not is_hurwitz(F):
        raise NumericalError(f"S - G L is not Hurwitz after design (abscissa {abscissa:.3e})")
    logger.debug("stabilizing G designed, S - G L abscissa %.4g", abscissa)
    return G


def design_G_hinf(system: StateSpaceSystem, generator: SignalGenerator, **options) -> np.ndarray:
    """Select G by H-infinity optimization of the approximation error. Not provided."""
    raise NotImplementedError("H-infinity selection of G is not implemented; use design_G_stabilizing")


def transfer_value(model: Realizable, s: complex) -> complex:
    """
    Evaluate the transfer function C (s I - A)^-1 B of a plant or reduced model.

    A complex linear solve is used instead of an explicit inverse.
    """
    A, B, C = model.realization()
    n = A.shape[0]
    x = np.linalg.solve(s * np.eye(n) - A.astype(complex), B.astype(complex))
    return complex((C @ x)[0, 0])


def frequency_response(model: Realizable, omegas: Sequence[float]) -> np.ndarray:
    """Transfer function values at s = j omega for each frequency."""
    return np.array([transfer_value(model, 1j * w) for w in omegas], dtype=complex)


def verify_moment_matching(system: StateSpaceSystem, rom: ReducedOrderModel,
                           generator: Optional[SignalGenerator] = None,
                           tol: float = 1e-8) -> ValidationReport:
    """
    Check moment matching of a reduced model two independent ways.

    (a) Solve F P' + G L = P' S and test H P' against C Pi.
    (b) Compare plant and model transfer functions at every s in sigma(S);
        valid when sigma(S) is simple. Tolerances are relative to
        ``1 + |moment|`` and ``1 + |G_full(s)|`` respectively.

    Args:
        system: Plant
        rom: Reduced model
        generator: Generator, defaults to the one stored in the model
        tol: Relative tolerance

    Returns:
        Report with ``moment_error``, ``p_prime_identity_error`` and ``transfer_errors``
    """
    generator = generator or rom.generator
    report = ValidationReport("moment matching")
    F, G, H = rom.realization()
    moment = system.C @ solve_sylvester(system.A, system.B, generator.L, generator.S)

    try:
        P_prime = solve_sylvester(F, G, generator.L, generator.S)
    except SpectralCollisionError as exc:
        report.fail(f"reduced-model Sylvester equation is singular: {exc}")
    else:
        moment_error = float(np.linalg.norm(H @ P_prime - moment))
        report.details['moment_error'] = moment_error
        report.details['p_prime_identity_error'] = float(np.linalg.norm(P_prime - np.eye(generator.nu)))
        if moment_error > tol * (1.0 + float(np.linalg.norm(moment))):
            report.fail(f"H P' differs from C Pi by {moment_error:.3e}")

    errors = []
    for s in eigenvalues(generator.S):
        full = transfer_value(system, s)
        reduced = transfer_value(rom, s)
        err = abs(full - reduced)
        errors.append({'s': s, 'full': full, 'reduced': reduced, 'error': err})
        if err > tol * (1.0 + abs(full)):
            report.fail(f"transfer mismatch {err:.3e} at s = {s:.6g}")
    report.details['transfer_errors'] = errors
    return report
