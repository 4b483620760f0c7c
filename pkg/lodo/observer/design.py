"""
Low-Dimensional Observer Design
Observer construction, gain existence tests, SISO pole placement and the
full-order Luenberger baseline.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.signal import place_poles

from ..core.linalg import (
    as_column,
    as_matrix,
    eigenvalues,
    identity_if_none,
    is_conjugate_closed,
    is_hurwitz,
    pbh_detectable,
    pbh_observable,
    solve_lyapunov,
    spectra_match,
    spectral_abscissa,
)
from ..exceptions import DimensionError, PlacementError
from ..systems.models import LowDimObserver, ReducedOrderModel, SignalGenerator, StateSpaceSystem

logger = logging.getLogger(__name__)

DEFAULT_GAIN = 100.0
PLACEMENT_TOL = 1e-6


def constant_gain(nu: int, value: float = DEFAULT_GAIN) -> np.ndarray:
    """Constant-vector gain K = value * [1 ... 1]^T."""
    return np.full((nu, 1), float(value))


def build_observer(rom: ReducedOrderModel, K, margin: float = 0.0) -> LowDimObserver:
    """
    Build the observer of dimension nu from a reduced model and a gain.

    Certification (Hurwitz state matrix) is recorded, not enforced.

    Args:
        rom: Moment-matching reduced model
        K: nu x 1 output-injection gain
        margin: Hurwitz certification margin

    Returns:
        LowDimObserver with state matrix S - G L - K C Pi
    """
    K = as_column(K, "K")
    if K.shape != (rom.nu, 1):
        raise DimensionError(f"K must be {rom.nu}x1, got {K.shape}")
    observer = LowDimObserver(
        generator=rom.generator, G=rom.G, K=K, output_map=rom.H, Pi=rom.Pi, margin=margin,
    )
    abscissa = observer.spectral_abscissa
    if observer.certified:
        logger.info("observer nu=%d certified, spectral abscissa %.4g", rom.nu, abscissa)
    else:
        logger.warning("observer nu=%d NOT certified, spectral abscissa %.4g", rom.nu, abscissa)
    return observer


def certify(observer: LowDimObserver, margin: Optional[float] = None) -> Tuple[bool, float]:
    """Return (is_hurwitz, spectral abscissa) of the observer state matrix."""
    margin = observer.margin if margin is None else margin
    return is_hurwitz(observer.state_matrix, margin), observer.spectral_abscissa


def _output_row(moment) -> np.ndarray:
    moment = as_matrix(moment, "moment")
    if moment.shape[0] != 1:
        raise DimensionError(f"moment must be a single row, got {moment.shape}")
    return moment


def check_gain_existence(generator: SignalGenerator, moment) -> bool:
    """
    Whether some (G, K) makes the error system Hurwitz.

    True iff (S, [L; C Pi]) is detectable.
    """
    stacked = np.vstack([generator.L, _output_row(moment)])
    return pbh_detectable(generator.S, stacked)


def check_gain_given_G(generator: SignalGenerator, G, moment) -> bool:
    """For fixed G, a stabilizing K exists iff (S - G L, C Pi) is detectable."""
    G = as_column(G, "G")
    return pbh_detectable(generator.S - G @ generator.L, _output_row(moment))


def check_gain_given_K(generator: SignalGenerator, K, moment) -> bool:
    """For fixed K, a stabilizing G exists iff (S - K C Pi, L) is detectable."""
    K = as_column(K, "K")
    return pbh_detectable(generator.S - K @ _output_row(moment), generator.L)


def _check_poles(poles: Sequence[complex], count: int) -> np.ndarray:
    poles = np.asarray(poles, dtype=complex).ravel()
    if poles.size != count:
        raise PlacementError(f"expected {count} desired poles, got {poles.size}")
    if np.any(poles.real >= 0):
        raise PlacementError("desired poles must lie in the open left half-plane")
    if not is_conjugate_closed(poles):
        raise PlacementError("desired poles must be closed under conjugation")
    return poles


def _place_output_injection(F: np.ndarray, H: np.ndarray, poles: np.ndarray) -> np.ndarray:
    """Gain M with sigma(F - M H) = poles, by duality with state feedback."""
    if not pbh_observable(F, H):
        raise PlacementError("pair is not observable; poles cannot be assigned")
    # place against a unit-norm output row, then undo the scaling
    scale = float(np.linalg.norm(H))
    try:
        result = place_poles(F.T, (H / scale).T, poles)
    except ValueError as exc:
        raise PlacementError(f"pole placement failed: {exc}") from exc
    M = result.gain_matrix.T / scale
    placed = eigenvalues(F - M @ H)
    if not spectra_match(placed, poles, PLACEMENT_TOL):
        raise PlacementError(f"placed spectrum {placed} misses desired poles {poles}")
    return M


def design_K_pole_placement(generator: SignalGenerator, G, moment, desired_poles) -> np.ndarray:
    """
    Observer gain K with sigma(S - G L - K C Pi) equal to the desired poles.

    Args:
        generator: Signal generator
        G: nu x 1 reduced-model parameter
        moment: 1 x nu output map C Pi
        desired_poles: nu poles in the open left half-plane, conjugate-closed

    Returns:
        nu x 1 array

    Raises:
        PlacementError: unobservable pair, invalid or repeated poles
    """
    G = as_column(G, "G")
    H = _output_row(moment)
    poles = _check_poles(desired_poles, generator.nu)
    return _place_output_injection(generator.S - G @ generator.L, H, poles)


def design_G_given_K(generator: SignalGenerator, K, moment, desired_poles) -> np.ndarray:
    """
    Reduced-model parameter G with sigma(S - K C Pi - G L) equal to the desired poles.

    Placement on the pair (S - K C Pi, L).
    """
    K = as_column(K, "K")
    H = _output_row(moment)
    poles = _check_poles(desired_poles, generator.nu)
    return _place_output_injection(generator.S - K @ H, generator.L, poles)


def design_K_lyapunov(rom: ReducedOrderModel, system: StateSpaceSystem, kappa: float = 1.0, Q=None) -> np.ndarray:
    """
    Gain K = kappa (Pi^T P Pi)^-1 (C Pi)^T.

    With G from ``design_G_stabilizing`` for the same Q, Pi^T P Pi is a
    Lyapunov matrix of S - G L, and this K keeps it one for S - G L - K C Pi
    for every kappa >= 0.
    """
    if not (kappa >= 0 and np.isfinite(kappa)):
        raise ValueError(f"kappa must be finite and non-negative, got {kappa}")
    P = solve_lyapunov(system.A, identity_if_none(Q, system.n))
    gram = rom.Pi.T @ P @ rom.Pi
    return kappa * np.linalg.solve(gram, rom.H.T)


def lift_state(Pi, xi_hat) -> np.ndarray:
    """
    Full-state estimate x_hat = Pi xi_hat.

    Args:
        Pi: n x nu lift
        xi_hat: nu-vector, or a (T x nu) array of observer states

    Returns:
        n-vector, or T x n array
    """
    Pi = as_matrix(Pi, "Pi")
    xi_hat = np.asarray(xi_hat, dtype=float)
    if xi_hat.shape[-1] != Pi.shape[1]:
        raise DimensionError(f"xi_hat must have {Pi.shape[1]} entries, got shape {xi_hat.shape}")
    if xi_hat.ndim == 1:
        return Pi @ xi_hat
    return xi_hat @ Pi.T


def design_full_observer(system: StateSpaceSystem, desired_poles: Optional[Sequence[complex]] = None) -> np.ndarray:
    """
    Gain M of the full-order Luenberger observer x_hat' = A x_hat + B u + M (y - C x_hat).

    ``desired_poles=None`` returns M = 0, which is a valid observer because
    A is Hurwitz.

    Returns:
        n x 1 array

    Raises:
        PlacementError: placement fails or misses the requested poles
    """
    if desired_poles is None:
        M = np.zeros((system.n, 1))
        logger.debug("full-order observer with M = 0, abscissa %.4g", spectral_abscissa(system.A))
        return M
    poles = _check_poles(desired_poles, system.n)
    return _place_output_injection(np.array(system.A), np.array(system.C), poles)
