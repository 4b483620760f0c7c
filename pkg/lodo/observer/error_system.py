"""
Error System and ISS Constants
e = (x - Pi w, xi_hat - w) obeys e' = Xi e + Psi (u - L w), x - Pi xi_hat = Phi e.

A Lyapunov certificate P Xi + Xi^T P = -Q yields explicit constants c1, c2, c3
with ||x - Pi xi_hat|| <= c1 (||e_xw(0)|| + ||e_xiw(0)||) exp(-c2 t) + c3 ||u - L w||_t.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..core.linalg import (
    as_column,
    block_lower_triangular,
    identity_if_none,
    is_hurwitz,
    solve_lyapunov,
    spectral_abscissa,
)
from ..exceptions import CertificationError, DimensionError
from ..systems.models import ReducedOrderModel, SignalGenerator, StateSpaceSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ErrorSystem:
    """
    Certified error dynamics with its ISS constants.

    Attributes:
        Xi: (n+nu) x (n+nu) block lower-triangular state matrix [[A, 0], [K C, S - G L - K C Pi]]
        Psi: (n+nu) x 1 input map [B; G]
        Phi: n x (n+nu) output map [I, -Pi]
        P: Lyapunov certificate, P Xi + Xi^T P = -Q
        Q: SPD weight
        c1: Overshoot constant
        c2: Decay rate
        c3: Input gain
    """
    Xi: np.ndarray
    Psi: np.ndarray
    Phi: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    c1: float
    c2: float
    c3: float

    @property
    def n(self) -> int:
        return self.Phi.shape[0]

    @property
    def nu(self) -> int:
        return self.Phi.shape[1] - self.Phi.shape[0]

    @property
    def Pi(self) -> np.ndarray:
        return -self.Phi[:, self.n:]

    def lyapunov_residual(self) -> float:
        return float(np.linalg.norm(self.P @ self.Xi + self.Xi.T @ self.P + self.Q))

    def constants(self) -> dict:
        return {'c1': self.c1, 'c2': self.c2, 'c3': self.c3}


def iss_constants(P: np.ndarray, Q: np.ndarray, Phi: np.ndarray, Psi: np.ndarray):
    """
    c1 = ||Phi|| sqrt(lmax(P)/lmin(P)),
    c2 = lmin(Q) / (4 lmax(P)),
    c3 = (2 ||Phi|| ||P Psi|| / lmin(Q)) sqrt(lmax(P)/lmin(P)).

    Norms are spectral (2-norms).
    """
    lam_p = np.linalg.eigvalsh(P)
    lam_q_min = float(np.min(np.linalg.eigvalsh(Q)))
    p_min, p_max = float(lam_p[0]), float(lam_p[-1])
    phi_norm = float(np.linalg.norm(Phi, 2))
    ppsi_norm = float(np.linalg.norm(P @ Psi, 2))
    ratio = np.sqrt(p_max / p_min)
    c1 = phi_norm * ratio
    c2 = lam_q_min / (4.0 * p_max)
    c3 = 2.0 * phi_norm * ppsi_norm / lam_q_min * ratio
    return float(c1), float(c2), float(c3)


def assemble_error_system(system: StateSpaceSystem, generator: SignalGenerator,
                          rom: ReducedOrderModel, K, Q=None, margin: float = 0.0) -> ErrorSystem:
    """
    Assemble (Xi, Psi, Phi), solve the Lyapunov certificate and the ISS constants.

    Args:
        system: Plant
        generator: Signal generator of the reduced model
        rom: Reduced model (supplies G and Pi)
        K: nu x 1 observer gain
        Q: SPD (n+nu) x (n+nu) weight, identity by default
        margin: Hurwitz margin required of Xi

    Returns:
        ErrorSystem

    Raises:
        CertificationError: Xi is not Hurwitz
    """
    n, nu = system.n, generator.nu
    K = as_column(K, "K")
    if K.shape != (nu, 1):
        raise DimensionError(f"K must be {nu}x1, got {K.shape}")
    Pi = rom.Pi
    C = system.C
    observer_matrix = generator.S - rom.G @ generator.L - K @ C @ Pi

    Xi = block_lower_triangular(system.A, K @ C, observer_matrix)
    abscissa = spectral_abscissa(Xi)
    if not is_hurwitz(Xi, margin):
        raise CertificationError(
            f"observer uncertified: pick different G/K (error-system spectral abscissa {abscissa:.4g})"
        )

    Q = identity_if_none(Q, n + nu)
    if Q.shape != (n + nu, n + nu):
        raise DimensionError(f"Q must be {(n + nu)}x{(n + nu)}, got {Q.shape}")
    P = solve_lyapunov(Xi, Q)
    Psi = np.vstack([system.B, rom.G])
    Phi = np.hstack([np.eye(n), -Pi])
    c1, c2, c3 = iss_constants(P, Q, Phi, Psi)
    logger.info("error system certified: abscissa %.4g, c1=%.4g c2=%.4g c3=%.4g", abscissa, c1, c2, c3)
    return ErrorSystem(Xi=Xi, Psi=Psi, Phi=Phi, P=P, Q=Q, c1=c1, c2=c2, c3=c3)


def lyapunov_decrease_margin(err: ErrorSystem, e, w: float) -> float:
    """
    Slack of the dissipation inequality
    2 e^T P (Xi e + Psi w) <= -(lmin(Q)/2) ||e||^2 + (2 ||P Psi||^2 / lmin(Q)) w^2.

    Returns:
        right-hand side minus left-hand side (non-negative when the inequality holds)
    """
    e = np.asarray(e, dtype=float).reshape(-1)
    lam_q = float(np.min(np.linalg.eigvalsh(err.Q)))
    ppsi = float(np.linalg.norm(err.P @ err.Psi, 2))
    lhs = 2.0 * e @ err.P @ (err.Xi @ e + err.Psi[:, 0] * w)
    rhs = -0.5 * lam_q * float(e @ e) + 2.0 * ppsi ** 2 / lam_q * w ** 2
    return float(rhs - lhs)
