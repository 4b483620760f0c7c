"""
Dense Linear-Algebra Kernels
Eigenvalues, Sylvester and Lyapunov solvers, matrix exponential, PBH tests.

All functions are pure: inputs are never modified and results are fresh arrays.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
import scipy.linalg as spla

from ..exceptions import (
    ConvergenceError,
    DefinitenessError,
    DimensionError,
    NotHurwitzError,
    NumericalError,
    SpectralCollisionError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    """Documented thresholds shared by the kernels.

    Attributes:
        rank_rtol: Singular values below ``rank_rtol * (s_max + 1)`` count as zero
        residual: Relative residual bound for Sylvester and Lyapunov solves
        spectral_gap: Absolute complex distance under which eigenvalues collide
        marginal: Eigenvalues with ``Re >= -marginal`` are treated as non-stable in PBH tests
        symmetry: Relative asymmetry accepted for matrices required to be symmetric
    """
    rank_rtol: float = 1e-8
    residual: float = 1e-9
    spectral_gap: float = 1e-8
    marginal: float = 1e-9
    symmetry: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()
MODAL_COND_LIMIT = 1e10


def as_matrix(M, name: str = "M") -> np.ndarray:
    """
    Convert array-like input to a finite 2-D float64 array.

    Scalars become 1x1 and 1-D input becomes a single row.

    Args:
        M: Array-like input
        name: Name used in error messages

    Returns:
        New 2-D float array
    """
    arr = np.array(M, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got {arr.ndim}-D")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} has non-finite entries")
    return arr


def as_column(v, name: str = "v") -> np.ndarray:
    """Convert a vector-like input to an n x 1 float column."""
    arr = np.array(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2 or arr.shape[1] != 1:
        raise DimensionError(f"{name} must be a column vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} has non-finite entries")
    return arr


def _require_square(M: np.ndarray, name: str) -> int:
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M.shape[0]


def eigenvalues(M) -> np.ndarray:
    """
    Compute all eigenvalues of a real square matrix.

    LAPACK reduces to Hessenberg form and runs the shifted QR iteration
    (capped at 30 sweeps per eigenvalue); complex pairs come back as exact
    conjugates for real input.

    Args:
        M: Square real matrix

    Returns:
        Complex 1-D array of length n

    Raises:
        DimensionError: M is not square
        ConvergenceError: QR iteration did not converge
    """
    M = as_matrix(M, "M")
    _require_square(M, "M")
    try:
        return spla.eigvals(M).astype(complex)
    except spla.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc


def spectral_abscissa(M) -> float:
    """Largest real part of the spectrum of M."""
    return float(np.max(eigenvalues(M).real))


def spectral_radius(M) -> float:
    """Largest eigenvalue modulus of M."""
    return float(np.max(np.abs(eigenvalues(M))))


def is_hurwitz(M, margin: float = 0.0) -> bool:
    """
    Check whether every eigenvalue of M satisfies Re(lambda) < -margin.

    Args:
        M: Square matrix
        margin: Non-negative stability margin

    Returns:
        True iff the spectral abscissa is below -margin
    """
    if margin < 0:
        raise ValueError("margin must be non-negative")
    return spectral_abscissa(M) < -margin


def min_spectral_distance(first: Iterable[complex], second: Iterable[complex]) -> float:
    """Smallest complex distance between two eigenvalue sets."""
    a = np.asarray(list(first), dtype=complex).reshape(-1, 1)
    b = np.asarray(list(second), dtype=complex).reshape(1, -1)
    if a.size == 0 or b.size == 0:
        return float("inf")
    return float(np.min(np.abs(a - b)))


def numerical_rank(M, rtol: float = DEFAULT_TOLERANCES.rank_rtol, relative: bool = False) -> int:
    """
    Rank by singular-value threshold.

    Singular values below ``rtol * (s_max + 1)`` count as zero. With
    ``relative=True`` the threshold is ``rtol * s_max``, which does not depend
    on the scale of M; the Sylvester solution Pi of a physically scaled plant
    needs that form.
    """
    sv = spla.svdvals(np.atleast_2d(M))
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    threshold = rtol * sv[0] if relative else rtol * (sv[0] + 1.0)
    return int(np.sum(sv > threshold))


def solve_sylvester(A, B, L, S, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Solve A Pi + B L = Pi S for Pi.

    The equation is vectorized as (I kron A - S^T kron I) vec(Pi) = -vec(B L)
    and solved densely; the generator dimension is small, so the n*nu system
    stays cheap.

    Args:
        A: n x n matrix
        B: n x m matrix
        L: m x nu matrix
        S: nu x nu matrix
        tolerances: Gap and residual thresholds

    Returns:
        Pi as an n x nu array

    Raises:
        SpectralCollisionError: sigma(A) and sigma(S) overlap within tolerance
        NumericalError: The residual post-condition fails
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B") if np.ndim(B) == 2 else as_column(B, "B")
    L = as_matrix(L, "L")
    S = as_matrix(S, "S")
    n = _require_square(A, "A")
    nu = _require_square(S, "S")
    if B.shape[0] != n or L.shape[1] != nu or B.shape[1] != L.shape[0]:
        raise DimensionError(
            f"inconsistent shapes A{A.shape} B{B.shape} L{L.shape} S{S.shape}"
        )

    gap = min_spectral_distance(eigenvalues(A), eigenvalues(S))
    if gap < tolerances.spectral_gap:
        raise SpectralCollisionError(
            f"interpolation point collides with plant pole (spectral distance {gap:.3e})"
        )

    lhs = np.kron(np.eye(nu), A) - np.kron(S.T, np.eye(n))
    rhs = -(B @ L).reshape(-1, order="F")
    try:
        vec_pi = spla.solve(lhs, rhs)
    except spla.LinAlgError as exc:
        raise SpectralCollisionError(
            "interpolation point collides with plant pole (singular Sylvester operator)"
        ) from exc
    Pi = vec_pi.reshape((n, nu), order="F")

    residual = np.linalg.norm(A @ Pi + B @ L - Pi @ S)
    scale = 1.0 + np.linalg.norm(A) * np.linalg.norm(Pi) + np.linalg.norm(Pi) * np.linalg.norm(S)
    logger.debug("Sylvester n=%d nu=%d gap=%.3e residual=%.3e", n, nu, gap, residual)
    if not np.isfinite(residual) or residual > tolerances.residual * scale:
        raise NumericalError(
            f"Sylvester residual {residual:.3e} exceeds {tolerances.residual:.0e} * {scale:.3e}; "
            "interpolation point is too close to a plant pole"
        )
    return Pi


def check_spd(Q, name: str = "Q", tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Verify that Q is symmetric positive definite.

    Returns:
        The symmetrized matrix

    Raises:
        DefinitenessError: Q is asymmetric or not positive definite
    """
    Q = as_matrix(Q, name)
    _require_square(Q, name)
    asym = np.linalg.norm(Q - Q.T)
    if asym > tolerances.symmetry * (1.0 + np.linalg.norm(Q)):
        raise DefinitenessError(f"{name} is not symmetric (asymmetry {asym:.3e})")
    Q = 0.5 * (Q + Q.T)
    try:
        spla.cholesky(Q)
    except spla.LinAlgError as exc:
        raise DefinitenessError(f"{name} is not positive definite") from exc
    return Q


def solve_lyapunov(A, Q, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Solve A^T P + P A = -Q for symmetric positive definite P.

    Args:
        A: Hurwitz n x n matrix
        Q: Symmetric positive definite n x n matrix

    Returns:
        P, symmetric positive definite

    Raises:
        NotHurwitzError: A has an eigenvalue with non-negative real part
        DefinitenessError: Q is not SPD
        NumericalError: residual or definiteness post-condition fails
    """
    A = as_matrix(A, "A")
    n = _require_square(A, "A")
    Q = check_spd(Q, "Q", tolerances)
    if Q.shape[0] != n:
        raise DimensionError(f"Q must be {n}x{n}, got {Q.shape}")
    abscissa = spectral_abscissa(A)
    if abscissa >= 0:
        raise NotHurwitzError(f"A is not Hurwitz (spectral abscissa {abscissa:.3e})")

    # scipy solves a X + X a^H = q
    P = spla.solve_continuous_lyapunov(A.T, -Q)
    P = 0.5 * (P + P.T)

    residual = np.linalg.norm(A.T @ P + P @ A + Q)
    scale = 1.0 + np.linalg.norm(A) * np.linalg.norm(P)
    lam_min = float(np.min(np.linalg.eigvalsh(P)))
    logger.debug("Lyapunov n=%d residual=%.3e min eig=%.3e", n, residual, lam_min)
    if residual > tolerances.residual * scale:
        raise NumericalError(f"Lyapunov residual {residual:.3e} exceeds bound")
    if lam_min <= 0:
        raise NumericalError(f"Lyapunov solution is not positive definite (min eig {lam_min:.3e})")
    return P


def matrix_exponential(M, t: float = 1.0) -> np.ndarray:
    """
    Compute exp(M t) by scaling and squaring.

    Raises:
        NumericalError: t is not finite or the result overflows
    """
    M = as_matrix(M, "M")
    _require_square(M, "M")
    if not np.isfinite(t):
        raise NumericalError("t must be finite")
    with np.errstate(over="ignore", invalid="ignore"):
        result = spla.expm(M * t)
    if not np.all(np.isfinite(result)):
        raise NumericalError(f"matrix exponential overflowed for ||M t|| = {np.linalg.norm(M) * abs(t):.3e}")
    return result


def _unit_rows(C: np.ndarray) -> np.ndarray:
    # row scaling leaves the rank unchanged
    norms = np.linalg.norm(C, axis=1, keepdims=True)
    return np.where(norms > 0, C / np.where(norms > 0, norms, 1.0), 0.0)


def _pbh_full_rank(S: np.ndarray, C: np.ndarray, lams: np.ndarray, rtol: float,
                   normalize: bool = True) -> bool:
    nu = S.shape[0]
    C = (_unit_rows(C) if normalize else C).astype(complex)
    for lam in lams:
        stacked = np.vstack([S - lam * np.eye(nu), C])
        if numerical_rank(stacked, rtol) < nu:
            return False
    return True


def _pbh_modal(A: np.ndarray, C: np.ndarray, tolerances: Tolerances) -> Optional[bool]:
    """
    Eigenvector form of the PBH test: every right eigenvector must be seen by C.

    Returns None when the spectrum is not well separated or the eigenvector
    basis is ill-conditioned; callers then fall back to the rank test.
    """
    lams, V = spla.eig(A)
    if lams.size > 1:
        gaps = np.abs(lams[:, None] - lams[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() < np.sqrt(tolerances.spectral_gap) * (1.0 + np.max(np.abs(lams))):
            return None
    if np.linalg.cond(V) > MODAL_COND_LIMIT:
        return None
    seen = np.max(np.abs(_unit_rows(C) @ V), axis=0)
    return bool(np.all(seen > tolerances.rank_rtol))


def pbh_detectable(S, Cstack, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """
    PBH detectability test of the pair (S, Cstack).

    Args:
        S: nu x nu matrix
        Cstack: m x nu output matrix

    Returns:
        True iff rank([S - lambda I; Cstack]) = nu at every eigenvalue with
        Re(lambda) >= 0 (eigenvalues within ``tolerances.marginal`` of the axis
        are included)

    Rows are not rescaled: an output row at roundoff level does not detect a
    mode, whatever its direction.
    """
    S = as_matrix(S, "S")
    C = as_matrix(Cstack, "Cstack")
    nu = _require_square(S, "S")
    if C.shape[1] != nu:
        raise DimensionError(f"Cstack must have {nu} columns, got {C.shape[1]}")
    lams = eigenvalues(S)
    unstable = lams[lams.real >= -tolerances.marginal]
    return _pbh_full_rank(S, C, unstable, tolerances.rank_rtol, normalize=False)


def pbh_observable(A, C, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """PBH observability test of (A, C) over the whole spectrum."""
    A = as_matrix(A, "A")
    C = as_matrix(C, "C")
    n = _require_square(A, "A")
    if C.shape[1] != n:
        raise DimensionError(f"C must have {n} columns, got {C.shape[1]}")
    try:
        modal = _pbh_modal(A, C, tolerances)
    except spla.LinAlgError:
        modal = None
    if modal is not None:
        return modal
    return _pbh_full_rank(A, C, eigenvalues(A), tolerances.rank_rtol)


def pbh_controllable(A, B, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """PBH controllability test of (A, B), via duality."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B") if np.ndim(B) == 2 else as_column(B, "B")
    return pbh_observable(A.T, B.T, tolerances)


def spectra_match(actual, desired, tol: float) -> bool:
    """
    Compare two eigenvalue multisets up to ordering.

    Each desired pole is greedily paired with its nearest unused actual pole.
    The tolerance is relative to ``1 + max |desired|``.
    """
    actual = list(np.asarray(actual, dtype=complex))
    desired = np.asarray(desired, dtype=complex)
    if len(actual) != desired.size:
        return False
    scale = 1.0 + (float(np.max(np.abs(desired))) if desired.size else 0.0)
    for pole in desired:
        idx = int(np.argmin([abs(pole - a) for a in actual]))
        if abs(pole - actual[idx]) > tol * scale:
            return False
        actual.pop(idx)
    return True


def is_conjugate_closed(poles, tol: float = 1e-10) -> bool:
    """Check that the complex set is closed under conjugation."""
    poles = np.asarray(poles, dtype=complex)
    return spectra_match(np.conj(poles), poles, tol)


def kronecker_lyapunov(A, Q) -> np.ndarray:
    """
    Reference Lyapunov solve by Kronecker vectorization.

    Slower than ``solve_lyapunov``; kept as an independent cross-check.
    """
    A = as_matrix(A, "A")
    Q = as_matrix(Q, "Q")
    n = _require_square(A, "A")
    eye = np.eye(n)
    lhs = np.kron(eye, A.T) + np.kron(A.T, eye)
    vec_p = np.linalg.solve(lhs, -Q.reshape(-1, order="F"))
    return vec_p.reshape((n, n), order="F")


def block_lower_triangular(top_left, bottom_left, bottom_right) -> np.ndarray:
    """Assemble [[top_left, 0], [bottom_left, bottom_right]]."""
    top_left = as_matrix(top_left, "top_left")
    bottom_right = as_matrix(bottom_right, "bottom_right")
    bottom_left = as_matrix(bottom_left, "bottom_left")
    zeros = np.zeros((top_left.shape[0], bottom_right.shape[1]))
    return np.block([[top_left, zeros], [bottom_left, bottom_right]])


def identity_if_none(Q: Optional[np.ndarray], n: int) -> np.ndarray:
    """Return Q, or the n x n identity when Q is None."""
    return np.eye(n) if Q is None else as_matrix(Q, "Q")
