"""
Typed records for plants, signal generators, reduced-order models and observers.

All records are immutable: matrices are converted to read-only float arrays on
construction, so instances can be shared freely between threads.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from ..core.linalg import (
    DEFAULT_TOLERANCES,
    as_column,
    as_matrix,
    eigenvalues,
    is_hurwitz,
    min_spectral_distance,
    numerical_rank,
    spectral_abscissa,
)
from ..exceptions import DimensionError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def to_builtin(value: Any) -> Any:
    """Convert numpy values (complex as [re, im]) to JSON-serializable builtins."""
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass
class ValidationReport:
    """
    Outcome of a report-style check.

    Attributes:
        name: Which check produced the report
        is_valid: True when every hard requirement holds
        errors: Failed hard requirements
        warnings: Soft findings that do not fail the check
        details: Numeric diagnostics (JSON-serializable after ``to_dict``)
    """
    name: str
    is_valid: bool = True
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def fail(self, message: str) -> None:
        self.is_valid = False
        self.errors.append(message)

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def as_tuple(self) -> Tuple[bool, List[str]]:
        """Return the ``(is_valid, errors)`` pair."""
        return self.is_valid, list(self.errors)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'is_valid': self.is_valid,
            'errors': list(self.errors),
            'warnings': list(self.warnings),
            'details': to_builtin(self.details),
        }

    def summary(self) -> str:
        status = "PASS" if self.is_valid else "FAIL"
        lines = [f"[{status}] {self.name}"]
        lines += [f"  error: {e}" for e in self.errors]
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class StateSpaceSystem:
    """
    SISO plant x' = A x + B u, y = C x.

    Attributes:
        A: n x n state matrix
        B: n x 1 input map
        C: 1 x n output map
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_column(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape != (n, 1):
            raise DimensionError(f"B must be {n}x1, got {B.shape}")
        if C.shape != (1, n):
            raise DimensionError(f"C must be 1x{n}, got {C.shape}")
        object.__setattr__(self, 'A', _frozen(A))
        object.__setattr__(self, 'B', _frozen(B))
        object.__setattr__(self, 'C', _frozen(C))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def realization(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.A, self.B, self.C

    def spectrum(self) -> np.ndarray:
        return eigenvalues(self.A)


@dataclass(frozen=True, eq=False)
class SignalGenerator:
    """
    Autonomous input class w' = S w, u = L w.

    Attributes:
        S: nu x nu generator matrix; its eigenvalues are the interpolation points
        L: 1 x nu output row
    """
    S: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        S = as_matrix(self.S, "S")
        L = as_matrix(self.L, "L")
        nu = S.shape[0]
        if S.shape != (nu, nu):
            raise DimensionError(f"S must be square, got {S.shape}")
        if L.shape != (1, nu):
            raise DimensionError(f"L must be 1x{nu}, got {L.shape}")
        object.__setattr__(self, 'S', _frozen(S))
        object.__setattr__(self, 'L', _frozen(L))

    @property
    def nu(self) -> int:
        return self.S.shape[0]

    def spectrum(self) -> np.ndarray:
        return eigenvalues(self.S)


@dataclass(frozen=True, eq=False)
class ReducedOrderModel:
    """
    Moment-matching model xi' = F xi + G u, psi = H xi with F = S - G L, H = C Pi.

    F is derived from the generator and G on access, never stored.

    Attributes:
        generator: Signal generator defining the interpolation points
        G: nu x 1 free parameter
        H: 1 x nu output map (the moment C Pi)
        Pi: n x nu Sylvester solution
    """
    generator: SignalGenerator
    G: np.ndarray
    H: np.ndarray
    Pi: np.ndarray

    def __post_init__(self):
        nu = self.generator.nu
        G = as_column(self.G, "G")
        H = as_matrix(self.H, "H")
        Pi = as_matrix(self.Pi, "Pi")
        if G.shape != (nu, 1):
            raise DimensionError(f"G must be {nu}x1, got {G.shape}")
        if H.shape != (1, nu):
            raise DimensionError(f"H must be 1x{nu}, got {H.shape}")
        if Pi.shape[1] != nu:
            raise DimensionError(f"Pi must have {nu} columns, got {Pi.shape}")
        object.__setattr__(self, 'G', _frozen(G))
        object.__setattr__(self, 'H', _frozen(H))
        object.__setattr__(self, 'Pi', _frozen(Pi))

    @property
    def nu(self) -> int:
        return self.generator.nu

    @property
    def F(self) -> np.ndarray:
        return self.generator.S - self.G @ self.generator.L

    def realization(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.F, self.G, self.H

    def verify(self, system: StateSpaceSystem, tolerances=DEFAULT_TOLERANCES) -> ValidationReport:
        """
        Re-check the stored invariants against the plant the model was built from.

        Checks H = C Pi, the Sylvester residual, rank(Pi) = nu and
        sigma(S) disjoint from sigma(F).
        """
        report = ValidationReport("reduced-order model invariants")
        A, B, C = system.realization()
        S, L = self.generator.S, self.generator.L
        Pi = self.Pi
        if Pi.shape[0] != system.n:
            report.fail(f"Pi has {Pi.shape[0]} rows, plant has n={system.n}")
            return report

        h_err = float(np.linalg.norm(self.H - C @ Pi))
        report.details['output_map_error'] = h_err
        if h_err > tolerances.residual * (1.0 + np.linalg.norm(C) * np.linalg.norm(Pi)):
            report.fail(f"H differs from C Pi by {h_err:.3e}")

        residual = float(np.linalg.norm(A @ Pi + B @ L - Pi @ S))
        scale = 1.0 + np.linalg.norm(A) * np.linalg.norm(Pi) + np.linalg.norm(Pi) * np.linalg.norm(S)
        report.details['sylvester_residual'] = residual
        if residual > tolerances.residual * scale:
            report.fail(f"Sylvester residual {residual:.3e} exceeds bound")

        rank = numerical_rank(Pi, tolerances.rank_rtol, relative=True)
        report.details['rank_pi'] = rank
        if rank != self.nu:
            report.fail(f"rank(Pi) = {rank}, expected {self.nu}")

        gap = min_spectral_distance(eigenvalues(S), eigenvalues(self.F))
        report.details['interpolation_pole_gap'] = gap
        if gap < tolerances.spectral_gap:
            report.fail("sigma(S) and sigma(S - G L) intersect")
        return report


@dataclass(frozen=True, eq=False)
class LowDimObserver:
    """
    Observer xi_hat' = (S - G L) xi_hat + G u + K (y - C Pi xi_hat), x_hat = Pi xi_hat.

    Attributes:
        generator: Signal generator (S, L)
        G: nu x 1 reduced-model parameter
        K: nu x 1 output-injection gain
        output_map: 1 x nu matrix C Pi
        Pi: n x nu lift from observer state to plant state
        margin: Margin used for Hurwitz certification
    """
    generator: SignalGenerator
    G: np.ndarray
    K: np.ndarray
    output_map: np.ndarray
    Pi: np.ndarray
    margin: float = 0.0

    def __post_init__(self):
        nu = self.generator.nu
        G = as_column(self.G, "G")
        K = as_column(self.K, "K")
        H = as_matrix(self.output_map, "output_map")
        Pi = as_matrix(self.Pi, "Pi")
        if G.shape != (nu, 1) or K.shape != (nu, 1):
            raise DimensionError(f"G and K must be {nu}x1, got {G.shape} and {K.shape}")
        if H.shape != (1, nu) or Pi.shape[1] != nu:
            raise DimensionError(f"output map 1x{nu} and Pi n x {nu} expected")
        object.__setattr__(self, 'G', _frozen(G))
        object.__setattr__(self, 'K', _frozen(K))
        object.__setattr__(self, 'output_map', _frozen(H))
        object.__setattr__(self, 'Pi', _frozen(Pi))

    @property
    def nu(self) -> int:
        return self.generator.nu

    @property
    def n(self) -> int:
        return self.Pi.shape[0]

    @property
    def state_matrix(self) -> np.ndarray:
        """S - G L - K C Pi."""
        S, L = self.generator.S, self.generator.L
        return S - self.G @ L - self.K @ self.output_map

    @property
    def spectral_abscissa(self) -> float:
        return spectral_abscissa(self.state_matrix)

    @property
    def certified(self) -> bool:
        return is_hurwitz(self.state_matrix, self.margin)
