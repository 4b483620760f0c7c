"""
Coupled Plant + Observer Integration
Fixed-step classical RK4 on the linear (plant, observer) system, the J
performance measure and CSV export of traces.

The coupled system is linear with an additive forcing, so one RK4 step is an
exact matrix recurrence z+ = R z + E0 b(t) + E_half b(t + h/2) + E1 b(t + h).
The propagators are assembled once per run.

Measurement noise enters only the observer. Its response is integrated for a
unit-variance realization and scaled afterwards so the realized SNR on the
sample grid equals the target.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from ..core.linalg import as_column, spectral_radius
from ..exceptions import ConfigError, DimensionError, NumericalError
from ..systems.models import LowDimObserver, StateSpaceSystem
from .noise import NoiseSpec, noise_scale, snr_db, unit_noise
from .schedule import InputSchedule

logger = logging.getLogger(__name__)

STABILITY_LIMIT = 2.0
ACCURACY_LIMIT = 1.0
KEEP_STATES_LIMIT = 2_000_000
CHUNK = 1024


@dataclass(frozen=True, eq=False)
class SimTrace:
    """
    Sampled trajectories of one run on the grid t_k = k h.

    Attributes:
        times: Grid
        u: Applied input
        y: Clean plant output
        y_meas: Output fed to the observer
        xi: Observer state per time (T x m)
        lift: n x m map from observer state to state estimate
        x: Plant state per time (T x n), None when not retained
        x_norm: ||x(t_k)||
        error_norm: ||x(t_k) - lift xi(t_k)||
        J: 100 error_norm / max_k ||x(t_k)||, None when x is identically zero
        snr_db: Realized SNR, None without noise
        noise_scale: Factor applied to the unit noise realization
        x0: Plant initial state
        xi0: Observer initial state
    """
    times: np.ndarray
    u: np.ndarray
    y: np.ndarray
    y_meas: np.ndarray
    xi: np.ndarray
    lift: np.ndarray
    x: Optional[np.ndarray]
    x_norm: np.ndarray
    error_norm: np.ndarray
    J: Optional[np.ndarray]
    snr_db: Optional[float]
    noise_scale: float
    x0: np.ndarray
    xi0: np.ndarray

    @property
    def h(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    @property
    def x_hat(self) -> np.ndarray:
        """State estimate lift xi per time (T x n)."""
        return self.xi @ self.lift.T


@dataclass(frozen=True)
class _ObserverModel:
    # xi' = F xi + G u + K y_meas, x_hat = lift xi
    F: np.ndarray
    G: np.ndarray
    K: np.ndarray
    lift: np.ndarray


def rk4_propagators(M: np.ndarray, h: float):
    """
    One-step RK4 matrices for z' = M z + b(t).

    Returns:
        (R, E0, E_half, E1)
    """
    dim = M.shape[0]
    I = np.eye(dim)
    N = h * M
    N2 = N @ N
    N3 = N2 @ N
    R = I + N + N2 / 2.0 + N3 / 6.0 + (N3 @ N) / 24.0
    E0 = (h / 6.0) * (I + N + N2 / 2.0 + N3 / 4.0)
    E_half = (h / 6.0) * (4.0 * I + 2.0 * N + N2 / 2.0)
    E1 = (h / 6.0) * I
    return R, E0, E_half, E1


def _time_grid(h: float, t_final: float) -> np.ndarray:
    if h <= 0:
        raise ConfigError(f"step h must be positive, got {h}")
    if t_final <= 0:
        raise ConfigError(f"t_final must be positive, got {t_final}")
    steps = int(round(t_final / h))
    if steps < 1 or abs(steps * h - t_final) > 1e-9 * max(1.0, t_final):
        raise ConfigError(f"t_final={t_final} is not a whole number of steps h={h}")
    return np.arange(steps + 1) * h


def _stability_guard(A: np.ndarray, F: np.ndarray, h: float) -> None:
    rho = max(spectral_radius(A), spectral_radius(F))
    if h * rho >= STABILITY_LIMIT:
        raise NumericalError(
            f"step h={h} too large: h * spectral radius = {h * rho:.3g} >= {STABILITY_LIMIT}"
        )
    if h * rho > ACCURACY_LIMIT:
        warnings.warn(f"h * spectral radius = {h * rho:.3g} exceeds {ACCURACY_LIMIT}; accuracy may suffer")


def _initial(vec, size: int, name: str) -> np.ndarray:
    if vec is None:
        return np.zeros(size)
    vec = np.asarray(vec, dtype=float).ravel()
    if vec.size != size:
        raise DimensionError(f"{name} must have {size} entries, got {vec.size}")
    return vec


def _simulate(system: StateSpaceSystem, model: _ObserverModel, schedule: InputSchedule,
              noise: Optional[NoiseSpec], h: float, t_final: Optional[float],
              x0, xi0, keep_states: Optional[bool]) -> SimTrace:
    A, B, C = system.realization()
    n, m = system.n, model.F.shape[0]
    t_final = schedule.t_final if t_final is None else t_final
    times = _time_grid(h, t_final)
    T = times.size
    _stability_guard(A, model.F, h)
    if keep_states is None:
        keep_states = n * T <= KEEP_STATES_LIMIT

    x0 = _initial(x0, n, "x0")
    xi0 = _initial(xi0, m, "xi0")
    noisy = noise is not None and not (math.isinf(noise.snr_db) and noise.snr_db > 0)
    dim = n + m + (m if noisy else 0)

    # z = (x, xi driven by the clean output, unit-noise response)
    M = np.zeros((dim, dim))
    M[:n, :n] = A
    M[n:n + m, :n] = model.K @ C
    M[n:n + m, n:n + m] = model.F
    bu = np.zeros(dim)
    bu[:n] = B[:, 0]
    bu[n:n + m] = model.G[:, 0]
    if noisy:
        M[n + m:, n + m:] = model.F
    R, E0, E_half, E1 = rk4_propagators(M, h)
    r0, r_half, r1 = E0 @ bu, E_half @ bu, E1 @ bu
    r_eta = None
    if noisy:
        # noise is held over each step
        b_eta = np.zeros(dim)
        b_eta[n + m:] = model.K[:, 0]
        r_eta = (E0 + E_half + E1) @ b_eta

    u = schedule.evaluate(times)
    u_half = schedule.evaluate(times[:-1] + h / 2.0)
    eta = unit_noise(noise, times) if noisy else np.zeros(T)

    lift = model.lift
    xi_clean = np.empty((T, m))
    zeta = np.empty((T, m)) if noisy else None
    x_store = np.empty((T, n)) if keep_states else None
    y = np.empty(T)
    aa = np.empty(T)
    ap = np.zeros(T)
    pp = np.zeros(T)
    xx = np.empty(T)

    z = np.concatenate([x0, xi0, np.zeros(m)]) if noisy else np.concatenate([x0, xi0])
    buffer = np.empty((CHUNK, dim))
    start = 0
    for k in range(T):
        buffer[k - start] = z
        if k - start == CHUNK - 1 or k == T - 1:
            block = buffer[:k - start + 1]
            sl = slice(start, k + 1)
            xs = block[:, :n]
            xi_clean[sl] = block[:, n:n + m]
            a = xs - block[:, n:n + m] @ lift.T
            y[sl] = xs @ C[0]
            xx[sl] = np.einsum('ij,ij->i', xs, xs)
            aa[sl] = np.einsum('ij,ij->i', a, a)
            if noisy:
                zeta[sl] = block[:, n + m:]
                p = block[:, n + m:] @ lift.T
                ap[sl] = np.einsum('ij,ij->i', a, p)
                pp[sl] = np.einsum('ij,ij->i', p, p)
            if keep_states:
                x_store[sl] = xs
            if not (np.all(np.isfinite(xx[sl])) and np.all(np.isfinite(aa[sl]))):
                bad = start + int(np.argmin(np.isfinite(xx[sl]) & np.isfinite(aa[sl])))
                raise NumericalError(f"non-finite state at t={times[bad]:.6g}")
            start = k + 1
        if k < T - 1:
            z = R @ z + r0 * u[k] + r_half * u_half[k] + r1 * u[k + 1]
            if noisy:
                z = z + r_eta * eta[k]

    scale, realized = 0.0, None
    y_meas = y.copy()
    xi = xi_clean
    err_sq = aa
    if noisy:
        scale = noise_scale(y, eta, noise.snr_db)
        y_meas = y + scale * eta
        realized = snr_db(y, scale * eta)
        xi = xi_clean + scale * zeta
        err_sq = aa - 2.0 * scale * ap + scale ** 2 * pp
    error_norm = np.sqrt(np.maximum(err_sq, 0.0))
    x_norm = np.sqrt(xx)
    peak = float(np.max(x_norm))
    J = 100.0 * error_norm / peak if peak > 0 else None

    logger.info("integrated %d steps (h=%g, n=%d, observer dim=%d)%s", T - 1, h, n, m,
                f", realized SNR {realized:.3f} dB" if realized is not None else "")
    return SimTrace(
        times=times, u=u, y=y, y_meas=y_meas, xi=xi, lift=np.array(lift), x=x_store,
        x_norm=x_norm, error_norm=error_norm, J=J, snr_db=realized, noise_scale=scale,
        x0=x0, xi0=xi0,
    )


def integrate(system: StateSpaceSystem, observer: LowDimObserver, schedule: InputSchedule,
              noise: Optional[NoiseSpec] = None, h: float = 0.01, t_final: Optional[float] = None,
              x0=None, xi0=None, keep_states: Optional[bool] = None) -> SimTrace:
    """
    Simulate the plant driven by ``schedule`` together with the observer.

    Args:
        system: Plant
        observer: Low-dimensional observer
        schedule: Input u(t)
        noise: Output noise seen by the observer, None for clean measurements
        h: Step size
        t_final: Horizon, the schedule's end by default
        x0: Plant initial state (zeros by default)
        xi0: Observer initial state (zeros by default)
        keep_states: Retain the full plant state; automatic when None

    Returns:
        SimTrace

    Raises:
        NumericalError: step-size guard tripped or non-finite values mid-run
    """
    if observer.n != system.n:
        raise DimensionError(f"observer lifts to n={observer.n}, plant has n={system.n}")
    model = _ObserverModel(F=observer.state_matrix, G=observer.G, K=observer.K, lift=observer.Pi)
    return _simulate(system, model, schedule, noise, h, t_final, x0, xi0, keep_states)


def integrate_full_order(system: StateSpaceSystem, M, schedule: InputSchedule,
                         noise: Optional[NoiseSpec] = None, h: float = 0.01, t_final: Optional[float] = None,
                         x0=None, x_hat0=None, keep_states: Optional[bool] = None) -> SimTrace:
    """
    Same run with the full-order Luenberger observer x_hat' = A x_hat + B u + M (y_meas - C x_hat).

    The trace's ``xi`` holds x_hat and ``lift`` is the identity.
    """
    M = as_column(M, "M")
    if M.shape != (system.n, 1):
        raise DimensionError(f"M must be {system.n}x1, got {M.shape}")
    model = _ObserverModel(F=system.A - M @ system.C, G=np.array(system.B), K=M, lift=np.eye(system.n))
    return _simulate(system, model, schedule, noise, h, t_final, x0, x_hat0, keep_states)


def compute_J(trace: SimTrace) -> np.ndarray:
    """
    J(t_k) = 100 ||x(t_k) - x_hat(t_k)|| / max_k ||x(t_k)||.

    Raises:
        NumericalError: the state is identically zero
    """
    peak = float(np.max(trace.x_norm))
    if peak == 0.0:
        raise NumericalError("state trace is identically zero; J is undefined")
    return 100.0 * trace.error_norm / peak


def segment_summary(trace: SimTrace, schedule: InputSchedule) -> List[Dict[str, Union[str, float, None]]]:
    """Maximum J within each schedule segment."""
    J = trace.J
    idx = schedule.segment_index(trace.times)
    summary = []
    for k, seg in enumerate(schedule.segments):
        mask = idx == k
        max_J = float(np.max(J[mask])) if J is not None and np.any(mask) else None
        summary.append({'kind': seg.kind, 't_start': seg.t_start, 't_end': seg.t_end, 'max_J': max_J})
    return summary


def write_trace_csv(trace: SimTrace, path: Union[str, Path], full_state: bool = False) -> Path:
    """
    Write ``t,u,y,y_meas,J,normE`` and optionally the full state columns.

    J is written as nan when undefined.
    """
    path = Path(path)
    J = trace.J if trace.J is not None else np.full(trace.times.shape, np.nan)
    columns = [trace.times, trace.u, trace.y, trace.y_meas, J, trace.error_norm]
    header = ['t', 'u', 'y', 'y_meas', 'J', 'normE']
    if full_state:
        if trace.x is None:
            raise ValueError("full-state export needs a trace run with keep_states=True")
        columns += list(trace.x.T) + list(trace.xi.T)
        header += [f"x_{i}" for i in range(trace.x.shape[1])]
        header += [f"xi_{j}" for j in range(trace.xi.shape[1])]
    np.savetxt(path, np.column_stack(columns), delimiter=',', header=','.join(header),
               comments='', fmt='%.17g', newline='\n')
    return path


def write_bound_csv(times, bound, error_norm, path: Union[str, Path]) -> Path:
    """Write ``t,bound,normE``."""
    path = Path(path)
    data = np.column_stack([np.ravel(times), np.ravel(bound), np.ravel(error_norm)])
    np.savetxt(path, data, delimiter=',', header='t,bound,normE', comments='', fmt='%.17g', newline='\n')
    return path
