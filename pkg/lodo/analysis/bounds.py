"""
Estimation-Error Bounds
Chebyshev fit of the generator initial condition, the mismatch tau and the
exponential ISS bound evaluated on a time grid.

The essential supremum over continuous time is replaced by the maximum over the
sample grid, so tau is exact only up to the grid spacing.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from ..core.linalg import matrix_exponential, numerical_rank
from ..exceptions import DimensionError, NumericalError
from ..observer.error_system import ErrorSystem
from ..systems.models import LowDimObserver, SignalGenerator, ValidationReport

if TYPE_CHECKING:
    from ..simulation.integrator import SimTrace

logger = logging.getLogger(__name__)

METHODS = ('minimax', 'least-squares')
BOUND_SLACK = 1e-7
GRID_NOTE = "tau is the maximum over the sample grid; the continuous-time supremum can be larger by O(grid spacing)"


@dataclass(frozen=True, eq=False)
class Omega0Fit:
    """
    Best generator initial condition for a sampled input.

    Attributes:
        omega0: nu-vector
        tau: max over the grid of |u(t_k) - L exp(S t_k) omega0|
        grid: sample times
        method: 'minimax' or 'least-squares'
    """
    omega0: np.ndarray
    tau: float
    grid: np.ndarray
    method: str
    note: str = GRID_NOTE


@dataclass(frozen=True, eq=False)
class BoundTrace:
    """Bound values on a time grid."""
    times: np.ndarray
    values: np.ndarray
    tau: Union[float, np.ndarray]


def _split_samples(u_samples) -> Tuple[np.ndarray, np.ndarray]:
    samples = np.asarray(u_samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise DimensionError(f"u_samples must be (time, value) pairs, got shape {samples.shape}")
    times, values = samples[:, 0], samples[:, 1]
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise DimensionError("sample times must be strictly increasing")
    return times, values


def generator_regressor(times: np.ndarray, generator: SignalGenerator) -> np.ndarray:
    """
    Rows L exp(S t_k), one per sample time.

    Uniform grids propagate the row with a single one-step exponential.
    """
    S, L = generator.S, generator.L
    times = np.asarray(times, dtype=float)
    rows = np.empty((times.size, generator.nu))
    if times.size == 0:
        return rows
    steps = np.diff(times)
    uniform = steps.size > 0 and np.allclose(steps, steps[0], rtol=1e-12, atol=0.0)
    row = L @ matrix_exponential(S, times[0])
    rows[0] = row[0]
    if uniform:
        step = matrix_exponential(S, steps[0])
        for k in range(1, times.size):
            row = row @ step
            rows[k] = row[0]
    else:
        for k in range(1, times.size):
            rows[k] = (L @ matrix_exponential(S, times[k]))[0]
    return rows


def input_mismatch(u_samples, generator: SignalGenerator, omega0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pointwise mismatch |u(t_k) - L exp(S t_k) omega0| and its running supremum.

    Returns:
        (mismatch, envelope) arrays aligned with the sample times
    """
    times, values = _split_samples(u_samples)
    omega0 = np.asarray(omega0, dtype=float).reshape(-1)
    mismatch = np.abs(values - generator_regressor(times, generator) @ omega0)
    return mismatch, np.maximum.accumulate(mismatch)


def _chebyshev_lp(R: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Solve min_w max_k |u_k - R_k w| as an LP in (w, tau)."""
    N, nu = R.shape
    c = np.zeros(nu + 1)
    c[-1] = 1.0
    ones = np.ones((N, 1))
    A_ub = np.vstack([np.hstack([R, -ones]), np.hstack([-R, -ones])])
    b_ub = np.concatenate([u, -u])
    bounds = [(None, None)] * nu + [(0, None)]
    result = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method='highs')
    if not result.success:
        raise NumericalError(f"minimax LP failed: {result.message}")
    return result.x[:nu]


def fit_omega0(u_samples, generator: SignalGenerator, method: str = 'minimax') -> Omega0Fit:
    """
    Fit omega0 minimizing the grid supremum of |u(t) - L exp(S t) omega0|.

    The residual is affine in omega0, so the minimax problem is an LP in nu+1
    variables. The least-squares candidate is always computed; in minimax mode
    the smaller sup-residual of the two is returned, which also keeps the
    in-class case exact to machine precision.

    Args:
        u_samples: (time, value) pairs, at least nu of them, strictly increasing times
        generator: Signal generator
        method: 'minimax' or 'least-squares'

    Returns:
        Omega0Fit

    Raises:
        NumericalError: the regressor [L exp(S t_k)] is rank deficient
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    times, values = _split_samples(u_samples)
    nu = generator.nu
    if times.size < nu:
        raise DimensionError(f"need at least {nu} samples, got {times.size}")

    R = generator_regressor(times, generator)
    rank = numerical_rank(R)
    if rank < nu:
        raise NumericalError(
            f"regressor rank {rank} < nu = {nu}: sample grid too short for the generator modes"
        )

    omega_ls, *_ = np.linalg.lstsq(R, values, rcond=None)
    tau_ls = float(np.max(np.abs(values - R @ omega_ls)))
    omega0, tau = omega_ls, tau_ls
    if method == 'minimax':
        omega_mm = _chebyshev_lp(R, values)
        tau_mm = float(np.max(np.abs(values - R @ omega_mm)))
        if tau_mm < tau_ls:
            omega0, tau = omega_mm, tau_mm
    logger.debug("omega0 fit (%s) over %d samples: tau=%.3e", method, times.size, tau)
    return Omega0Fit(omega0=omega0, tau=tau, grid=times, method=method)


def evaluate_bound(err: ErrorSystem, e_x_omega0, e_xi_omega0, tau, times) -> BoundTrace:
    """
    bound(t) = c1 (||e_xw(0)|| + ||e_xiw(0)||) exp(-c2 t) + c3 tau.

    Args:
        err: Certified error system
        e_x_omega0: x(0) - Pi omega0
        e_xi_omega0: xi_hat(0) - omega0
        tau: scalar mismatch, or a per-time envelope aligned with ``times``
        times: evaluation grid

    Returns:
        BoundTrace
    """
    times = np.asarray(times, dtype=float)
    tau_arr = np.asarray(tau, dtype=float)
    if tau_arr.ndim and tau_arr.shape != times.shape:
        raise DimensionError("tau envelope must match the time grid")
    initial = np.linalg.norm(e_x_omega0) + np.linalg.norm(e_xi_omega0)
    values = err.c1 * initial * np.exp(-err.c2 * times) + err.c3 * tau_arr
    return BoundTrace(times=times, values=np.broadcast_to(values, times.shape).copy(), tau=tau)


def bound_for_trace(err: ErrorSystem, observer: LowDimObserver, trace: "SimTrace",
                    method: str = 'minimax', envelope: bool = False) -> Tuple[Omega0Fit, BoundTrace]:
    """
    Evaluate the bound for a simulated run.

    omega0 is fitted once over the whole horizon and reused for both the
    initial-condition term and tau.

    Args:
        err: Certified error system
        observer: Observer used in the run (supplies Pi)
        trace: Simulation trace
        method: Fit method
        envelope: Use the running supremum of the mismatch instead of the final tau

    Returns:
        (fit, bound)
    """
    samples = np.column_stack([trace.times, trace.u])
    fit = fit_omega0(samples, observer.generator, method)
    e_x = trace.x0 - observer.Pi @ fit.omega0
    e_xi = trace.xi[0] - fit.omega0
    tau = input_mismatch(samples, observer.generator, fit.omega0)[1] if envelope else fit.tau
    return fit, evaluate_bound(err, e_x, e_xi, tau, trace.times)


def check_bound(trace: "SimTrace", bound: BoundTrace, slack: float = BOUND_SLACK) -> ValidationReport:
    """
    Check ||x - Pi xi_hat|| <= bound at every grid point.

    Passes iff the violation stays within ``slack * (1 + bound)``.

    Raises:
        DimensionError: the time grids differ
    """
    times = np.asarray(trace.times)
    if times.shape != bound.times.shape or not np.allclose(times, bound.times, rtol=0, atol=1e-12):
        raise DimensionError("trace and bound time grids differ")
    report = ValidationReport("estimation-error bound")
    excess = trace.error_norm - bound.values
    allowed = slack * (1.0 + bound.values)
    worst = int(np.argmax(excess - allowed))
    report.details['max_violation'] = float(max(np.max(excess), 0.0))
    report.details['worst_time'] = float(times[worst])
    report.details['note'] = GRID_NOTE
    if excess[worst] > allowed[worst]:
        report.fail(
            f"error {trace.error_norm[worst]:.6g} exceeds bound {bound.values[worst]:.6g} at t={times[worst]:.6g}"
        )
    return report


def tightness(trace: "SimTrace", bound: BoundTrace) -> Optional[float]:
    """Ratio max(error)/max(bound); None when the bound is identically zero."""
    peak = float(np.max(bound.values))
    return None if peak == 0 else float(np.max(trace.error_norm)) / peak
