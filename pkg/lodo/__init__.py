"""
lodo - Low-Dimensional Observers from moment matching

Reduced-order models that match a stable SISO plant's moments at the
eigenvalues of a signal generator, observers of the generator's dimension
built on them, explicit ISS error bounds, and a deterministic simulation
harness driven by the ``lodo`` command.
"""

__version__ = "1.0.0"

from .analysis.bounds import bound_for_trace, check_bound, evaluate_bound, fit_omega0
from .observer.design import build_observer, design_K_pole_placement, lift_state
from .observer.error_system import ErrorSystem, assemble_error_system
from .reduction.moments import build_rom, compute_moment, design_G_stabilizing, verify_moment_matching
from .simulation.beam import surrogate_beam
from .simulation.integrator import SimTrace, compute_J, integrate
from .simulation.noise import NoiseSpec
from .simulation.schedule import InputSchedule, benchmark_schedule
from .systems.generators import build_generator
from .systems.models import LowDimObserver, ReducedOrderModel, SignalGenerator, StateSpaceSystem
from .systems.validation import validate_sa1, validate_sa2

__all__ = [
    'ErrorSystem',
    'InputSchedule',
    'LowDimObserver',
    'NoiseSpec',
    'ReducedOrderModel',
    'SignalGenerator',
    'SimTrace',
    'StateSpaceSystem',
    'assemble_error_system',
    'benchmark_schedule',
    'bound_for_trace',
    'build_generator',
    'build_observer',
    'build_rom',
    'check_bound',
    'compute_J',
    'compute_moment',
    'design_G_stabilizing',
    'design_K_pole_placement',
    'evaluate_bound',
    'fit_omega0',
    'integrate',
    'lift_state',
    'surrogate_beam',
    'validate_sa1',
    'validate_sa2',
]
