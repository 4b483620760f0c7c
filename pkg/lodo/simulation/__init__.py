"""Time-domain simulation: input schedules, output noise, RK4 integration and the surrogate beam."""

from .beam import surrogate_beam
from .integrator import (
    SimTrace,
    compute_J,
    integrate,
    integrate_full_order,
    segment_summary,
    write_bound_csv,
    write_trace_csv,
)
from .noise import NoiseSpec, add_output_noise, snr_db, zoh_noise
from .schedule import (
    Constant,
    InputSchedule,
    Multisine,
    Ramp,
    Segment,
    Sine,
    ZohNoise,
    benchmark_schedule,
    constant_schedule,
    sine_schedule,
)

__all__ = [
    'Constant',
    'InputSchedule',
    'Multisine',
    'NoiseSpec',
    'Ramp',
    'Segment',
    'SimTrace',
    'Sine',
    'ZohNoise',
    'add_output_noise',
    'benchmark_schedule',
    'compute_J',
    'constant_schedule',
    'integrate',
    'integrate_full_order',
    'segment_summary',
    'sine_schedule',
    'snr_db',
    'surrogate_beam',
    'write_bound_csv',
    'write_trace_csv',
    'zoh_noise',
]
