"""Moment-matching model reduction."""

from .moments import (
    build_rom,
    compute_moment,
    design_G_hinf,
    design_G_stabilizing,
    frequency_response,
    transfer_value,
    verify_moment_matching,
)

__all__ = [
    'build_rom',
    'compute_moment',
    'design_G_hinf',
    'design_G_stabilizing',
    'frequency_response',
    'transfer_value',
    'verify_moment_matching',
]
