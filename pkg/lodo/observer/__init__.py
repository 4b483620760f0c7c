"""Low-dimensional observer design, error system and ISS constants."""

from .design import (
    build_observer,
    certify,
    check_gain_existence,
    check_gain_given_G,
    check_gain_given_K,
    constant_gain,
    design_full_observer,
    design_G_given_K,
    design_K_lyapunov,
    design_K_pole_placement,
    lift_state,
)
from .error_system import ErrorSystem, assemble_error_system, iss_constants, lyapunov_decrease_margin

__all__ = [
    'ErrorSystem',
    'assemble_error_system',
    'build_observer',
    'certify',
    'check_gain_existence',
    'check_gain_given_G',
    'check_gain_given_K',
    'constant_gain',
    'design_full_observer',
    'design_G_given_K',
    'design_K_lyapunov',
    'design_K_pole_placement',
    'iss_constants',
    'lift_state',
    'lyapunov_decrease_margin',
]
