"""Error-bound evaluation: omega0 fit, tau and the exponential ISS bound."""

from .bounds import (
    BoundTrace,
    Omega0Fit,
    bound_for_trace,
    check_bound,
    evaluate_bound,
    fit_omega0,
    input_mismatch,
    tightness,
)

__all__ = [
    'BoundTrace',
    'Omega0Fit',
    'bound_for_trace',
    'check_bound',
    'evaluate_bound',
    'fit_omega0',
    'input_mismatch',
    'tightness',
]
