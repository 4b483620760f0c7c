"""Plants, signal generators, reduced-order models and observers."""

from .generators import build_generator, gamma_block
from .models import (
    LowDimObserver,
    ReducedOrderModel,
    SignalGenerator,
    StateSpaceSystem,
    ValidationReport,
)
from .validation import validate_sa1, validate_sa2

__all__ = [
    'LowDimObserver',
    'ReducedOrderModel',
    'SignalGenerator',
    'StateSpaceSystem',
    'ValidationReport',
    'build_generator',
    'gamma_block',
    'validate_sa1',
    'validate_sa2',
]
