"""Dense linear-algebra kernels every other subpackage builds on."""

from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    eigenvalues,
    is_hurwitz,
    matrix_exponential,
    numerical_rank,
    pbh_controllable,
    pbh_detectable,
    pbh_observable,
    solve_lyapunov,
    solve_sylvester,
    spectral_abscissa,
    spectral_radius,
)

__all__ = [
    'DEFAULT_TOLERANCES',
    'Tolerances',
    'eigenvalues',
    'is_hurwitz',
    'matrix_exponential',
    'numerical_rank',
    'pbh_controllable',
    'pbh_detectable',
    'pbh_observable',
    'solve_lyapunov',
    'solve_sylvester',
    'spectral_abscissa',
    'spectral_radius',
]
