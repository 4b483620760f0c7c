"""
Error hierarchy for the low-dimensional observer toolkit.

Every error raised on purpose by the package derives from ``LodoError`` so
callers (and the CLI) can map failures to exit codes without parsing messages.
"""


class LodoError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(LodoError, ValueError):
    """Matrix shapes are inconsistent with the requested operation."""


class DefinitenessError(LodoError, ValueError):
    """A matrix required to be symmetric positive definite is not."""


class GeneratorError(LodoError, ValueError):
    """Signal-generator data cannot define a valid input class."""


class SpectralCollisionError(LodoError):
    """Two spectra that must be disjoint intersect within tolerance."""


class NotHurwitzError(LodoError):
    """A matrix required to be Hurwitz has an eigenvalue with Re >= -margin."""


class CertificationError(LodoError):
    """The error system matrix is not Hurwitz, so no bound can be certified."""


class ConvergenceError(LodoError):
    """An iterative kernel failed to converge."""


class NumericalError(LodoError):
    """Overflow, NaN, rank deficiency or a tripped stability guard."""


class PlacementError(LodoError):
    """Pole placement is impossible or its result misses the requested poles."""


class ConfigError(LodoError, ValueError):
    """An experiment configuration is malformed or references missing files."""


class MatrixMarketError(LodoError, ValueError):
    """A MatrixMarket file is malformed.

    Args:
        message: Description of the problem
        path: File being parsed
        line: 1-based line number of the offending line, if known
    """

    def __init__(self, message: str, path: str = "", line: int = 0):
        self.path = path
        self.line = line
        location = f"{path}:{line}: " if line else (f"{path}: " if path else "")
        super().__init__(f"{location}{message}")
