"""
Standing-assumption validators.

SA1: the plant is minimal and A is Hurwitz.
SA2: (S, L) is observable and sigma(S) does not meet sigma(A).

Validators never raise on a failed assumption; they return a
``ValidationReport`` the CLI can print.
"""

import logging
import warnings

import numpy as np

from ..core.linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    eigenvalues,
    min_spectral_distance,
    pbh_controllable,
    pbh_observable,
)
from .models import SignalGenerator, StateSpaceSystem, ValidationReport

logger = logging.getLogger(__name__)


def validate_sa1(system: StateSpaceSystem, tolerances: Tolerances = DEFAULT_TOLERANCES) -> ValidationReport:
    """
    Check that A is Hurwitz and (A, B, C) is minimal.

    Args:
        system: Plant to check

    Returns:
        Report with ``spectral_abscissa``, ``controllable`` and ``observable`` details
    """
    report = ValidationReport("SA1 (Hurwitz and minimal plant)")
    lams = eigenvalues(system.A)
    abscissa = float(np.max(lams.real))
    report.details['spectral_abscissa'] = abscissa
    report.details['hurwitz'] = abscissa < 0
    if abscissa >= 0:
        report.fail(f"A is not Hurwitz: spectral abscissa {abscissa:.6g} >= 0")

    controllable = pbh_controllable(system.A, system.B, tolerances)
    report.details['controllable'] = controllable
    if not controllable:
        report.fail("(A, B) is not controllable (PBH rank test)")

    observable = pbh_observable(system.A, system.C, tolerances)
    report.details['observable'] = observable
    if not observable:
        report.fail("(A, C) is not observable (PBH rank test)")

    logger.debug("SA1 n=%d abscissa=%.4g valid=%s", system.n, abscissa, report.is_valid)
    return report


def validate_sa2(system: StateSpaceSystem, generator: SignalGenerator,
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> ValidationReport:
    """
    Check (S, L) observability, spectral disjointness of S and A, and nu <= n.

    A spectrum of S that is not purely imaginary and simple only produces a
    warning: the convergence results need SA2 alone, but bounded generator
    trajectories are what make the error bound informative.

    Args:
        system: Plant
        generator: Signal generator

    Returns:
        Report with ``spectral_distance`` and ``observable`` details
    """
    report = ValidationReport("SA2 (observable generator, disjoint spectra)")
    S, L = generator.S, generator.L

    # rank(Pi) <= n, so no reduced model of order nu exists beyond the plant order
    report.details['order_fits'] = generator.nu <= system.n
    if generator.nu > system.n:
        report.fail(f"generator dimension nu = {generator.nu} exceeds the plant order n = {system.n}")

    observable = pbh_observable(S, L, tolerances)
    report.details['observable'] = observable
    if not observable:
        report.fail("(S, L) is not observable (PBH rank test)")

    lam_s = eigenvalues(S)
    distance = min_spectral_distance(lam_s, eigenvalues(system.A))
    report.details['spectral_distance'] = distance
    if distance < tolerances.spectral_gap:
        report.fail(
            f"sigma(S) meets sigma(A): interpolation point within {distance:.3e} of a plant pole"
        )

    scale = 1.0 + float(np.linalg.norm(S))
    on_axis = bool(np.all(np.abs(lam_s.real) <= tolerances.marginal * scale))
    simple = len(lam_s) < 2 or min(
        abs(a - b) for i, a in enumerate(lam_s) for b in lam_s[i + 1:]
    ) > tolerances.spectral_gap
    report.details['imaginary_axis'] = on_axis
    report.details['simple'] = simple
    if not (on_axis and simple):
        message = (
            "sigma(S) is not purely imaginary and simple; convergence still holds under SA2, "
            "but generator trajectories may be unbounded and the transfer-function check is not valid"
        )
        report.warn(message)
        warnings.warn(message)

    logger.debug("SA2 nu=%d distance=%.3e valid=%s", generator.nu, distance, report.is_valid)
    return report
