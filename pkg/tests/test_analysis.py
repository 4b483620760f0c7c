"""
Tests for the omega0 fit, the input mismatch and the ISS bound checker.
"""

import dataclasses
import math

import numpy as np
import pytest

from conftest import random_generator, random_stable_system
from lodo.analysis.bounds import (
    bound_for_trace,
    check_bound,
    evaluate_bound,
    fit_omega0,
    generator_regressor,
    input_mismatch,
    tightness,
)
from lodo.exceptions import DimensionError, NumericalError
from lodo.observer.design import build_observer, design_K_lyapunov
from lodo.observer.error_system import assemble_error_system
from lodo.reduction.moments import build_rom, design_G_stabilizing
from lodo.simulation.integrator import integrate
from lodo.simulation.schedule import Constant, InputSchedule, Multisine, Ramp, Segment, Sine, constant_schedule
from lodo.systems.generators import build_generator


def _samples(times, values):
    return np.column_stack([times, values])


def _in_class_schedule(rng, generator, t_final):
    """Random input the generator reproduces exactly."""
    offset = rng.uniform(-2.0, 2.0) if np.any(np.abs(generator.spectrum()) < 1e-12) else 0.0
    components = tuple(
        Sine(rng.uniform(0.2, 2.0), lam.imag, rng.uniform(0.0, 2 * math.pi))
        for lam in generator.spectrum() if lam.imag > 1e-9
    )
    return InputSchedule((Segment(0.0, t_final, Multisine(components, offset)),))


def _mixed_schedule(rng, generator, t_final, kind):
    """In-class input, or one of three inputs outside the generator class."""
    if kind == "in-class":
        return _in_class_schedule(rng, generator, t_final)
    if kind == "constant":
        signal = Constant(rng.uniform(-2.0, 2.0))
    elif kind == "ramp":
        signal = Ramp(0.0, rng.uniform(0.5, 2.0))
    else:
        # generator frequencies stay below 2 rad/s
        signal = Sine(rng.uniform(0.5, 2.0), rng.uniform(2.5, 4.0), rng.uniform(0.0, 2 * math.pi))
    return InputSchedule((Segment(0.0, t_final, signal),))


@pytest.fixture
def scalar_error_system(scalar_system, dc_generator):
    rom = build_rom(scalar_system, dc_generator, [[1.0]])
    observer = build_observer(rom, [[0.0]])
    return observer, assemble_error_system(scalar_system, dc_generator, rom, [[0.0]])


class TestRegressor:
    def test_uniform_matches_direct(self):
        generator = build_generator(dc=True, frequencies=[0.3, 1.1])
        uniform = np.linspace(0.0, 5.0, 51)
        rows = generator_regressor(uniform, generator)
        jittered = uniform + np.r_[0.0, 1e-6 * np.ones(50)]
        direct = generator_regressor(jittered, generator)
        assert np.allclose(rows[0], generator.L[0])
        assert np.allclose(rows, direct, atol=1e-5)

    def test_rotation_row(self):
        generator = build_generator(dc=False, frequencies=[1.0])
        row = generator_regressor(np.array([0.5]), generator)[0]
        assert np.allclose(row, [np.cos(0.5) - np.sin(0.5), np.sin(0.5) + np.cos(0.5)])


class TestFitOmega0:
    def test_constant_fit_of_sine(self, dc_generator):
        times = np.arange(0.0, 4 * np.pi, 1e-2)
        fit = fit_omega0(_samples(times, np.sin(times)), dc_generator)
        assert fit.tau == pytest.approx(1.0, abs=1e-3)
        assert abs(fit.omega0[0]) <= 1e-3
        assert fit.method == 'minimax'
        assert "grid" in fit.note

    def test_in_class_is_exact(self):
        generator = build_generator(dc=True, frequencies=[0.5])
        times = np.linspace(0.0, 30.0, 301)
        u = 2.0 + 3.0 * np.sin(0.5 * times)
        for method in ('minimax', 'least-squares'):
            fit = fit_omega0(_samples(times, u), generator, method)
            assert fit.tau < 1e-9
            assert np.allclose(fit.omega0, [2.0, -1.5, 1.5], atol=1e-9)

    def test_minimax_beats_least_squares(self, dc_generator):
        times = np.linspace(0.0, 10.0, 101)
        u = np.where(times < 9.0, 0.0, 1.0)
        minimax = fit_omega0(_samples(times, u), dc_generator)
        lsq = fit_omega0(_samples(times, u), dc_generator, 'least-squares')
        assert minimax.tau == pytest.approx(0.5, abs=1e-9)
        assert lsq.tau > minimax.tau

    def test_unknown_method(self, dc_generator):
        with pytest.raises(ValueError):
            fit_omega0(_samples([0.0, 1.0], [1.0, 1.0]), dc_generator, 'median')

    def test_too_few_samples(self):
        generator = build_generator(dc=True, frequencies=[0.5])
        with pytest.raises(DimensionError):
            fit_omega0(_samples([0.0, 1.0], [1.0, 1.0]), generator)

    def test_decreasing_times(self, dc_generator):
        with pytest.raises(DimensionError):
            fit_omega0(_samples([1.0, 0.0], [1.0, 1.0]), dc_generator)

    def test_aliased_grid_is_rank_deficient(self):
        # sin(pi k) vanishes on the integer grid
        generator = build_generator(dc=True, frequencies=[np.pi])
        times = np.arange(10.0)
        with pytest.raises(NumericalError, match="regressor rank"):
            fit_omega0(_samples(times, np.ones(10)), generator)


class TestMismatch:
    def test_envelope_is_running_max(self, dc_generator):
        times = np.arange(5.0)
        mismatch, envelope = input_mismatch(_samples(times, [0.0, 2.0, -1.0, 3.0, 0.0]), dc_generator, [0.0])
        assert np.array_equal(mismatch, [0.0, 2.0, 1.0, 3.0, 0.0])
        assert np.array_equal(envelope, [0.0, 2.0, 2.0, 3.0, 3.0])


class TestBound:
    def test_scalar_formula(self, scalar_error_system):
        _, err = scalar_error_system
        bound = evaluate_bound(err, [1.0], [1.0], 0.0, [0.0, 2.0])
        assert bound.values[0] == pytest.approx(2 * math.sqrt(2.0), abs=1e-12)
        assert bound.values[1] == pytest.approx(2 * math.sqrt(2.0) * math.exp(-1.0), abs=1e-12)

    def test_envelope_shape(self, scalar_error_system):
        _, err = scalar_error_system
        with pytest.raises(DimensionError):
            evaluate_bound(err, [1.0], [1.0], np.zeros(3), [0.0, 1.0])

    def test_scalar_run_respects_bound(self, scalar_system, scalar_error_system):
        observer, err = scalar_error_system
        trace = integrate(scalar_system, observer, constant_schedule(1.0, 10.0), h=0.01, x0=[1.0])
        fit, bound = bound_for_trace(err, observer, trace)
        assert fit.omega0[0] == pytest.approx(1.0, abs=1e-9)
        report = check_bound(trace, bound)
        assert report.is_valid, report.errors
        assert 0.0 < tightness(trace, bound) <= 1.0

    def test_zeroed_overshoot_fails(self, scalar_system, scalar_error_system):
        observer, err = scalar_error_system
        trace = integrate(scalar_system, observer, constant_schedule(1.0, 5.0), h=0.01, x0=[1.0])
        broken = dataclasses.replace(err, c1=0.0)
        _, bound = bound_for_trace(broken, observer, trace)
        report = check_bound(trace, bound)
        assert not report.is_valid
        assert report.details['worst_time'] == pytest.approx(0.0)
        assert report.details['max_violation'] > 0.5

    def test_grid_mismatch(self, scalar_system, scalar_error_system):
        observer, err = scalar_error_system
        trace = integrate(scalar_system, observer, constant_schedule(1.0, 1.0), h=0.1)
        bound = evaluate_bound(err, [0.0], [0.0], 0.0, np.linspace(0.0, 1.0, 5))
        with pytest.raises(DimensionError):
            check_bound(trace, bound)

    def test_zero_bound_has_no_tightness(self, scalar_system, scalar_error_system):
        observer, err = scalar_error_system
        trace = integrate(scalar_system, observer, constant_schedule(0.0, 1.0), h=0.1)
        bound = evaluate_bound(err, [0.0], [0.0], 0.0, trace.times)
        assert tightness(trace, bound) is None

    @pytest.mark.parametrize("envelope", [False, True])
    def test_random_certified_runs(self, rng, envelope):
        """Certified observers on in-class inputs stay below the bound."""
        for _ in range(25):
            nu = int(rng.integers(1, 6))
            system = random_stable_system(rng, int(rng.integers(max(2, nu), 9)))
            generator = random_generator(rng, nu)
            rom = build_rom(system, generator, design_G_stabilizing(system, generator))
            K = design_K_lyapunov(rom, system, kappa=rng.uniform(0.1, 2.0))
            observer = build_observer(rom, K)
            err = assemble_error_system(system, generator, rom, K)
            schedule = _in_class_schedule(rng, generator, 10.0)
            trace = integrate(system, observer, schedule, h=0.01, x0=rng.standard_normal(system.n))
            _, bound = bound_for_trace(err, observer, trace, envelope=envelope)
            report = check_bound(trace, bound)
            assert report.is_valid, report.errors

    def test_mixed_inputs_never_exceed_bound(self, rng):
        """Fifty plants (n <= 20) under in-class, constant, ramp and off-class sine inputs."""
        kinds = ("in-class", "constant", "ramp", "sine")
        violations = []
        for case in range(50):
            nu = int(rng.integers(1, 6))
            system = random_stable_system(rng, int(rng.integers(max(2, nu), 21)))
            generator = random_generator(rng, nu)
            rom = build_rom(system, generator, design_G_stabilizing(system, generator))
            K = design_K_lyapunov(rom, system, kappa=rng.uniform(0.1, 2.0))
            observer = build_observer(rom, K)
            err = assemble_error_system(system, generator, rom, K)
            kind = kinds[case % len(kinds)]
            schedule = _mixed_schedule(rng, generator, 10.0, kind)
            trace = integrate(system, observer, schedule, h=0.01, x0=rng.standard_normal(system.n))
            _, bound = bound_for_trace(err, observer, trace)
            report = check_bound(trace, bound)
            if not report.is_valid:
                violations.append((case, kind, system.n, nu, report.details['max_violation']))
        assert not violations
