"""
Tests for observer construction, gain design and the ISS error system.
"""

import math

import numpy as np
import pytest

from conftest import random_generator, random_stable_system
from lodo.exceptions import CertificationError, DimensionError, PlacementError
from lodo.observer.design import (
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
from lodo.observer.error_system import assemble_error_system, iss_constants, lyapunov_decrease_margin
from lodo.reduction.moments import build_rom, design_G_stabilizing
from lodo.systems.generators import build_generator, gamma_block
from lodo.systems.models import SignalGenerator


@pytest.fixture
def scalar_rom(scalar_system, dc_generator):
    return build_rom(scalar_system, dc_generator, [[1.0]])


@pytest.fixture
def third_order_rom(third_order_system):
    generator = build_generator(dc=True, frequencies=[0.7])
    return build_rom(third_order_system, generator, design_G_stabilizing(third_order_system, generator))


class TestObserverConstruction:
    def test_constant_gain(self):
        K = constant_gain(3)
        assert K.shape == (3, 1)
        assert np.all(K == 100.0)
        assert np.all(constant_gain(2, 5.0) == 5.0)

    def test_scalar_observer_certified(self, scalar_rom):
        observer = build_observer(scalar_rom, [[0.0]])
        assert observer.certified
        ok, abscissa = certify(observer)
        assert ok
        assert abscissa == pytest.approx(-1.0)

    def test_uncertified_is_recorded(self, scalar_rom):
        observer = build_observer(scalar_rom, [[-2.0]])
        assert not observer.certified
        assert observer.spectral_abscissa == pytest.approx(1.0)

    def test_margin(self, scalar_rom):
        observer = build_observer(scalar_rom, [[0.0]], margin=0.5)
        assert observer.certified
        assert not certify(observer, margin=2.0)[0]

    def test_gain_shape(self, scalar_rom):
        with pytest.raises(DimensionError):
            build_observer(scalar_rom, [[1.0], [1.0]])

    def test_lift_state(self):
        Pi = np.array([[1.0], [2.0]])
        assert np.allclose(lift_state(Pi, [3.0]), [3.0, 6.0])
        assert lift_state(Pi, np.ones((5, 1))).shape == (5, 2)
        with pytest.raises(DimensionError):
            lift_state(Pi, [1.0, 2.0])


class TestGainExistence:
    def test_dc_case(self, dc_generator):
        assert check_gain_existence(dc_generator, [[1.0]])
        assert check_gain_given_G(dc_generator, [[1.0]], [[0.0]])
        assert check_gain_given_G(dc_generator, [[0.0]], [[1.0]])
        assert not check_gain_given_G(dc_generator, [[0.0]], [[0.0]])
        assert check_gain_given_K(dc_generator, [[0.0]], [[1.0]])

    def test_undetectable_stack(self):
        S = np.zeros((3, 3))
        S[1:, 1:] = gamma_block(0.5)
        generator = SignalGenerator(S, [[1.0, 0.0, 0.0]])
        assert not check_gain_existence(generator, [[2.0, 0.0, 0.0]])

    def test_roundoff_moment_does_not_detect(self):
        generator = SignalGenerator([[0.0]], [[0.0]])
        assert not check_gain_existence(generator, [[1e-17]])
        assert check_gain_existence(generator, [[1e-3]])

    def test_moment_must_be_row(self, dc_generator):
        with pytest.raises(DimensionError):
            check_gain_existence(dc_generator, [[1.0], [1.0]])


class TestPolePlacement:
    def test_k_places_observer_poles(self, third_order_rom):
        poles = [-1.0, -2.0, -3.0]
        K = design_K_pole_placement(third_order_rom.generator, third_order_rom.G, third_order_rom.H, poles)
        observer = build_observer(third_order_rom, K)
        assert np.allclose(np.sort(np.linalg.eigvals(observer.state_matrix).real), [-3.0, -2.0, -1.0], atol=1e-6)

    def test_complex_pair(self, third_order_rom):
        poles = [-1.0, -0.5 + 1j, -0.5 - 1j]
        K = design_K_pole_placement(third_order_rom.generator, third_order_rom.G, third_order_rom.H, poles)
        placed = np.linalg.eigvals(build_observer(third_order_rom, K).state_matrix)
        assert np.allclose(np.sort_complex(placed), np.sort_complex(np.array(poles)), atol=1e-6)

    def test_g_given_k(self, third_order_rom):
        generator = third_order_rom.generator
        K = np.zeros((3, 1))
        G = design_G_given_K(generator, K, third_order_rom.H, [-0.5, -1.0, -1.5])
        F = generator.S - G @ generator.L
        assert np.allclose(np.sort(np.linalg.eigvals(F).real), [-1.5, -1.0, -0.5], atol=1e-6)

    @pytest.mark.parametrize("poles", [
        [-1.0, -2.0],
        [-1.0, -2.0, 0.5],
        [-1.0, -1.0 + 1j, -2.0],
    ])
    def test_invalid_poles(self, third_order_rom, poles):
        with pytest.raises(PlacementError):
            design_K_pole_placement(third_order_rom.generator, third_order_rom.G, third_order_rom.H, poles)

    def test_unobservable_pair(self, dc_generator):
        with pytest.raises(PlacementError, match="not observable"):
            design_K_pole_placement(dc_generator, [[1.0]], [[0.0]], [-2.0])


class TestLyapunovGain:
    @pytest.mark.parametrize("kappa", [0.0, 0.5, 10.0])
    def test_always_certified(self, rng, kappa):
        for _ in range(10):
            nu = int(rng.integers(1, 6))
            system = random_stable_system(rng, int(rng.integers(max(3, nu), 15)))
            generator = random_generator(rng, nu)
            rom = build_rom(system, generator, design_G_stabilizing(system, generator))
            K = design_K_lyapunov(rom, system, kappa=kappa)
            assert build_observer(rom, K).certified

    @pytest.mark.parametrize("kappa", [-1.0, math.nan, math.inf])
    def test_invalid_kappa(self, scalar_rom, scalar_system, kappa):
        with pytest.raises(ValueError, match="kappa"):
            design_K_lyapunov(scalar_rom, scalar_system, kappa=kappa)


class TestFullOrderObserver:
    def test_zero_gain_default(self, oscillator_system):
        assert np.array_equal(design_full_observer(oscillator_system), np.zeros((2, 1)))

    def test_placement(self, oscillator_system):
        M = design_full_observer(oscillator_system, [-3.0, -4.0])
        closed = oscillator_system.A - M @ oscillator_system.C
        assert np.allclose(np.sort(np.linalg.eigvals(closed).real), [-4.0, -3.0], atol=1e-6)

    def test_wrong_pole_count(self, oscillator_system):
        with pytest.raises(PlacementError):
            design_full_observer(oscillator_system, [-3.0])


class TestErrorSystem:
    def test_scalar_hand_constants(self, scalar_system, dc_generator, scalar_rom):
        err = assemble_error_system(scalar_system, dc_generator, scalar_rom, [[0.0]])
        assert np.allclose(err.P, 0.5 * np.eye(2), atol=1e-14)
        assert np.allclose(err.Phi, [[1.0, -1.0]])
        assert np.allclose(err.Psi, [[1.0], [1.0]])
        assert err.c1 == pytest.approx(np.sqrt(2.0), abs=1e-12)
        assert err.c2 == pytest.approx(0.5, abs=1e-12)
        assert err.c3 == pytest.approx(2.0, abs=1e-12)
        assert np.allclose(err.Pi, [[1.0]])
        assert err.n == 1 and err.nu == 1

    def test_block_structure(self, third_order_system, third_order_rom):
        K = design_K_lyapunov(third_order_rom, third_order_system, kappa=1.0)
        err = assemble_error_system(third_order_system, third_order_rom.generator, third_order_rom, K)
        assert np.allclose(err.Xi[:3, 3:], 0.0)
        assert np.allclose(err.Xi[:3, :3], third_order_system.A)
        assert np.allclose(err.Xi[3:, :3], K @ third_order_system.C)
        assert np.allclose(err.Xi[3:, 3:], build_observer(third_order_rom, K).state_matrix)
        assert err.lyapunov_residual() < 1e-9
        assert all(c > 0 for c in err.constants().values())

    def test_constants_match_formulas(self, third_order_system, third_order_rom):
        K = design_K_lyapunov(third_order_rom, third_order_system, kappa=1.0)
        err = assemble_error_system(third_order_system, third_order_rom.generator, third_order_rom,
                                    K, Q=2.0 * np.eye(6))
        assert iss_constants(err.P, err.Q, err.Phi, err.Psi) == (err.c1, err.c2, err.c3)

    def test_uncertified(self, scalar_system, dc_generator, scalar_rom):
        with pytest.raises(CertificationError, match="pick different G/K"):
            assemble_error_system(scalar_system, dc_generator, scalar_rom, [[-2.0]])

    def test_weight_shape(self, scalar_system, dc_generator, scalar_rom):
        with pytest.raises(DimensionError):
            assemble_error_system(scalar_system, dc_generator, scalar_rom, [[0.0]], Q=np.eye(3))

    def test_dissipation_inequality(self, rng, third_order_system, third_order_rom):
        K = design_K_lyapunov(third_order_rom, third_order_system, kappa=1.0)
        err = assemble_error_system(third_order_system, third_order_rom.generator, third_order_rom, K)
        for _ in range(100):
            e = rng.standard_normal(6) * rng.uniform(0.01, 10.0)
            w = rng.standard_normal() * rng.uniform(0.01, 10.0)
            assert lyapunov_decrease_margin(err, e, w) >= -1e-9 * (1.0 + e @ e + w * w)
