"""
Tests for moments, reduced-model construction and the stabilizing choice of G.
"""

import numpy as np
import pytest

from conftest import random_generator, random_stable_system
from lodo.exceptions import DimensionError, NotHurwitzError, NumericalError, SpectralCollisionError
from lodo.reduction.moments import (
    build_rom,
    compute_moment,
    design_G_hinf,
    design_G_stabilizing,
    frequency_response,
    transfer_value,
    verify_moment_matching,
)
from lodo.systems.generators import build_generator
from lodo.systems.models import ReducedOrderModel, StateSpaceSystem


class TestMoments:
    def test_dc_moment_is_static_gain(self, oscillator_system, dc_generator):
        moment = compute_moment(oscillator_system, dc_generator)
        assert moment[0, 0] == pytest.approx(1.0 / 4.25)

    def test_transfer_value_hand_case(self, oscillator_system):
        # G(s) = 1 / (s^2 + s + 4.25)
        s = 1j * 0.5
        assert transfer_value(oscillator_system, s) == pytest.approx(1.0 / (s * s + s + 4.25))

    def test_frequency_response_shape(self, scalar_system):
        values = frequency_response(scalar_system, [0.0, 1.0])
        assert values.shape == (2,)
        assert values[0] == pytest.approx(1.0)
        assert values[1] == pytest.approx(1.0 / (1.0 + 1j))


class TestStabilizingG:
    def test_scalar_hand_case(self, scalar_system, dc_generator):
        # P = 1/2, Pi = 1, so G = 1 and F = -1
        G = design_G_stabilizing(scalar_system, dc_generator)
        assert G[0, 0] == pytest.approx(1.0)

    def test_two_mode_hand_case(self):
        # P = diag(1/2, 1/4) and Pi = [1; 1/2]: Pi^T P Pi = 9/16, Pi^T P B = 5/8
        system = StateSpaceSystem(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 1.0]])
        generator = build_generator(dc=True, frequencies=[])
        G = design_G_stabilizing(system, generator)
        assert G[0, 0] == pytest.approx(10.0 / 9.0, rel=1e-12)
        rom = build_rom(system, generator, G)
        assert np.allclose(rom.Pi, [[1.0], [0.5]])
        assert rom.F[0, 0] == pytest.approx(-10.0 / 9.0, rel=1e-12)

    def test_f_hurwitz_for_weighted_q(self, rng):
        system = random_stable_system(rng, 6)
        generator = build_generator(dc=True, frequencies=[0.3, 1.5])
        G = design_G_stabilizing(system, generator, Q=np.diag([5.0, 0.1, 1.0, 2.0, 0.5, 3.0]))
        F = generator.S - G @ generator.L
        assert np.max(np.linalg.eigvals(F).real) < 0

    def test_f_hurwitz_for_random_spd_weights(self, rng):
        """Twenty random Q > 0 per plant all give a Hurwitz S - G L."""
        for _ in range(10):
            nu = int(rng.choice([1, 3, 5]))
            n = int(rng.integers(max(2, nu), 16))
            system = random_stable_system(rng, n)
            generator = random_generator(rng, nu)
            for _ in range(20):
                M = rng.standard_normal((n, n))
                Q = M @ M.T + 0.1 * np.eye(n)
                G = design_G_stabilizing(system, generator, Q=Q)
                F = generator.S - G @ generator.L
                assert np.max(np.linalg.eigvals(F).real) < 0

    def test_generator_larger_than_plant(self, oscillator_system):
        generator = build_generator(dc=True, frequencies=[0.5])
        with pytest.raises(NumericalError, match="n >= nu"):
            design_G_stabilizing(oscillator_system, generator)

    def test_unstable_plant_rejected(self, dc_generator):
        with pytest.raises(NotHurwitzError):
            design_G_stabilizing(StateSpaceSystem([[1.0]], [[1.0]], [[1.0]]), dc_generator)

    def test_hinf_not_provided(self, scalar_system, dc_generator):
        with pytest.raises(NotImplementedError):
            design_G_hinf(scalar_system, dc_generator)


class TestBuildRom:
    def test_scalar_model_equals_plant(self, scalar_system, dc_generator):
        rom = build_rom(scalar_system, dc_generator, [[1.0]])
        assert np.allclose(rom.Pi, [[1.0]])
        assert np.allclose(rom.H, [[1.0]])
        assert transfer_value(rom, 0.7j) == pytest.approx(transfer_value(scalar_system, 0.7j))

    def test_g_zero_collides(self, scalar_system, dc_generator):
        with pytest.raises(SpectralCollisionError, match="choose another G"):
            build_rom(scalar_system, dc_generator, [[0.0]])

    def test_g_shape(self, scalar_system, dc_generator):
        with pytest.raises(DimensionError):
            build_rom(scalar_system, dc_generator, [[1.0], [2.0]])

    def test_generator_larger_than_plant(self, oscillator_system):
        generator = build_generator(dc=True, frequencies=[0.5])
        with pytest.raises(NumericalError, match=r"rank\(Pi\)"):
            build_rom(oscillator_system, generator, np.ones((3, 1)))

    def test_plant_pole_on_generator(self, dc_generator):
        integrator = StateSpaceSystem([[0.0]], [[1.0]], [[1.0]])
        with pytest.raises(SpectralCollisionError):
            build_rom(integrator, dc_generator, [[1.0]])


class TestMomentMatching:
    def test_third_order_one_tone(self, third_order_system):
        generator = build_generator(dc=True, frequencies=[0.25])
        G = design_G_stabilizing(third_order_system, generator)
        rom = build_rom(third_order_system, generator, G)
        report = verify_moment_matching(third_order_system, rom)
        assert report.is_valid, report.errors
        assert report.details['p_prime_identity_error'] < 1e-10
        assert len(report.details['transfer_errors']) == 3

    def test_thirty_states_two_tones(self, rng):
        system = random_stable_system(rng, 30)
        generator = build_generator(dc=True, frequencies=[0.25, 1.0])
        rom = build_rom(system, generator, design_G_stabilizing(system, generator))
        report = verify_moment_matching(system, rom, tol=1e-8)
        assert report.is_valid, report.errors
        assert len(report.details["transfer_errors"]) == 5

    def test_detects_wrong_output_map(self, oscillator_system, dc_generator):
        rom = build_rom(oscillator_system, dc_generator, [[1.0]])
        tampered = ReducedOrderModel(dc_generator, rom.G, rom.H * 1.01, rom.Pi)
        report = verify_moment_matching(oscillator_system, tampered)
        assert not report.is_valid

    def test_random_sweep(self, rng):
        """Random plants (n <= 60) and generators (nu in {1, 3, 5}) match their moments."""
        failures = []
        for case in range(200):
            nu = int(rng.choice([1, 3, 5]))
            n = int(rng.integers(max(2, nu), 61))
            system = random_stable_system(rng, n)
            generator = random_generator(rng, nu)
            G = design_G_stabilizing(system, generator)
            F = generator.S - G @ generator.L
            rom = build_rom(system, generator, G)
            report = verify_moment_matching(system, rom)
            invariants = rom.verify(system)
            if not (report.is_valid and invariants.is_valid and np.max(np.linalg.eigvals(F).real) < 0):
                failures.append((case, n, nu, report.errors + invariants.errors))
        assert not failures
