"""
Tests for plant/generator records, generator builders and the standing-assumption validators.
"""

import numpy as np
import pytest

from conftest import random_stable_system
from lodo.exceptions import DimensionError, GeneratorError
from lodo.reduction.moments import build_rom
from lodo.systems.generators import build_generator, gamma_block
from lodo.systems.models import ReducedOrderModel, SignalGenerator, StateSpaceSystem, ValidationReport
from lodo.systems.validation import validate_sa1, validate_sa2


class TestGenerators:
    """Block-diagonal generators with L = [1 ... 1]."""

    def test_gamma_block(self):
        assert np.array_equal(gamma_block(2.0), [[0.0, 2.0], [-2.0, 0.0]])

    def test_dc_plus_frequency(self):
        gen = build_generator(dc=True, frequencies=[0.104])
        assert gen.nu == 3
        assert np.array_equal(gen.L, np.ones((1, 3)))
        lams = np.sort_complex(gen.spectrum())
        assert np.allclose(lams, [-0.104j, 0.0, 0.104j])

    def test_frequencies_only(self):
        assert build_generator(dc=False, frequencies=[0.1, 0.5]).nu == 4

    @pytest.mark.parametrize("dc,freqs", [
        (False, []),
        (True, [-0.1]),
        (True, [0.0]),
        (True, [0.3, 0.3]),
    ])
    def test_invalid(self, dc, freqs):
        with pytest.raises(GeneratorError):
            build_generator(dc=dc, frequencies=freqs)


class TestRecords:
    def test_dimension_checks(self):
        with pytest.raises(DimensionError):
            StateSpaceSystem(np.eye(2), np.ones((3, 1)), np.ones((1, 2)))
        with pytest.raises(DimensionError):
            StateSpaceSystem(np.eye(2), np.ones((2, 1)), np.ones((2, 2)))
        with pytest.raises(DimensionError):
            SignalGenerator(np.zeros((2, 2)), np.ones((1, 3)))

    def test_matrices_are_read_only(self, scalar_system):
        with pytest.raises(ValueError):
            scalar_system.A[0, 0] = 5.0

    def test_vector_input_map_accepted(self):
        system = StateSpaceSystem(-np.eye(2), [1.0, 0.0], [1.0, 1.0])
        assert system.B.shape == (2, 1)
        assert system.C.shape == (1, 2)

    def test_report_tuple_and_dict(self):
        report = ValidationReport("demo")
        report.details['pole'] = 1 + 2j
        report.details['values'] = np.array([1.0, 2.0])
        report.fail("broken")
        report.warn("odd")
        assert report.as_tuple() == (False, ["broken"])
        data = report.to_dict()
        assert data['details']['pole'] == [1.0, 2.0]
        assert data['details']['values'] == [1.0, 2.0]
        assert "[FAIL] demo" in report.summary()


class TestSA1:
    def test_scalar_plant(self, scalar_system):
        report = validate_sa1(scalar_system)
        assert report.is_valid
        assert report.details['spectral_abscissa'] == pytest.approx(-1.0)

    def test_unstable(self):
        report = validate_sa1(StateSpaceSystem([[0.5]], [[1.0]], [[1.0]]))
        assert not report.is_valid
        assert any("Hurwitz" in e for e in report.errors)

    def test_unobservable(self):
        system = StateSpaceSystem(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 0.0]])
        report = validate_sa1(system)
        assert report.as_tuple()[0] is False
        assert report.details['observable'] is False
        assert report.details['controllable'] is True

    def test_random_plants_are_minimal(self, rng):
        for n in (3, 8, 20):
            assert validate_sa1(random_stable_system(rng, n)).is_valid


class TestSA2:
    def test_dc_generator(self, scalar_system, dc_generator):
        report = validate_sa2(scalar_system, dc_generator)
        assert report.is_valid
        assert report.details['spectral_distance'] == pytest.approx(1.0)

    def test_collision(self, scalar_system):
        generator = SignalGenerator([[-1.0]], [[1.0]])
        with pytest.warns(UserWarning, match="not purely imaginary"):
            report = validate_sa2(scalar_system, generator)
        assert not report.is_valid
        assert any("meets" in e for e in report.errors)

    def test_unobservable_generator(self, scalar_system):
        S = np.zeros((3, 3))
        S[1:, 1:] = gamma_block(0.5)
        report = validate_sa2(scalar_system, SignalGenerator(S, [[1.0, 0.0, 0.0]]))
        assert not report.is_valid
        assert report.details['observable'] is False

    def test_generator_larger_than_plant(self, oscillator_system):
        report = validate_sa2(oscillator_system, build_generator(dc=True, frequencies=[0.5]))
        assert not report.is_valid
        assert report.details['order_fits'] is False
        assert report.details['observable'] is True
        assert any("exceeds the plant order" in e for e in report.errors)

    def test_generator_matching_plant_order(self, third_order_system):
        report = validate_sa2(third_order_system, build_generator(dc=True, frequencies=[0.5]))
        assert report.is_valid
        assert report.details['order_fits'] is True

    def test_off_axis_generator_only_warns(self, scalar_system):
        generator = SignalGenerator([[-0.5]], [[1.0]])
        with pytest.warns(UserWarning):
            report = validate_sa2(scalar_system, generator)
        assert report.is_valid
        assert report.warnings


class TestReducedModelRecord:
    def test_verify_passes_for_built_model(self, third_order_system):
        generator = build_generator(dc=True, frequencies=[0.7])
        rom = build_rom(third_order_system, generator, np.ones((3, 1)))
        report = rom.verify(third_order_system)
        assert report.is_valid, report.errors
        assert report.details['rank_pi'] == 3

    def test_verify_flags_wrong_output_map(self, scalar_system, dc_generator):
        rom = ReducedOrderModel(dc_generator, [[1.0]], [[2.0]], [[1.0]])
        report = rom.verify(scalar_system)
        assert not report.is_valid

    def test_F_is_derived(self, scalar_system, dc_generator):
        rom = build_rom(scalar_system, dc_generator, [[1.0]])
        assert np.allclose(rom.F, [[-1.0]])
        F, G, H = rom.realization()
        assert np.allclose(H, [[1.0]])
