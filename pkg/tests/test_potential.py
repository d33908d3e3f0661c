"""
Unit tests for the potential package
"""
import numpy as np
import pytest
from pydantic import ValidationError

from models.enums import PotentialKind
from models.exceptions import MorseViolationException
from potential.controller import PotentialController
from potential.polynomial_helper import PolynomialHelper
from potential.potential_models import CriticalPointCatalog, HypothesisDiagnostics
from potential.potential_schemas import PotentialSpec


class TestPotentialSpec:
    """Test cases for potential validation"""

    def test_presets_fill_coefficients(self):
        """Presets carry their ascending-degree coefficients"""
        assert PotentialSpec.preset('harmonic').coefficients == [0.0, 0.0, 0.5]
        assert PotentialSpec.preset('double_well').coefficients == [0.25, 0.0, -0.5, 0.0, 0.25]
        tilted = PotentialSpec.preset('tilted_double_well')
        assert tilted.tilt == 0.2
        assert tilted.coefficients[1] == 0.2

    def test_custom_tilt(self):
        """An explicit tilt becomes the linear coefficient"""
        spec = PotentialSpec.preset(PotentialKind.tilted_double_well, tilt=0.1)
        assert spec.coefficients == [0.25, 0.1, -0.5, 0.0, 0.25]

    def test_trailing_zeros_trimmed(self):
        """Trailing zero coefficients do not change the degree"""
        spec = PotentialSpec(coefficients=[0.0, 0.0, 1.0, 0.0, 0.0])
        assert spec.degree == 2

    def test_odd_degree_rejected(self):
        """Odd-degree polynomials are not confining"""
        with pytest.raises(ValidationError):
            PotentialSpec(coefficients=[0.0, 1.0, 0.0, 1.0])

    def test_negative_leading_coefficient_rejected(self):
        """A negative leading coefficient is not confining"""
        with pytest.raises(ValidationError):
            PotentialSpec(coefficients=[0.0, 0.0, -1.0])

    def test_tilt_only_for_tilted_preset(self):
        """tilt is rejected for other kinds"""
        with pytest.raises(ValidationError):
            PotentialSpec(kind='double_well', tilt=0.3)

    def test_unknown_key_rejected(self):
        """Strict parsing of potential records"""
        with pytest.raises(ValidationError):
            PotentialSpec(kind='harmonic', curvature=2.0)

    def test_dimension_restricted_to_one(self):
        """Only d = 1 is implemented"""
        with pytest.raises(ValidationError):
            PotentialSpec(kind='harmonic', dimension=2)

    def test_evenness(self):
        """is_even detects V(-x) = V(x)"""
        assert PotentialSpec.preset('double_well').is_even
        assert not PotentialSpec.preset('tilted_double_well').is_even


class TestPolynomialHelper:
    """Test cases for exact polynomial helpers"""

    def test_derivative_of_constant(self):
        """Differentiating below degree zero gives the zero polynomial"""
        assert PolynomialHelper.derivative([3.0], 2).tolist() == [0.0]

    def test_cauchy_bound_contains_roots(self):
        """Every root lies inside the Cauchy bound"""
        coefficients = [-6.0, 11.0, -6.0, 1.0]
        roots = np.roots(coefficients[::-1])
        assert np.all(np.abs(roots) <= PolynomialHelper.cauchy_bound(coefficients))

    def test_rescale_matches_definition(self):
        """V_h(x) = V(sqrt(h) x)/h"""
        coefficients = [0.25, 0.2, -0.5, 0.0, 0.25]
        h = 0.15
        x = np.linspace(-4.0, 4.0, 17)
        expected = PolynomialHelper.evaluate(coefficients, np.sqrt(h) * x) / h
        assert np.allclose(PolynomialHelper.evaluate(PolynomialHelper.rescale(coefficients, h), x), expected,
                           rtol=1e-13, atol=1e-13)


class TestPotentialController:
    """Test cases for PotentialController"""

    def test_evaluate_orders(self, double_well_spec):
        """V, V', V'', V''' of the double well at x = 2"""
        controller = PotentialController()
        assert controller.evaluate(double_well_spec, 2.0, 0) == pytest.approx(2.25)
        assert controller.evaluate(double_well_spec, 2.0, 1) == pytest.approx(6.0)
        assert controller.evaluate(double_well_spec, 2.0, 2) == pytest.approx(11.0)
        assert controller.evaluate(double_well_spec, 2.0, 3) == pytest.approx(12.0)

    def test_evaluate_invalid_order(self, double_well_spec):
        """Orders above 3 are an argument error"""
        with pytest.raises(ValueError):
            PotentialController().evaluate(double_well_spec, 0.0, 4)

    def test_double_well_critical_points(self, double_well_catalog):
        """Minima at +-1, saddle at 0, barrier 1/4"""
        assert double_well_catalog.n0 == 2
        assert [p.location for p in double_well_catalog.minima] == pytest.approx([-1.0, 1.0], abs=1e-12)
        assert [p.second_derivative for p in double_well_catalog.minima] == pytest.approx([2.0, 2.0])
        assert len(double_well_catalog.saddles) == 1
        assert double_well_catalog.saddles[0].location == pytest.approx(0.0, abs=1e-12)
        assert double_well_catalog.saddles[0].second_derivative == pytest.approx(-1.0)
        assert double_well_catalog.alternates()
        assert double_well_catalog.smallest_barrier() == pytest.approx(0.25)
        assert double_well_catalog.basin_edges() == pytest.approx([0.0], abs=1e-12)

    def test_harmonic_critical_points(self, harmonic_catalog):
        """A single minimum and no barrier"""
        assert harmonic_catalog.n0 == 1
        assert harmonic_catalog.saddles == []
        assert harmonic_catalog.smallest_barrier() is None
        assert harmonic_catalog.global_minimum_value == pytest.approx(0.0)

    def test_tilted_global_minimum_on_the_left(self, tilted_catalog):
        """The positive tilt lowers the left well"""
        left, right = tilted_catalog.minima
        assert left.value < right.value
        assert tilted_catalog.global_minimum_value == left.value

    def test_barrier_matrix_is_directional(self, tilted_catalog):
        """Escaping the shallow well costs less than escaping the deep one"""
        barriers = tilted_catalog.barriers
        assert barriers[1, 0] < barriers[0, 1]
        assert barriers[0, 0] == 0.0

    def test_degenerate_minimum_raises(self):
        """V = x^4 has V''(0) = 0"""
        spec = PotentialSpec(coefficients=[0.0, 0.0, 0.0, 0.0, 1.0])
        with pytest.raises(MorseViolationException) as exc_info:
            PotentialController().find_critical_points(spec)
        assert exc_info.value.object['location'] == pytest.approx(0.0, abs=1e-6)

    def test_tangential_critical_point_raises(self):
        """V' = x^2 (x - 1) touches zero at the origin without changing sign"""
        spec = PotentialSpec(coefficients=[0.0, 0.0, 0.0, -1.0 / 3.0, 0.25])
        with pytest.raises(MorseViolationException):
            PotentialController().find_critical_points(spec)

    def test_empty_search_box(self, double_well_spec):
        """An inverted box is an argument error"""
        with pytest.raises(ValueError):
            PotentialController().find_critical_points(double_well_spec, search_box=(1.0, -1.0))

    def test_hypothesis_check_passes_for_presets(self, double_well_spec):
        """Growth, derivative bounds and finite partition integrals"""
        controller = PotentialController()
        diagnostics = controller.check_hypothesis(double_well_spec, controller.default_search_box(double_well_spec),
                                                  h_values=[0.2, 0.1])
        assert diagnostics.passed
        assert diagnostics.failures == []
        assert all(value > 0 for value in diagnostics.partition_values.values())
        assert diagnostics.partition_values[0.1] < diagnostics.partition_values[0.2]

    def test_hypothesis_check_reports_flat_gradient(self, double_well_spec):
        """A box that cuts through the wells leaves small gradients outside"""
        diagnostics = PotentialController().check_hypothesis(double_well_spec, (-0.5, 0.5), gradient_floor=1.0)
        assert not diagnostics.passed
        assert diagnostics.failures

    def test_rescale_potential(self, double_well_spec):
        """Rescaled preset is an exact polynomial"""
        rescaled = PotentialController().rescale_potential(double_well_spec, 0.25)
        assert rescaled.kind == PotentialKind.polynomial
        assert rescaled.coefficients == pytest.approx([1.0, 0.0, -0.5, 0.0, 0.0625])

    def test_rescale_rejects_nonpositive_h(self, double_well_spec):
        """h <= 0 is an argument error"""
        with pytest.raises(ValueError):
            PotentialController().rescale_potential(double_well_spec, 0.0)

    def test_catalog_serialization(self, double_well_catalog):
        """from_dict(to_dict()) keeps locations and barriers"""
        restored = CriticalPointCatalog.from_dict(double_well_catalog.to_dict())
        assert restored.n0 == 2
        assert np.allclose(restored.barriers, double_well_catalog.barriers)

    def test_hypothesis_serialization(self, double_well_spec):
        """from_dict(to_dict()) restores float partition keys and the failure list"""
        diagnostics = PotentialController().check_hypothesis(double_well_spec, (-0.5, 0.5), h_values=[0.2, 0.1],
                                                             gradient_floor=1.0)
        restored = HypothesisDiagnostics.from_dict(diagnostics.to_dict())
        assert restored.box == tuple(diagnostics.box)
        assert restored.partition_values == diagnostics.partition_values
        assert restored.failures == diagnostics.failures
        assert restored.passed is False
