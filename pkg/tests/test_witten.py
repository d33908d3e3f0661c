"""
Unit tests for the Witten Laplacian controller
"""
import numpy as np
import pytest

from operators.controller import OperatorController
from operators.operator_schemas import GridSpec
from witten.controller import WittenController
from witten.witten_models import WittenReport


@pytest.fixture(scope="module")
def fine_harmonic_bundle(harmonic_spec):
    """Harmonic well at h = 0.1 resolved well enough for the closed form"""
    grid = GridSpec(x_min=-8.0, x_max=8.0, N=400, K=4, h=0.1)
    return OperatorController().assemble(harmonic_spec, grid)


class TestWittenSpectrum:
    """Test cases for W = A^T A and its small spectrum"""

    def test_harmonic_closed_form(self, harmonic_catalog, fine_harmonic_bundle):
        """Eigenvalues of the harmonic W are k h"""
        controller = WittenController()
        W = controller.assemble_witten(fine_harmonic_bundle.A)
        report = controller.witten_small_spectrum(W, harmonic_catalog.n0, 0.1)
        assert len(report.eigenvalues) == 6
        assert abs(report.eigenvalues[0]) <= 1e-6
        expected = 0.1 * np.arange(1, 6)
        assert np.allclose(report.eigenvalues[1:], expected, rtol=1e-4, atol=0.0)
        assert report.tau_hat == pytest.approx(1.0, rel=1e-4)
        assert report.count_below_half_gap == 1
        assert report.cluster_ok

    def test_witten_is_symmetric_psd(self, harmonic_bundle):
        W = WittenController().assemble_witten(harmonic_bundle.A)
        assert np.array_equal(W, W.T) or np.allclose(W, W.T, atol=1e-14)
        assert np.min(np.linalg.eigvalsh(W)) >= -1e-12

    def test_double_well_cluster(self, double_well_catalog, double_well_bundle):
        """Two exponentially small eigenvalues below half the gap"""
        report = WittenController().report(double_well_catalog, double_well_bundle)
        assert report.n0 == 2
        assert report.count_below_half_gap == 2
        assert report.eigenvalues[1] < 1e-2 * report.eigenvalues[2]
        assert report.tau_hat == 1.0
        assert report.tau_raw > 1.0
        assert len(report.quasimode_residuals) == 2
        assert all(r > 0 for r in report.quasimode_residuals)
        assert report.direct_formula_gap < 1e-6

    def test_quasimode_residual_shrinks_with_h(self, double_well_spec, double_well_catalog):
        """Residuals of the cut-off Gaussians decrease from h = 0.2 to h = 0.1"""
        controller = WittenController()
        residuals = []
        for h in (0.2, 0.1):
            grid = GridSpec(x_min=-3.0, x_max=3.0, N=128, K=4, h=h)
            A = controller.operator_controller.build_position_ladder(double_well_spec, grid)
            W = controller.assemble_witten(A)
            residuals.append(max(controller.quasimode_residual(W, double_well_catalog, double_well_spec, grid)))
        assert residuals[1] < residuals[0]

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            WittenController().assemble_witten(np.zeros((3, 4)))

    def test_grid_too_small_for_gap(self):
        with pytest.raises(ValueError):
            WittenController().witten_small_spectrum(np.eye(3), 3, 0.1)

    def test_report_serialization(self, double_well_catalog, double_well_bundle):
        report = WittenController().report(double_well_catalog, double_well_bundle)
        restored = WittenReport.from_dict(report.to_dict())
        assert restored.eigenvalues == report.eigenvalues
        assert restored.quasimode_residuals == report.quasimode_residuals
