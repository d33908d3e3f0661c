"""
Unit tests for the spectral controller
"""
import numpy as np
import pytest
from scipy import sparse

from models.enums import DeltaPolicy
from models.exceptions import ClusterSeparationException, KappaDegenerateException, SpectrumHitException
from operators.matrix_helper import MatrixHelper
from spectral.controller import SpectralController
from spectral.schur_helper import SchurHelper
from spectral.spectral_models import SpectralReport
from witten.controller import WittenController


@pytest.fixture(scope="module")
def cluster(double_well_catalog, small_double_well_bundle):
    """Spectrum, disk radius, small eigenvalues and projector of the double well at h = 0.1"""
    bundle = small_double_well_bundle
    controller = SpectralController(seed=1234)
    witten = WittenController().report(double_well_catalog, bundle)
    eigenvalues = controller.compute_spectrum(bundle.P, double_well_catalog.n0)
    delta_hat, c_hat = controller.disk_radius(eigenvalues, double_well_catalog.n0, bundle.h, witten.tau_hat)
    report = controller.small_eigenvalues(eigenvalues, bundle.h, delta_hat, min_gap_ratio=5.0)
    projector = controller.spectral_projector(bundle.P, bundle.h, delta_hat, expected_rank=double_well_catalog.n0)
    return {'bundle': bundle, 'controller': controller, 'eigenvalues': eigenvalues, 'delta_hat': delta_hat,
            'c_hat': c_hat, 'report': report, 'projector': projector}


class TestPtSymmetry:
    """Test cases for the kappa-symmetry residual"""

    def test_exact_pt_symmetry(self, small_double_well_bundle):
        bundle = small_double_well_bundle
        residual = SpectralController().pt_check(bundle.P, bundle.Ukappa)
        assert residual <= 1e-13 * MatrixHelper.frobenius(bundle.P)

    def test_dimension_mismatch(self, small_double_well_bundle):
        with pytest.raises(ValueError):
            SpectralController().pt_check(small_double_well_bundle.P, sparse.identity(3, format='csr'))


class TestSmallEigenvalues:
    """Test cases for the exponentially small cluster"""

    def test_spectrum_sorted_by_modulus(self, cluster):
        magnitudes = np.abs(cluster['eigenvalues'])
        assert np.all(np.diff(magnitudes) >= 0)

    def test_cluster_has_one_eigenvalue_per_minimum(self, cluster):
        report = cluster['report']
        assert report.count == 2
        assert report.gap_ratio >= 5.0
        assert report.outside_abscissa > 0

    def test_cluster_is_real(self, cluster):
        """PT-symmetry makes the small eigenvalues real"""
        report = cluster['report']
        assert report.max_imag <= 1e-10 * report.h

    def test_kernel_and_tunnelling_eigenvalue(self, cluster):
        mu = sorted(np.real(cluster['report'].small_eigenvalues))
        assert abs(mu[0]) <= 1e-8
        assert 0 < mu[1] < cluster['delta_hat'] * cluster['report'].h

    def test_disk_radius_formula(self, cluster):
        assert cluster['delta_hat'] == pytest.approx(min(1.0, 2.0 * cluster['c_hat']) / 4.0)

    def test_separation_failure_carries_report(self, cluster):
        """The exception object is the partial report"""
        with pytest.raises(ClusterSeparationException) as exc_info:
            cluster['controller'].small_eigenvalues(cluster['eigenvalues'], 0.1, cluster['delta_hat'],
                                                    min_gap_ratio=1e12)
        assert isinstance(exc_info.value.object, SpectralReport)
        assert exc_info.value.object.count == 2

    def test_certified_policy_needs_kappa(self, cluster):
        with pytest.raises(ValueError):
            cluster['controller'].disk_radius(cluster['eigenvalues'], 2, 0.1, 1.0, policy=DeltaPolicy.certified)

    def test_certified_policy_uses_kappa(self, cluster):
        delta_hat, c_hat = cluster['controller'].disk_radius(cluster['eigenvalues'], 2, 0.1, 1.0,
                                                             policy=DeltaPolicy.certified, kappa_min=0.01)
        assert c_hat == pytest.approx(0.1)
        assert delta_hat == pytest.approx(0.05)

    def test_explicit_radius_override(self, cluster):
        delta_hat, _ = cluster['controller'].disk_radius(cluster['eigenvalues'], 2, 0.1, 1.0, override=0.07)
        assert delta_hat == 0.07

    def test_eigenvalue_matching_helpers(self):
        a = [0.0, 1e-3]
        b = [1e-3 * (1 + 1e-10), 0.0]
        assert SpectralController.eigenvalues_match(a, b, 0.1, 1e-8)
        assert not SpectralController.eigenvalues_match(a, [0.0], 0.1, 1e-8)
        assert SpectralController.relative_mismatch(a, b, 0.1) == pytest.approx(1e-10, rel=1e-3)


class TestSpectralProjector:
    """Test cases for the Riesz projector of the cluster"""

    def test_rank_matches_cluster(self, cluster):
        assert cluster['projector'].rank == 2

    def test_schur_and_contour_agree(self, cluster):
        assert cluster['projector'].agreement <= 1e-6

    def test_idempotent(self, cluster):
        assert cluster['projector'].idempotency_defect() <= 1e-8

    def test_maxwellian_in_range(self, cluster):
        """The kernel vector is reproduced by Pi0"""
        M = cluster['bundle'].maxwellian
        assert np.linalg.norm(cluster['projector'].apply(M) - M) <= 1e-6

    def test_commutes_with_p(self, cluster):
        P = cluster['bundle'].P
        Pi0 = cluster['projector'].matrix()
        assert np.linalg.norm(P @ Pi0 - Pi0 @ P.toarray(), 2) <= 1e-8

    def test_range_basis_is_real_orthonormal(self, cluster):
        Q = cluster['projector'].range_basis
        assert np.isrealobj(Q)
        assert np.allclose(Q.T @ Q, np.eye(2), atol=1e-12)


class TestKappaGram:
    """Test cases for the kappa form on range(Pi0)"""

    def test_positive_definite(self, cluster):
        bundle = cluster['bundle']
        result = cluster['controller'].kappa_gram(cluster['projector'], bundle.Ukappa, bundle.P)
        assert result.min_eig > 0.8
        assert len(result.mode_projectors) == 2
        cluster_values = sorted(np.real(cluster['report'].small_eigenvalues))
        assert np.allclose(sorted(result.eigenvalues), cluster_values, rtol=1e-6, atol=1e-10)

    def test_mode_projectors_sum_to_pi0(self, cluster):
        bundle = cluster['bundle']
        result = cluster['controller'].kappa_gram(cluster['projector'], bundle.Ukappa, bundle.P)
        u = np.random.default_rng(5).standard_normal(bundle.size)
        total = sum(mode.apply(u) for mode in result.mode_projectors)
        assert np.allclose(total, cluster['projector'].apply(u), atol=1e-8)

    def test_degenerate_form_raises(self, cluster):
        size = cluster['bundle'].size
        with pytest.raises(KappaDegenerateException):
            cluster['controller'].kappa_gram(cluster['projector'], -sparse.identity(size, format='csr'),
                                             cluster['bundle'].P)


class TestResolvent:
    """Test cases for resolvent norms"""

    def test_singular_shift(self):
        P = sparse.diags([0.0, 1.0, 2.0], format='csr')
        with pytest.raises(SpectrumHitException):
            SpectralController().resolvent_norm(P, 0.0)

    def test_diagonal_resolvent(self):
        P = sparse.diags([0.5, 1.0, 2.0], format='csr')
        assert SpectralController().resolvent_norm(P, 0.0) == pytest.approx(2.0)

    def test_sweep_on_harmonic_well(self, harmonic_bundle):
        sweep = SpectralController().resolvent_sweep(harmonic_bundle.P, harmonic_bundle.h, 0.1, 0.2)
        assert len(sweep.rows()) == 32 * 4 + 2 * 16
        assert sweep.inner_radius == pytest.approx(0.02)
        assert sweep.outer_radius == pytest.approx(0.04)
        assert np.isfinite(sweep.summary) and sweep.summary > 0
        assert sweep.accretive_norm <= 1.0 + 1e-12

    def test_inner_radius_above_outer(self, harmonic_bundle):
        with pytest.raises(ValueError):
            SpectralController().resolvent_sweep(harmonic_bundle.P, harmonic_bundle.h, 0.3, 0.2)


class TestSchurHelper:
    """Test cases for the decoupling equation"""

    def test_decoupling_solution(self):
        rng = np.random.default_rng(7)
        T = np.triu(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
        T[np.diag_indices(6)] = [0.01, 0.02, 1.0, 2.0, 3.0, 4.0]
        R = SchurHelper.decoupling_solution(T, 2)
        T11, T12, T22 = T[:2, :2], T[:2, 2:], T[2:, 2:]
        assert np.allclose(T11 @ R - R @ T22, -T12, atol=1e-12)
