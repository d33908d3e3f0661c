"""
Unit tests for the semigroup controller
"""
import numpy as np
import pytest

from operators.controller import OperatorController
from operators.matrix_helper import MatrixHelper
from semigroup.controller import SemigroupController
from semigroup.krylov_helper import KrylovHelper
from spectral.controller import SpectralController


def cluster_projector(bundle, n0, tau_hat=1.0):
    """Spectrum, cluster report and Riesz projector with the default disk radius"""
    controller = SpectralController(seed=1234)
    eigenvalues = controller.compute_spectrum(bundle.P, n0)
    delta_hat, _ = controller.disk_radius(eigenvalues, n0, bundle.h, tau_hat)
    report = controller.small_eigenvalues(eigenvalues, bundle.h, delta_hat, min_gap_ratio=5.0)
    projector = controller.spectral_projector(bundle.P, bundle.h, delta_hat, expected_rank=n0)
    return report, projector


def mixed_state(bundle):
    """Maxwellian profile spread over velocity modes 0 and 1, unit norm"""
    profile = bundle.maxwellian[:bundle.N]
    u0 = MatrixHelper.mode_vector(profile, bundle.K, {0: 1.0, 1: 1.0})
    return u0 / np.linalg.norm(u0)


@pytest.fixture(scope="module")
def harmonic_cluster(harmonic_bundle):
    return cluster_projector(harmonic_bundle, 1)


class TestKrylovHelper:
    """Test cases for the Arnoldi exponential"""

    def test_arnoldi_relation(self, harmonic_bundle):
        P = harmonic_bundle.P
        v = np.random.default_rng(2).standard_normal(harmonic_bundle.size)
        V, H, k = KrylovHelper.arnoldi(lambda x: P @ x, v, 10)
        assert k == 10
        assert np.allclose(V.T @ V, np.eye(11), atol=1e-10)
        assert np.allclose(P @ V[:, :k], V @ H, atol=1e-10)

    def test_happy_breakdown(self):
        """An invariant two-dimensional subspace stops the iteration early"""
        M = np.diag([1.0, 2.0, 3.0, 4.0])
        v = np.array([1.0, 1.0, 0.0, 0.0])
        _, _, k = KrylovHelper.arnoldi(lambda x: M @ x, v, 4)
        assert k == 2

    def test_expv_diagonal(self):
        M = np.diag([0.0, 0.5, 1.0, 2.0])
        v = np.ones(4)
        result = KrylovHelper.expv(lambda x: M @ x, v, 3.0, m=4)
        assert np.allclose(result, np.exp(-3.0 * np.diag(M)), atol=1e-8)


class TestPropagation:
    """Test cases for exp(-tP)"""

    def test_zero_time_copies(self, harmonic_bundle):
        u0 = mixed_state(harmonic_bundle)
        result = SemigroupController().propagate(harmonic_bundle.P, u0, 0.0)
        assert result is not u0
        assert np.array_equal(result, u0)

    def test_negative_time_rejected(self, harmonic_bundle):
        with pytest.raises(ValueError):
            SemigroupController().propagate(harmonic_bundle.P, mixed_state(harmonic_bundle), -1.0)

    def test_decreasing_time_grid_rejected(self, harmonic_bundle):
        with pytest.raises(ValueError):
            SemigroupController().propagate_series(harmonic_bundle.P, mixed_state(harmonic_bundle), [0.0, 2.0, 1.0])

    def test_matches_dense_oracle(self, harmonic_bundle):
        u0 = np.random.default_rng(8).standard_normal(harmonic_bundle.size)
        agreement = SemigroupController().oracle_agreement(harmonic_bundle.P, u0, 5.0)
        assert agreement is not None
        assert agreement <= 1e-6

    def test_maxwellian_is_steady(self, harmonic_bundle):
        defect = SemigroupController().steady_state_defect(harmonic_bundle.P, harmonic_bundle.maxwellian,
                                                           np.linspace(0.0, 10.0, 11))
        assert defect <= 1e-3

    def test_contraction(self, harmonic_bundle):
        u0 = mixed_state(harmonic_bundle)
        controller = SemigroupController()
        states = controller.propagate_series(harmonic_bundle.P, u0, np.linspace(0.0, 10.0, 11))
        assert controller.contraction_excess(states, u0) <= 1e-10
        assert np.linalg.norm(states[-1]) < np.linalg.norm(states[1])


class TestDecay:
    """Test cases for the remainder decay and the decomposition"""

    def test_cluster_vector_has_no_remainder(self, harmonic_bundle, harmonic_cluster):
        _, projector = harmonic_cluster
        u0 = projector.apply(mixed_state(harmonic_bundle))
        fit = SemigroupController().decay_experiment(harmonic_bundle.P, projector, u0, np.linspace(0.0, 5.0, 6), 1.0,
                                                     harmonic_bundle.h)
        assert max(fit.remainder_norms) <= 1e-8

    def test_fitted_rate_matches_spectrum(self, harmonic_bundle, harmonic_cluster):
        """The tail decays at about the smallest real part outside the cluster"""
        report, projector = harmonic_cluster
        rate = report.outside_abscissa
        times = np.linspace(0.0, 10.0 / rate, 40)
        fit = SemigroupController().decay_experiment(harmonic_bundle.P, projector, mixed_state(harmonic_bundle),
                                                     times, rate, harmonic_bundle.h)
        assert fit.fitted_rate is not None
        assert 0.5 <= fit.rate_ratio <= 2.0
        assert fit.remainder_norms[-1] < fit.remainder_norms[0]

    def test_empty_decomposition(self, harmonic_bundle):
        """Without modes the residual is the norm of the propagated state"""
        controller = SemigroupController()
        u0 = mixed_state(harmonic_bundle)
        times = np.linspace(0.0, 4.0, 5)
        states = controller.propagate_series(harmonic_bundle.P, u0, times)
        report = controller.decompose_semigroup(harmonic_bundle.P, [], u0, times, None, states=states)
        assert report.mode_norms == []
        assert report.bound_constant is None
        assert np.allclose(report.residuals, np.linalg.norm(states, axis=1))

    def test_single_mode_decomposition(self, harmonic_bundle, harmonic_cluster):
        """For n0 = 1 the metastable part is the kernel projection"""
        report, projector = harmonic_cluster
        kappa = SpectralController().kappa_gram(projector, harmonic_bundle.Ukappa, harmonic_bundle.P)
        u0 = mixed_state(harmonic_bundle)
        rate = report.outside_abscissa
        times = np.linspace(0.0, 10.0 / rate, 20)
        decomposition = SemigroupController().decompose_semigroup(harmonic_bundle.P, kappa.mode_projectors, u0, times,
                                                                  rate, projector=projector)
        assert len(decomposition.mode_norms) == 1
        assert decomposition.residuals[-1] < 1e-3
        assert decomposition.commutation_defect <= 1e-6


class TestWellMasses:
    """Test cases for basin masses and the metastability time scales"""

    def test_symmetric_maxwellian_masses(self, double_well_catalog, double_well_bundle):
        masses = SemigroupController.well_masses(double_well_bundle.maxwellian, double_well_catalog,
                                                 double_well_bundle.grid.positions)
        assert masses == pytest.approx([0.5, 0.5], abs=1e-10)

    def test_default_start_well(self, double_well_catalog, tilted_catalog):
        assert SemigroupController.default_start_well(double_well_catalog) == 0
        assert SemigroupController.default_start_well(tilted_catalog) == 1

    def test_plateau_detection(self):
        times = np.logspace(-1, 3, 41)
        transferred = 0.5 * (1.0 - np.exp(-times / 100.0))
        masses = np.column_stack([1.0 - transferred, transferred])
        plateau = SemigroupController.find_plateau(times, masses)
        assert plateau is not None
        assert plateau[0] == pytest.approx(0.1)
        assert plateau[0] <= plateau[1] < 1.0

    def test_no_plateau(self):
        times = np.logspace(-1, 3, 41)
        transferred = 0.5 * (1.0 - np.exp(-times / 0.01))
        masses = np.column_stack([1.0 - transferred, transferred])
        assert SemigroupController.find_plateau(times, masses) is None

    def test_equilibration_time(self):
        times = np.linspace(0.0, 10.0, 11)
        excess = 0.5 * np.exp(-times)
        masses = np.column_stack([0.5 + excess, 0.5 - excess])
        assert SemigroupController.equilibration_time(times, masses, np.array([0.5, 0.5])) == 3.0

    def test_equilibration_not_reached(self):
        times = np.linspace(0.0, 1.0, 5)
        masses = np.column_stack([np.ones(5), np.zeros(5)])
        assert SemigroupController.equilibration_time(times, masses, np.array([0.5, 0.5])) is None

    def test_single_well_rejected(self, harmonic_catalog, harmonic_bundle):
        with pytest.raises(ValueError):
            SemigroupController().metastable_experiment(harmonic_bundle, harmonic_catalog, None, [0.0, 1.0])

    @pytest.mark.slow
    def test_tilted_transfer(self, tilted_catalog, tilted_bundle):
        """Mass leaves the shallow well and settles at the Maxwellian split"""
        eigenvalues = SpectralController(seed=1234).compute_spectrum(tilted_bundle.P, tilted_catalog.n0)
        mu2 = float(np.real(eigenvalues[1]))
        assert mu2 > 0
        quasimodes = OperatorController().build_quasimodes(tilted_catalog, tilted_bundle)
        times = np.linspace(0.0, 20.0 / mu2, 30)
        metastable = SemigroupController().metastable_experiment(tilted_bundle, tilted_catalog, quasimodes, times,
                                                                 mu2=mu2)
        assert metastable.start_well == 1
        assert metastable.masses[0].tolist() == pytest.approx([0.0, 1.0])
        assert metastable.limits[0] > metastable.limits[1]
        assert metastable.final_masses == pytest.approx(metastable.limits, abs=0.05)
        assert metastable.t_eq is not None
