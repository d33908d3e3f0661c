"""
Unit tests for the operators package
"""
import numpy as np
import pytest
from scipy import sparse

from models.enums import DifferenceScheme
from models.exceptions import ConfigurationException, DomainException, NumericalException
from operators.controller import OperatorController
from operators.matrix_helper import MatrixHelper
from operators.operator_schemas import CutoffSpec, GridSpec
from tests.conftest import make_grid


class TestMatrixHelper:
    """Test cases for grid differentiation and layout helpers"""

    def test_fourier_derivative_is_spectrally_accurate(self):
        """Gaussian derivative to near round-off on a modest grid"""
        N, L = 128, 10.0
        x = np.linspace(-L, L, N)
        D = MatrixHelper.derivative_matrix(N, x[1] - x[0], DifferenceScheme.fourier)
        f = np.exp(-x ** 2)
        assert np.max(np.abs(D @ f + 2.0 * x * f)) < 1e-8

    def test_derivative_matrices_are_antisymmetric(self):
        """D^T = -D for both schemes"""
        for scheme in DifferenceScheme:
            D = MatrixHelper.derivative_matrix(33, 0.1, scheme)
            assert np.array_equal(D.T, -D)

    def test_central_derivative_is_second_order(self):
        """Halving dx divides the error by about four"""
        errors = []
        for N in (101, 201):
            x = np.linspace(-10.0, 10.0, N)
            D = MatrixHelper.derivative_matrix(N, x[1] - x[0], DifferenceScheme.central)
            f = np.exp(-x ** 2)
            errors.append(np.max(np.abs(D @ f + 2.0 * x * f)))
        assert 3.5 < errors[0] / errors[1] < 4.5

    def test_cutoff_plateau_and_support(self):
        """chi = 1 on the inner disk, 0 beyond r + w"""
        x = np.array([0.0, 0.4, 0.5, 0.75, 0.8, -0.8])
        chi = MatrixHelper.cutoff(x, 0.0, 0.5, 0.25)
        assert chi[:3].tolist() == [1.0, 1.0, 1.0]
        assert chi[3:].tolist() == [0.0, 0.0, 0.0]

    def test_kron_apply_matches_sparse_product(self):
        """Velocity-slow layout of the Kronecker product"""
        rng = np.random.default_rng(0)
        K, N = 4, 6
        V, X = rng.standard_normal((K, K)), rng.standard_normal((N, N))
        u = rng.standard_normal(K * N)
        assert np.allclose(MatrixHelper.kron_apply(V, X, u, K, N), np.kron(V, X) @ u)

    def test_spectral_norm_of_diagonal(self):
        """Power iteration recovers the largest entry"""
        M = np.diag([1.0, 3.0, 2.0])
        assert MatrixHelper.spectral_norm(lambda x: M @ x, lambda x: M.T @ x, 3, tol=1e-10) == pytest.approx(3.0)

    def test_relative_frobenius_of_zero_reference(self):
        """Zero reference falls back to the absolute residual"""
        assert MatrixHelper.relative_frobenius(sparse.identity(4), sparse.csr_matrix((4, 4))) == pytest.approx(2.0)


class TestOperatorAssembly:
    """Test cases for the discrete BGK operator"""

    def test_velocity_ladder(self):
        """B^T B = diag(h k)"""
        B = OperatorController().build_velocity_ladder(5, 0.2)
        assert np.allclose(np.diag(B.T @ B), 0.2 * np.arange(5))

    def test_velocity_ladder_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            OperatorController().build_velocity_ladder(1, 0.2)
        with pytest.raises(ValueError):
            OperatorController().build_velocity_ladder(4, 0.0)

    def test_transport_rejects_non_square(self):
        with pytest.raises(ValueError):
            OperatorController().assemble_transport(np.zeros((3, 2)), np.zeros((2, 2)))

    def test_bgk_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            OperatorController().assemble_bgk(sparse.identity(10, format='csr'), 4, 0.1)

    def test_identity_report_at_round_off(self, double_well_bundle):
        """Skewness, projection, PT-symmetry and Lambda^2 algebra hold exactly"""
        report = OperatorController().identity_report(double_well_bundle)
        margin = report.pop('lambda2_min_eig_margin')
        for name, value in report.items():
            assert value <= 1e-13, name
        assert margin >= -1e-10

    def test_identity_report_harmonic(self, harmonic_bundle):
        report = OperatorController().identity_report(harmonic_bundle)
        assert report['pt_residual'] <= 1e-13
        assert report['transport_skew'] <= 1e-13

    def test_maxwellian_in_kernel(self, double_well_bundle):
        """||P M|| vanishes up to the spectral discretization error"""
        M = double_well_bundle.maxwellian
        assert np.linalg.norm(M) == pytest.approx(1.0)
        assert np.linalg.norm(double_well_bundle.P @ M) <= 1e-6
        assert np.linalg.norm(double_well_bundle.P.T @ M) <= 1e-6

    def test_maxwellian_underflow(self, double_well_spec, double_well_catalog):
        """A reference value far below V underflows the weight"""
        grid = make_grid(double_well_spec, double_well_catalog, 0.05, 32, 4)
        with pytest.raises(DomainException):
            OperatorController().build_maxwellian(double_well_spec, grid, v_min=-1e6)

    def test_default_domain_decay(self, double_well_spec, double_well_catalog):
        """(V - V_min)/2h reaches the decay target at both ends"""
        controller = OperatorController()
        x_min, x_max = controller.default_domain(double_well_spec, double_well_catalog, 0.1)
        assert x_min == pytest.approx(-x_max)
        edge_value = controller.potential_controller.evaluate(double_well_spec, x_max, 0)
        assert edge_value / 0.2 == pytest.approx(36.8, rel=1e-8)

    def test_unit_scale_problem(self, double_well_spec):
        grid = GridSpec(x_min=-2.0, x_max=2.0, N=32, K=4, h=0.25)
        rescaled, unit_grid = OperatorController().unit_scale_problem(double_well_spec, grid)
        assert unit_grid.h == 1.0
        assert (unit_grid.x_min, unit_grid.x_max) == pytest.approx((-4.0, 4.0))
        assert rescaled.coefficients[-1] == pytest.approx(0.0625)


class TestLambda2Factor:
    """Test cases for the block-diagonal Lambda^2"""

    def test_solve_inverts_apply(self, harmonic_bundle):
        rng = np.random.default_rng(3)
        u = rng.standard_normal(harmonic_bundle.size)
        lambda2 = harmonic_bundle.lambda2
        assert np.allclose(lambda2.solve(lambda2.apply(u)), u, atol=1e-10)

    def test_apply_matches_matrix(self, harmonic_bundle):
        rng = np.random.default_rng(4)
        block = rng.standard_normal((harmonic_bundle.size, 3))
        lambda2 = harmonic_bundle.lambda2
        assert np.allclose(lambda2.apply(block), lambda2.matrix() @ block)

    def test_bounded_below_by_h(self, harmonic_bundle):
        assert harmonic_bundle.lambda2.min_eigenvalue() >= harmonic_bundle.h * (1 - 1e-12)

    def test_solve_without_factorization(self, harmonic_bundle):
        lambda2 = OperatorController().assemble_lambda2(harmonic_bundle.A, harmonic_bundle.B, harmonic_bundle.h,
                                                        factorize=False)
        with pytest.raises(NumericalException):
            lambda2.solve(np.ones(harmonic_bundle.size))


class TestQuasimodes:
    """Test cases for cutoffs and quasimodes"""

    def test_double_well_family(self, double_well_catalog, double_well_bundle):
        """Two normalized, disjointly supported quasimodes in velocity mode 0"""
        family = OperatorController().build_quasimodes(double_well_catalog, double_well_bundle)
        assert family.n0 == 2
        assert family.max_off_diagonal() == 0.0
        assert np.allclose(np.diag(family.gram), 1.0)
        assert np.count_nonzero(family.vectors[double_well_bundle.N:, :]) == 0
        assert len(family.residual_norms) == 2
        assert all(np.isfinite(family.residual_norms))

    def test_drop_quasimode(self, double_well_catalog, double_well_bundle):
        family = OperatorController().build_quasimodes(double_well_catalog, double_well_bundle)
        reduced = family.drop(0)
        assert reduced.n0 == 1
        assert reduced.cutoffs[0]['center'] == pytest.approx(1.0)

    def test_overlapping_cutoffs_rejected(self, double_well_catalog):
        """Cutoff supports of the two wells meet for radius_factor 0.9"""
        with pytest.raises(ConfigurationException):
            OperatorController().cutoff_parameters(double_well_catalog, CutoffSpec(radius_factor=0.9))

    def test_explicit_radii_must_match_minima(self, double_well_catalog):
        with pytest.raises(ConfigurationException):
            OperatorController().cutoff_parameters(double_well_catalog, CutoffSpec(radii=[0.3]))

    def test_single_well_cutoff_is_global(self, harmonic_catalog):
        """Without other critical points the cutoff is identically one"""
        parameters = OperatorController().cutoff_parameters(harmonic_catalog)
        assert parameters[0]['radius'] == float('inf')

    def test_harmonic_quasimode_is_maxwellian(self, harmonic_catalog, harmonic_bundle):
        family = OperatorController().build_quasimodes(harmonic_catalog, harmonic_bundle)
        assert np.allclose(family.vectors[:, 0], harmonic_bundle.maxwellian, atol=1e-12)


class TestRefinement:
    """Test cases for the centered-scheme convergence suite"""

    def test_second_order_ratios(self, double_well_spec, double_well_catalog):
        """Continuum residuals fall by about four per grid doubling"""
        grid = make_grid(double_well_spec, double_well_catalog, 0.1, 128, 4, DifferenceScheme.central)
        report = OperatorController().refinement_report(double_well_spec, double_well_catalog, grid, levels=3)
        assert report['N'] == [128, 256, 512]
        for key in ('maxwellian_ratios', 'commutator_ratios', 'quasimode_ratios'):
            assert all(3.0 <= ratio <= 5.0 for ratio in report[key]), key
