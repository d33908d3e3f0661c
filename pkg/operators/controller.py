import logging
import warnings
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize, sparse

from models.enums import DifferenceScheme, ExceptionMessage
from models.exceptions import ConfigurationException, ConfinementWarning, DomainException
from operators.matrix_helper import MatrixHelper
from operators.operator_models import Lambda2Factor, OperatorBundle, QuasimodeFamily
from operators.operator_schemas import CutoffSpec, GridSpec
from potential.controller import PotentialController
from potential.potential_models import CriticalPointCatalog
from potential.potential_schemas import PotentialSpec
from utils.decorator import DecoratorUtils

CONFINEMENT_RATIO = 1e-14
# exp(-36.8) ~ 1e-16
DOMAIN_DECAY = 36.8


class OperatorController:
    def __init__(self):
        self.potential_controller = PotentialController()

    def build_position_ladder(self, potential: PotentialSpec, grid: GridSpec) -> np.ndarray:
        """A = h D + diag(V'/2); the adjoint a* is A^T by definition"""
        D = MatrixHelper.derivative_matrix(grid.N, grid.dx, grid.scheme)
        slope = self.potential_controller.evaluate(potential, grid.positions, 1)
        return grid.h * D + np.diag(slope / 2.0)

    def build_velocity_ladder(self, K: int, h: float) -> np.ndarray:
        """Lowering operator in the scaled Hermite basis, B[k-1, k] = sqrt(h k)"""
        if K < 2 or h <= 0:
            raise ValueError(f"Velocity ladder needs K >= 2 and h > 0, got K={K}, h={h}")
        return np.diag(np.sqrt(h * np.arange(1, K)), k=1)

    def assemble_transport(self, A: np.ndarray, B: np.ndarray) -> sparse.csr_matrix:
        """X0 = B^T kron A - B kron A^T, velocity index slow"""
        self._check_square(A, 'A')
        self._check_square(B, 'B')
        Bs = sparse.csr_matrix(B)
        As = sparse.csr_matrix(A)
        return (sparse.kron(Bs.T, As) - sparse.kron(Bs, As.T)).tocsr()

    def direct_transport(self, A: np.ndarray, B: np.ndarray) -> sparse.csr_matrix:
        """v h d/dx - V' h d/dv written through the symmetric and skew parts of the ladders"""
        Bs = sparse.csr_matrix(B)
        multiply_v = Bs + Bs.T
        velocity_derivative = (Bs - Bs.T) / 2.0
        return (sparse.kron(multiply_v, sparse.csr_matrix((A - A.T) / 2.0))
                - sparse.kron(velocity_derivative, sparse.csr_matrix(A + A.T))).tocsr()

    def assemble_bgk(self, X0: sparse.spmatrix, K: int, h: float) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
        """P = X0 + h (I - Pi), Pi the projection onto velocity mode 0"""
        size = X0.shape[0]
        if X0.shape[0] != X0.shape[1] or size % K != 0:
            raise ValueError(f"Dimension mismatch - X0 shape={X0.shape}, K={K}")
        N = size // K
        ground = np.zeros(K)
        ground[0] = 1.0
        Pi = sparse.kron(sparse.diags(ground), sparse.identity(N), format='csr')
        P = (X0 + h * (sparse.identity(size, format='csr') - Pi)).tocsr()
        return P, Pi

    def assemble_lambda2(self, A: np.ndarray, B: np.ndarray, h: float, factorize: bool = True) -> Lambda2Factor:
        return Lambda2Factor(A, B, h, factorize=factorize)

    def build_ukappa(self, N: int, K: int) -> sparse.csr_matrix:
        """Velocity reversal diag((-1)^k) kron I_N"""
        parity = np.where(np.arange(K) % 2 == 0, 1.0, -1.0)
        return sparse.kron(sparse.diags(parity), sparse.identity(N), format='csr')

    def position_weight(self, potential: PotentialSpec, grid: GridSpec, v_min: Optional[float] = None) -> np.ndarray:
        """exp(-(V - V_min)/2h) on the grid"""
        values = self.potential_controller.evaluate(potential, grid.positions, 0)
        v_min = float(np.min(values)) if v_min is None else v_min
        return np.exp(-(values - v_min) / (2.0 * grid.h))

    def build_maxwellian(self, potential: PotentialSpec, grid: GridSpec, v_min: Optional[float] = None) -> np.ndarray:
        """Discrete M_h^{1/2}: normalized position weight in velocity mode 0"""
        weight = self.position_weight(potential, grid, v_min)
        norm = np.linalg.norm(weight)
        if norm == 0.0 or not np.isfinite(norm):
            logging.error(f"OPERATOR_CONTROLLER: Maxwellian underflow - h={grid.h}, domain=({grid.x_min}, {grid.x_max})")
            raise DomainException({'h': grid.h, 'x_min': grid.x_min, 'x_max': grid.x_max})
        return MatrixHelper.mode_vector(weight / norm, grid.K)

    def boundary_weight_ratio(self, potential: PotentialSpec, grid: GridSpec) -> float:
        weight = self.position_weight(potential, grid)
        return float(max(weight[0], weight[-1]) / np.max(weight))

    @DecoratorUtils.profile
    def assemble(self, potential: PotentialSpec, grid: GridSpec) -> OperatorBundle:
        """All discrete operators of one (potential, grid) pair"""
        try:
            ratio = self.boundary_weight_ratio(potential, grid)
            if ratio > CONFINEMENT_RATIO:
                logging.warning(f"OPERATOR_CONTROLLER: Weak confinement - h={grid.h}, boundary_ratio={ratio}")
                warnings.warn(ConfinementWarning({'h': grid.h, 'boundary_ratio': ratio}))

            D = MatrixHelper.derivative_matrix(grid.N, grid.dx, grid.scheme)
            A = self.build_position_ladder(potential, grid)
            B = self.build_velocity_ladder(grid.K, grid.h)
            X0 = self.assemble_transport(A, B)
            P, Pi = self.assemble_bgk(X0, grid.K, grid.h)
            lambda2 = self.assemble_lambda2(A, B, grid.h)
            Ukappa = self.build_ukappa(grid.N, grid.K)
            maxwellian = self.build_maxwellian(potential, grid)
            bundle = OperatorBundle(potential=potential, grid=grid, D=D, A=A, B=B, X0=X0, Pi=Pi, P=P,
                                    lambda2=lambda2, Ukappa=Ukappa, maxwellian=maxwellian)
            logging.info(f"OPERATOR_CONTROLLER: Bundle assembled - h={grid.h}, N={grid.N}, K={grid.K}, "
                         f"scheme={grid.scheme.value}, nnz={P.nnz}")
            return bundle
        except Exception as e:
            logging.error(f"OPERATOR_CONTROLLER: Error assembling operators - h={grid.h}, N={grid.N}, error={str(e)}")
            raise e

    def cutoff_parameters(self, catalog: CriticalPointCatalog, cutoffs: Optional[CutoffSpec] = None) -> List[Dict[str, float]]:
        """Center, inner radius and transition width of each chi_j"""
        cutoffs = cutoffs or CutoffSpec()
        if cutoffs.radii is not None and len(cutoffs.radii) != catalog.n0:
            raise ConfigurationException({'radii': cutoffs.radii, 'n0': catalog.n0})
        parameters = []
        for j, minimum in enumerate(catalog.minima):
            others = [abs(p.location - minimum.location) for p in catalog.points if p is not minimum]
            if cutoffs.radii is not None:
                radius = float(cutoffs.radii[j])
            elif others:
                radius = cutoffs.radius_factor * min(others)
            else:
                radius = float('inf')
            width = cutoffs.width_factor * radius
            parameters.append({'center': minimum.location, 'radius': radius, 'width': width})

        for left, right in zip(parameters, parameters[1:]):
            if left['center'] + left['radius'] + left['width'] > right['center'] - right['radius'] - right['width']:
                logging.error(f"OPERATOR_CONTROLLER: Overlapping cutoffs - left={left}, right={right}")
                raise ConfigurationException({'left': left, 'right': right},
                                             ExceptionMessage.overlapping_cutoffs.value)
        return parameters

    def build_quasimodes(self, catalog: CriticalPointCatalog, bundle: OperatorBundle,
                         cutoffs: Optional[CutoffSpec] = None) -> QuasimodeFamily:
        """g_j = normalized chi_j e^{-V/2h} in velocity mode 0, with residuals under P and P^T"""
        if catalog.n0 < 1:
            raise ValueError("Quasimodes need at least one minimum")
        grid = bundle.grid
        parameters = self.cutoff_parameters(catalog, cutoffs)
        weight = self.position_weight(bundle.potential, grid, catalog.global_minimum_value)

        position_parts = np.zeros((grid.N, catalog.n0))
        for j, cutoff in enumerate(parameters):
            part = MatrixHelper.cutoff(grid.positions, cutoff['center'], cutoff['radius'], cutoff['width']) * weight
            norm = np.linalg.norm(part)
            if norm == 0.0:
                logging.error(f"OPERATOR_CONTROLLER: Quasimode underflow - h={grid.h}, center={cutoff['center']}")
                raise DomainException({'h': grid.h, 'cutoff': cutoff})
            position_parts[:, j] = part / norm

        vectors = np.zeros((grid.size, catalog.n0))
        vectors[:grid.N, :] = position_parts
        family = QuasimodeFamily(
            vectors=vectors,
            position_parts=position_parts,
            cutoffs=parameters,
            residual_norms=[float(np.linalg.norm(bundle.P @ vectors[:, j])) for j in range(catalog.n0)],
            adjoint_residual_norms=[float(np.linalg.norm(bundle.P.T @ vectors[:, j])) for j in range(catalog.n0)],
            h=grid.h
        )
        logging.info(f"OPERATOR_CONTROLLER: Quasimodes built - h={grid.h}, n0={family.n0}, "
                     f"residuals={family.residual_norms}, max_overlap={family.max_off_diagonal()}")
        return family

    def default_domain(self, potential: PotentialSpec, catalog: CriticalPointCatalog, h: float,
                       decay: float = DOMAIN_DECAY) -> Tuple[float, float]:
        """Smallest symmetric extension beyond the outer minima with (V - V_min)/2h >= decay at both ends"""
        v_min = catalog.global_minimum_value
        left, right = catalog.minima[0].location, catalog.minima[-1].location

        def excess(edge, direction):
            return lambda R: (self.potential_controller.evaluate(potential, edge + direction * R, 0) - v_min) / (2 * h) - decay

        extensions = []
        for edge, direction in ((right, 1.0), (left, -1.0)):
            f = excess(edge, direction)
            upper = 1.0
            while f(upper) < 0:
                upper *= 2.0
            extensions.append(optimize.brentq(f, 0.0, upper, xtol=1e-12) if f(0.0) < 0 else 0.0)
        R = max(extensions)
        return float(left - R), float(right + R)

    def unit_scale_problem(self, potential: PotentialSpec, grid: GridSpec) -> Tuple[PotentialSpec, GridSpec]:
        """V_h on the grid mapped by x -> x/sqrt(h), at unit temperature"""
        scale = np.sqrt(grid.h)
        rescaled = self.potential_controller.rescale_potential(potential, grid.h)
        unit_grid = grid.model_copy(update={'x_min': grid.x_min / scale, 'x_max': grid.x_max / scale, 'h': 1.0})
        return rescaled, unit_grid

    def identity_report(self, bundle: OperatorBundle) -> Dict[str, float]:
        """Exact discrete algebra, every entry a relative residual expected at round-off"""
        size = bundle.size
        identity = sparse.identity(size, format='csr')
        P, X0, Pi, U = bundle.P, bundle.X0, bundle.Pi, bundle.Ukappa
        lambda2 = bundle.lambda2.matrix()
        report = {
            'transport_skew': MatrixHelper.relative_frobenius(X0 + X0.T, X0),
            'projection_symmetric': MatrixHelper.relative_frobenius(Pi - Pi.T, Pi),
            'projection_idempotent': MatrixHelper.relative_frobenius(Pi @ Pi - Pi, Pi),
            'bgk_form': MatrixHelper.relative_frobenius(P - X0 - bundle.h * (identity - Pi), P),
            'symmetric_part': MatrixHelper.relative_frobenius((P + P.T) / 2.0 - bundle.h * (identity - Pi), P),
            'ladder_direct': MatrixHelper.relative_frobenius(X0 - self.direct_transport(bundle.A, bundle.B), X0),
            'ukappa_square': MatrixHelper.relative_frobenius(U @ U - identity, identity),
            'pt_residual': MatrixHelper.relative_frobenius(U @ P @ U - P.T, P),
            'lambda2_symmetric': MatrixHelper.relative_frobenius(lambda2 - lambda2.T, lambda2),
            'lambda2_commutes_pi': MatrixHelper.relative_frobenius(lambda2 @ Pi - Pi @ lambda2, lambda2),
        }
        report['lambda2_min_eig_margin'] = (bundle.lambda2.min_eigenvalue() - bundle.h) / bundle.h
        logging.info(f"OPERATOR_CONTROLLER: Identity report - h={bundle.h}, "
                     f"max_residual={max(v for k, v in report.items() if k != 'lambda2_min_eig_margin')}")
        return report

    def maxwellian_residual(self, potential: PotentialSpec, grid: GridSpec, A: Optional[np.ndarray] = None) -> float:
        """||X0 M|| for the unit Maxwellian, zero in the continuum"""
        A = self.build_position_ladder(potential, grid) if A is None else A
        B = self.build_velocity_ladder(grid.K, grid.h)
        M = self.build_maxwellian(potential, grid)
        X0M = MatrixHelper.kron_apply(B.T, A, M, grid.K, grid.N) - MatrixHelper.kron_apply(B, A.T, M, grid.K, grid.N)
        return float(np.linalg.norm(X0M))

    def commutator_residual(self, potential: PotentialSpec, grid: GridSpec, A: Optional[np.ndarray] = None) -> float:
        """||([L2, X0] + h b*(H-1)a + h a*(H-1)b) u|| / ||L2 X0 u|| on a smooth two-mode probe"""
        A = self.build_position_ladder(potential, grid) if A is None else A
        B = self.build_velocity_ladder(grid.K, grid.h)
        K, N, h = grid.K, grid.N, grid.h
        lambda2 = self.assemble_lambda2(A, B, h, factorize=False)
        x = grid.positions
        center, spread = (grid.x_min + grid.x_max) / 2.0, (grid.x_max - grid.x_min) / 16.0
        probe = np.exp(-(x - center) ** 2 / (2.0 * spread ** 2))
        probe /= np.linalg.norm(probe)
        u = MatrixHelper.mode_vector(probe, K, {0: 1.0 / np.sqrt(2.0), 1: 1.0 / np.sqrt(2.0)})

        def transport(w):
            return MatrixHelper.kron_apply(B.T, A, w, K, N) - MatrixHelper.kron_apply(B, A.T, w, K, N)

        # The continuum commutator vanishes for a quadratic V, so scale by one of its two terms
        forward = lambda2.apply(transport(u))
        commutator = forward - transport(lambda2.apply(u))
        shifted_hessian = np.diag(self.potential_controller.evaluate(potential, x, 2) - 1.0)
        correction = h * (MatrixHelper.kron_apply(B.T, shifted_hessian @ A, u, K, N)
                          + MatrixHelper.kron_apply(B, A.T @ shifted_hessian, u, K, N))
        return float(np.linalg.norm(commutator + correction) / np.linalg.norm(forward))

    def quasimode_fd_residual(self, potential: PotentialSpec, catalog: CriticalPointCatalog, grid: GridSpec,
                              cutoffs: Optional[CutoffSpec] = None, A: Optional[np.ndarray] = None) -> float:
        """max_j ||A e_j - h chi_j' e^{-V/2h}|| / ||e_j||, the discretization part of the quasimode residual"""
        A = self.build_position_ladder(potential, grid) if A is None else A
        weight = self.position_weight(potential, grid, catalog.global_minimum_value)
        residuals = []
        for cutoff in self.cutoff_parameters(catalog, cutoffs):
            args = (grid.positions, cutoff['center'], cutoff['radius'], cutoff['width'])
            e = MatrixHelper.cutoff(*args) * weight
            exact = grid.h * MatrixHelper.cutoff_derivative(*args) * weight
            residuals.append(np.linalg.norm(A @ e - exact) / np.linalg.norm(e))
        return float(max(residuals))

    @DecoratorUtils.profile
    def refinement_report(self, potential: PotentialSpec, catalog: CriticalPointCatalog, grid: GridSpec,
                          levels: int = 3, cutoffs: Optional[CutoffSpec] = None) -> Dict[str, List[float]]:
        """Continuum-identity residuals on the centered scheme at N, 2N, 4N, ... and their successive ratios"""
        central = grid.model_copy(update={'scheme': DifferenceScheme.central})
        report = {'N': [], 'maxwellian': [], 'commutator': [], 'quasimode': []}
        for level in range(levels):
            refined = central.refined(2 ** level)
            A = self.build_position_ladder(potential, refined)
            report['N'].append(refined.N)
            report['maxwellian'].append(self.maxwellian_residual(potential, refined, A))
            report['commutator'].append(self.commutator_residual(potential, refined, A))
            report['quasimode'].append(self.quasimode_fd_residual(potential, catalog, refined, cutoffs, A))
        for key in ('maxwellian', 'commutator', 'quasimode'):
            values = report[key]
            report[f'{key}_ratios'] = [values[i] / values[i + 1] for i in range(len(values) - 1)]
        logging.info(f"OPERATOR_CONTROLLER: Refinement report - h={grid.h}, N={report['N']}, "
                     f"maxwellian_ratios={report['maxwellian_ratios']}, commutator_ratios={report['commutator_ratios']}")
        return report

    @staticmethod
    def _check_square(M: np.ndarray, name: str):
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"Dimension mismatch - {name} shape={M.shape}")
