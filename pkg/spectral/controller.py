import logging
import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

import config
from models.enums import DeltaPolicy
from models.exceptions import (ClusterSeparationException, ConditioningWarning, KappaDegenerateException,
                               NumericalException, SpectrumHitException)
from spectral.schur_helper import SchurHelper
from spectral.spectral_models import (KappaGramResult, ModeProjector, ResolventSample, ResolventSweep,
                                      SpectralProjector, SpectralReport)
from utils.decorator import DecoratorUtils

INVERSE_ITERATION_TOL = 1e-6
INVERSE_ITERATION_MAXITER = 200
DISAGREEMENT_WARNING = 1e-4
CONDITION_WARNING = 1e8


class SpectralController:
    def __init__(self, seed: Optional[int] = None):
        self.seed = config.arnoldi_seed if seed is None else seed

    @DecoratorUtils.profile
    def compute_spectrum(self, P: sparse.spmatrix, n0: int, extra: int = 8) -> np.ndarray:
        """All eigenvalues at desk scale, the n0 + extra nearest to 0 by shift-invert Arnoldi above it"""
        size = P.shape[0]
        try:
            if size <= config.dense_limit:
                eigenvalues = linalg.eigvals(P.toarray())
            else:
                v0 = np.random.default_rng(self.seed).standard_normal(size)
                eigenvalues = sparse_linalg.eigs(P.tocsc(), k=min(n0 + extra, size - 2), sigma=0.0, which='LM',
                                                 v0=v0, return_eigenvectors=False)
        except (linalg.LinAlgError, sparse_linalg.ArpackError, sparse_linalg.ArpackNoConvergence) as e:
            logging.error(f"SPECTRAL_CONTROLLER: Eigensolver failed - size={size}, error={str(e)}")
            raise NumericalException({'size': size, 'error': str(e)})
        return eigenvalues[np.argsort(np.abs(eigenvalues))]

    def disk_radius(self, eigenvalues: np.ndarray, n0: int, h: float, tau_hat: float,
                    policy: DeltaPolicy = DeltaPolicy.spectral, kappa_min: Optional[float] = None,
                    override: Optional[float] = None) -> Tuple[float, float]:
        """delta_hat = min(tau_hat, 2 c_hat)/4 and the c_hat it was built from"""
        outside = np.asarray(eigenvalues)[np.argsort(np.abs(eigenvalues))][n0:]
        spectral_c = float(np.min(np.real(outside)) / h) if outside.size else float('inf')
        if policy == DeltaPolicy.certified:
            if kappa_min is None:
                raise ValueError("certified delta policy needs kappa_min from the hypocoercivity certificate")
            c_hat = kappa_min / h
        else:
            c_hat = spectral_c
        delta_hat = override if override is not None else min(tau_hat, 2.0 * c_hat) / 4.0
        logging.info(f"SPECTRAL_CONTROLLER: Disk radius - h={h}, policy={policy.value}, c_hat={c_hat}, "
                     f"delta_hat={delta_hat}")
        return float(delta_hat), float(c_hat)

    def small_eigenvalues(self, eigenvalues: np.ndarray, h: float, delta_hat: float,
                          min_gap_ratio: float = 10.0) -> SpectralReport:
        """Eigenvalues inside |z| < delta_hat h with the separation ratio from the rest"""
        eigenvalues = np.asarray(eigenvalues)
        radius = delta_hat * h
        inside = eigenvalues[np.abs(eigenvalues) < radius]
        outside = eigenvalues[np.abs(eigenvalues) >= radius]
        inside = inside[np.argsort(np.real(inside))]
        outside_abscissa = float(np.min(np.abs(np.real(outside)))) if outside.size else float('inf')
        largest_inside = float(np.max(np.abs(inside))) if inside.size else 0.0
        gap_ratio = outside_abscissa / largest_inside if largest_inside > 0 else float('inf')
        report = SpectralReport(h=h, small_eigenvalues=[complex(v) for v in inside], delta_hat=delta_hat,
                                gap_ratio=gap_ratio, outside_abscissa=outside_abscissa)
        logging.info(f"SPECTRAL_CONTROLLER: Small eigenvalues computed - h={h}, count={report.count}, "
                     f"gap_ratio={gap_ratio}")
        if gap_ratio < min_gap_ratio:
            logging.error(f"SPECTRAL_CONTROLLER: Cluster not separated - h={h}, gap_ratio={gap_ratio}, "
                          f"threshold={min_gap_ratio}")
            raise ClusterSeparationException(report)
        return report

    def resolvent_norm(self, P: sparse.spmatrix, z: complex, dense: Optional[np.ndarray] = None) -> float:
        """||(P - z)^-1|| = 1/sigma_min(P - z)"""
        return 1.0 / self.smallest_singular_value(P, z, dense)

    def smallest_singular_value(self, P: sparse.spmatrix, z: complex, dense: Optional[np.ndarray] = None) -> float:
        size = P.shape[0]
        if size <= config.svd_limit:
            shifted = (P.toarray() if dense is None else dense) - z * np.eye(size)
            sigma = float(linalg.svdvals(shifted)[-1])
        else:
            sigma = self._inverse_iteration(P, z)
        if not np.isfinite(sigma) or sigma <= 0.0:
            logging.error(f"SPECTRAL_CONTROLLER: Shift on the spectrum - z={z}")
            raise SpectrumHitException({'z': complex(z), 'sigma_min': sigma})
        return sigma

    def _inverse_iteration(self, P: sparse.spmatrix, z: complex) -> float:
        size = P.shape[0]
        shifted = (P - z * sparse.identity(size)).astype(complex).tocsc()
        try:
            lu = sparse_linalg.splu(shifted)
        except RuntimeError as e:
            logging.error(f"SPECTRAL_CONTROLLER: Singular shift - z={z}, error={str(e)}")
            raise SpectrumHitException({'z': complex(z), 'error': str(e)})
        rng = np.random.default_rng(self.seed)
        x = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        x /= np.linalg.norm(x)
        sigma = 0.0
        for _ in range(INVERSE_ITERATION_MAXITER):
            y = lu.solve(lu.solve(x), trans='H')
            norm_y = np.linalg.norm(y)
            if not np.isfinite(norm_y) or norm_y == 0.0:
                raise SpectrumHitException({'z': complex(z)})
            previous, sigma = sigma, 1.0 / np.sqrt(norm_y)
            x = y / norm_y
            if abs(sigma - previous) <= INVERSE_ITERATION_TOL * sigma:
                return float(sigma)
        logging.warning(f"SPECTRAL_CONTROLLER: Inverse iteration hit the cap - z={z}, sigma={sigma}")
        return float(sigma)

    @DecoratorUtils.profile
    def resolvent_sweep(self, P: sparse.spmatrix, h: float, delta1: float, delta_hat: float,
                        n_angles: int = 32, n_radii: int = 4, n_line: int = 16) -> ResolventSweep:
        """Polar grid of the annulus with angles offset by half a step, plus Re z = 0 between the radii"""
        if not 0 < delta1 <= delta_hat:
            raise ValueError(f"Need 0 < delta1 <= delta_hat, got delta1={delta1}, delta_hat={delta_hat}")
        dense = P.toarray() if P.shape[0] <= config.svd_limit else None
        radii = np.linspace(delta1 * h, delta_hat * h, n_radii)
        angles = 2.0 * np.pi * (np.arange(n_angles) + 0.5) / n_angles
        samples = [ResolventSample(z, self.smallest_singular_value(P, z, dense))
                   for r in radii for z in r * np.exp(1j * angles)]
        heights = np.linspace(delta1 * h, delta_hat * h, n_line)
        line_samples = [ResolventSample(z, self.smallest_singular_value(P, z, dense))
                        for z in np.concatenate([1j * heights, -1j * heights])]
        sweep = ResolventSweep(h=h, inner_radius=float(radii[0]), outer_radius=float(radii[-1]),
                               samples=samples, line_samples=line_samples,
                               accretive_norm=self.resolvent_norm(P, -1.0, dense))
        logging.info(f"SPECTRAL_CONTROLLER: Resolvent sweep - h={h}, samples={len(samples)}, "
                     f"summary={sweep.summary}, line_summary={sweep.line_summary}")
        return sweep

    @DecoratorUtils.profile
    def spectral_projector(self, P: sparse.spmatrix, h: float, delta_hat: float, nodes: int = 64,
                           expected_rank: Optional[int] = None) -> SpectralProjector:
        """Riesz projector of the disk |z| < delta_hat h, cross-checked against trapezoidal quadrature"""
        radius = delta_hat * h
        try:
            if P.shape[0] <= config.dense_limit:
                projector = self._schur_projector(P.toarray(), radius, nodes)
            else:
                projector = self._arnoldi_projector(P, radius, nodes, expected_rank)
        except (linalg.LinAlgError, sparse_linalg.ArpackError) as e:
            logging.error(f"SPECTRAL_CONTROLLER: Projector construction failed - h={h}, error={str(e)}")
            raise NumericalException({'h': h, 'error': str(e)})
        if projector.agreement is not None and projector.agreement > DISAGREEMENT_WARNING:
            logging.warning(f"SPECTRAL_CONTROLLER: Projector constructions disagree - h={h}, "
                            f"agreement={projector.agreement}")
            warnings.warn(ConditioningWarning({'h': h, 'agreement': projector.agreement}))
        logging.info(f"SPECTRAL_CONTROLLER: Spectral projector - h={h}, rank={projector.rank}, "
                     f"norm={projector.norm()}, agreement={projector.agreement}")
        return projector

    def _schur_projector(self, dense: np.ndarray, radius: float, nodes: int) -> SpectralProjector:
        T, Z, sdim, Tc, Zc = SchurHelper.sorted_schur(dense, radius)
        if sdim == 0:
            raise NumericalException({'radius': radius, 'reason': 'no eigenvalue inside the disk'})
        R = SchurHelper.decoupling_solution(Tc, sdim)
        Z1, Z2 = Zc[:, :sdim], Zc[:, sdim:]
        coefficients = Z1.conj().T - R @ Z2.conj().T
        agreement = SchurHelper.contour_agreement(Tc, sdim, R, radius, nodes=nodes, seed=self.seed)
        return SpectralProjector(basis=Z1, coefficients=coefficients, range_basis=Z[:, :sdim],
                                 eigenvalues=np.diag(Tc)[:sdim], agreement=agreement)

    def _arnoldi_projector(self, P: sparse.spmatrix, radius: float, nodes: int,
                           expected_rank: Optional[int]) -> SpectralProjector:
        size = P.shape[0]
        k = expected_rank or 1
        v0 = np.random.default_rng(self.seed).standard_normal(size)
        right_values, V = sparse_linalg.eigs(P.tocsc(), k=k, sigma=0.0, which='LM', v0=v0)
        left_values, W = sparse_linalg.eigs(P.T.tocsc(), k=k, sigma=0.0, which='LM', v0=v0)
        V = V[:, np.argsort(right_values.real)]
        W = W[:, np.argsort(left_values.real)]
        right_values = np.sort_complex(right_values)
        Qv, Rv = np.linalg.qr(V)
        coefficients = Rv @ np.linalg.solve(W.T @ V, W.T)
        real_span, singular_values, _ = np.linalg.svd(np.hstack([V.real, V.imag]), full_matrices=False)
        projector = SpectralProjector(basis=Qv, coefficients=coefficients, range_basis=real_span[:, :k],
                                      eigenvalues=right_values)

        # Probe-vector cross-check against the trapezoidal contour integral
        angles = 2.0 * np.pi * (np.arange(nodes) + 0.5) / nodes
        points = radius * np.exp(1j * angles)
        rng = np.random.default_rng(self.seed + 1)
        probes = rng.standard_normal((size, 3))
        contour = np.zeros(probes.shape, dtype=complex)
        identity = sparse.identity(size, format='csc')
        for z in points:
            lu = sparse_linalg.splu((z * identity - P).astype(complex).tocsc())
            contour += (z / nodes) * lu.solve(probes.astype(complex))
        exact = np.column_stack([projector.apply(probes[:, i]) for i in range(probes.shape[1])])
        projector.agreement = float(np.max(np.linalg.norm(contour.real - exact, axis=0)
                                           / np.linalg.norm(probes, axis=0)))
        return projector

    def pt_check(self, P: sparse.spmatrix, Ukappa: sparse.spmatrix) -> float:
        """||U P U - P^T||_F"""
        if P.shape != Ukappa.shape:
            raise ValueError(f"Dimension mismatch - P shape={P.shape}, Ukappa shape={Ukappa.shape}")
        return float(sparse_linalg.norm(Ukappa @ P @ Ukappa - P.T))

    def kappa_gram(self, projector: SpectralProjector, Ukappa: sparse.spmatrix, P: sparse.spmatrix) -> KappaGramResult:
        """kappa-form Gram matrix on range(Pi0), the real eigenvalues of P there and the per-mode projectors"""
        Q = projector.range_basis
        gram = Q.T @ (Ukappa @ Q)
        gram = 0.5 * (gram + gram.T)
        min_eig = float(np.min(linalg.eigvalsh(gram)))
        if min_eig <= 0:
            logging.error(f"SPECTRAL_CONTROLLER: Kappa form degenerate - rank={Q.shape[1]}, min_eig={min_eig}")
            raise KappaDegenerateException({'gram': gram.tolist(), 'min_eig': min_eig})
        restricted = Q.T @ (P @ Q)
        symmetric = gram @ restricted
        symmetric = 0.5 * (symmetric + symmetric.T)
        eigenvalues, C = linalg.eigh(symmetric, gram)
        condition = float(np.linalg.cond(C))
        if condition > CONDITION_WARNING:
            warnings.warn(ConditioningWarning({'eigvec_condition': condition}))
        mode_projectors = []
        for j in range(C.shape[1]):
            right = Q @ C[:, j]
            left = projector.apply_transpose(Q @ (gram @ C[:, j]))
            mode_projectors.append(ModeProjector(eigenvalue=float(eigenvalues[j]), right=right, left=left))
        result = KappaGramResult(gram=gram, min_eig=min_eig, eigenvalues=eigenvalues, eigvec_condition=condition,
                                 mode_projectors=mode_projectors)
        logging.info(f"SPECTRAL_CONTROLLER: Kappa gram - min_eig={min_eig}, eigenvalues={eigenvalues.tolist()}, "
                     f"condition={condition}")
        return result

    @staticmethod
    def eigenvalues_match(a: Sequence[complex], b: Sequence[complex], h: float, rtol: float) -> bool:
        """Sorted comparison with an absolute floor of 1e-12 h for the kernel eigenvalue"""
        a = np.sort_complex(np.asarray(a, dtype=complex))
        b = np.sort_complex(np.asarray(b, dtype=complex))
        if a.size != b.size:
            return False
        return bool(np.all(np.abs(a - b) <= rtol * np.abs(a) + 1e-12 * h))

    @staticmethod
    def relative_mismatch(a: Sequence[complex], b: Sequence[complex], h: float) -> float:
        a = np.sort_complex(np.asarray(a, dtype=complex))
        b = np.sort_complex(np.asarray(b, dtype=complex))
        if a.size != b.size:
            return float('inf')
        return float(np.max(np.abs(a - b) / (np.abs(a) + 1e-12 * h), initial=0.0))
