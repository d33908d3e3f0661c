import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg, sparse

import config
from hypocoercivity.hypo_models import HypoCertificate
from models.exceptions import CertificateFailureException, GapFailureException, NumericalException
from operators.controller import OperatorController
from operators.matrix_helper import MatrixHelper
from operators.operator_models import OperatorBundle, QuasimodeFamily
from utils.decorator import DecoratorUtils

GAP_TOLERANCE = 0.05


class HypocoercivityController:
    def __init__(self, seed: Optional[int] = None):
        self.seed = config.arnoldi_seed if seed is None else seed
        self.operator_controller = OperatorController()

    def build_auxiliary(self, bundle: OperatorBundle) -> Tuple[np.ndarray, float]:
        """L = Lambda^-2 a* b with a* b = B kron A^T; vanishes on velocity mode 0"""
        try:
            ab = sparse.kron(sparse.csr_matrix(bundle.B), sparse.csr_matrix(bundle.A.T)).toarray()
            L = bundle.lambda2.solve(ab)
        except Exception as e:
            logging.error(f"HYPO_CONTROLLER: Error building L - h={bundle.h}, error={str(e)}")
            raise NumericalException({'h': bundle.h, 'error': str(e)})
        norm_L = MatrixHelper.spectral_norm(lambda x: L @ x, lambda y: L.T @ y, L.shape[0], seed=self.seed)
        logging.info(f"HYPO_CONTROLLER: Auxiliary operator - h={bundle.h}, norm_L={norm_L}")
        return L, norm_L

    def crude_L_bound(self, bundle: OperatorBundle) -> float:
        """||Lambda^-2|| ||A^T|| ||B||"""
        return float(np.linalg.norm(bundle.A, 2) * np.linalg.norm(bundle.B, 2) / bundle.lambda2.min_eigenvalue())

    def build_A_operator(self, bundle: OperatorBundle, L: np.ndarray) -> Tuple[np.ndarray, float]:
        """-(1/h) Lambda^-2 [Lambda^2, X0] L - Lambda^-2 (b* Hess V b), dimensionless at scale h"""
        try:
            lambda2 = bundle.lambda2.matrix()
            commutator = (lambda2 @ bundle.X0 - bundle.X0 @ lambda2).tocsr()
            hessian = self.operator_controller.potential_controller.evaluate(bundle.potential,
                                                                             bundle.grid.positions, 2)
            curvature = sparse.kron(sparse.csr_matrix(bundle.B.T @ bundle.B), sparse.diags(hessian))
            operator = -bundle.lambda2.solve(np.asarray(commutator @ L) / bundle.h) \
                - bundle.lambda2.solve(curvature.toarray())
        except Exception as e:
            logging.error(f"HYPO_CONTROLLER: Error building the A operator - h={bundle.h}, error={str(e)}")
            raise NumericalException({'h': bundle.h, 'error': str(e)})
        norm_A = MatrixHelper.spectral_norm(lambda x: operator @ x, lambda y: operator.T @ y, operator.shape[0],
                                            seed=self.seed)
        logging.info(f"HYPO_CONTROLLER: A operator - h={bundle.h}, norm_A={norm_A}")
        return operator, norm_A

    def choose_epsilon(self, norm_L: float, norm_A: float, tau_hat: float) -> float:
        """min(1/8, 1/(2||L||), tau/(8(||A||^2 + ||L||^2)))"""
        if norm_L < 0 or norm_A < 0 or tau_hat <= 0:
            raise ValueError(f"choose_epsilon needs positive inputs - norm_L={norm_L}, norm_A={norm_A}, "
                             f"tau_hat={tau_hat}")
        candidates = [0.125]
        if norm_L > 0:
            candidates.append(1.0 / (2.0 * norm_L))
        if norm_L > 0 or norm_A > 0:
            candidates.append(tau_hat / (8.0 * (norm_A ** 2 + norm_L ** 2)))
        return float(min(candidates))

    def certificate(self, bundle: OperatorBundle, quasimodes: QuasimodeFamily, epsilon: float,
                    L: Optional[np.ndarray] = None, strict: bool = True) -> Tuple[float, np.ndarray]:
        """Smallest eigenvalue of the symmetric part of B P, B = I + eps (L + L^T), on span(quasimodes)^perp"""
        L = self.build_auxiliary(bundle)[0] if L is None else L
        P = bundle.dense_P()
        modified = np.eye(P.shape[0]) + epsilon * (L + L.T)
        form = 0.5 * (P.T @ modified + modified @ P)
        complement = linalg.qr(quasimodes.vectors, mode='full')[0][:, quasimodes.n0:]
        restricted = complement.T @ form @ complement
        restricted = 0.5 * (restricted + restricted.T)
        values, vectors = linalg.eigh(restricted, subset_by_index=[0, 0])
        kappa_min = float(values[0])
        minimizer = complement @ vectors[:, 0]
        logging.info(f"HYPO_CONTROLLER: Certificate - h={bundle.h}, epsilon={epsilon}, kappa_min={kappa_min}, "
                     f"quasimodes={quasimodes.n0}")
        if kappa_min <= 0 and strict:
            logging.error(f"HYPO_CONTROLLER: Certificate failed - h={bundle.h}, kappa_min={kappa_min}")
            raise CertificateFailureException({'h': bundle.h, 'kappa_min': kappa_min, 'vector': minimizer})
        return kappa_min, minimizer

    def gap_check(self, bundle: OperatorBundle, quasimodes: QuasimodeFamily, tau_hat: float,
                  tolerance: float = GAP_TOLERANCE, strict: bool = True) -> Tuple[float, np.ndarray]:
        """min of <Lambda^-2 a*a w, w>/|w|^2 over mode-0 position vectors orthogonal to the quasimodes"""
        W = bundle.A.T @ bundle.A
        eigenvalues, eigenvectors = linalg.eigh(W)
        eigenvalues = np.clip(eigenvalues, 0.0, None)
        quotient = (eigenvectors * (eigenvalues / (eigenvalues + bundle.h))) @ eigenvectors.T
        complement = linalg.qr(quasimodes.position_parts, mode='full')[0][:, quasimodes.n0:]
        restricted = complement.T @ quotient @ complement
        values, vectors = linalg.eigh(0.5 * (restricted + restricted.T), subset_by_index=[0, 0])
        gap_min = float(values[0])
        minimizer = complement @ vectors[:, 0]
        logging.info(f"HYPO_CONTROLLER: Gap check - h={bundle.h}, gap_min={gap_min}, tau_hat={tau_hat}")
        if gap_min < tau_hat / 4.0 - tolerance and strict:
            logging.error(f"HYPO_CONTROLLER: Gap lemma violated - h={bundle.h}, gap_min={gap_min}")
            raise GapFailureException({'h': bundle.h, 'gap_min': gap_min, 'vector': minimizer})
        return gap_min, minimizer

    @DecoratorUtils.profile
    def report(self, bundle: OperatorBundle, quasimodes: QuasimodeFamily, tau_hat: float,
               robustness: bool = True, strict: bool = False) -> HypoCertificate:
        """Every quantity of the certificate for one bundle"""
        try:
            L, norm_L = self.build_auxiliary(bundle)
            _, norm_A = self.build_A_operator(bundle, L)
            epsilon = self.choose_epsilon(norm_L, norm_A, tau_hat)
            kappa_min, _ = self.certificate(bundle, quasimodes, epsilon, L, strict=strict)
            halved = self.certificate(bundle, quasimodes, epsilon / 2.0, L, strict=False)[0] if robustness else None
            gap_min, _ = self.gap_check(bundle, quasimodes, tau_hat, strict=strict)
            return HypoCertificate(
                h=bundle.h, epsilon=epsilon, norm_L=norm_L, norm_A=norm_A, tau_hat=tau_hat, kappa_min=kappa_min,
                gap_lemma_min=gap_min,
                commutator_residual=self.operator_controller.commutator_residual(bundle.potential, bundle.grid,
                                                                                 bundle.A),
                crude_L_bound=self.crude_L_bound(bundle), halved_kappa_min=halved,
                quasimode_count=quasimodes.n0)
        except Exception as e:
            logging.error(f"HYPO_CONTROLLER: Error building certificate - h={bundle.h}, error={str(e)}")
            raise e
