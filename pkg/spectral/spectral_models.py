from typing import Any, Dict, List, Optional

import numpy as np


def complex_pairs(values) -> List[List[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


class SpectralReport:
    """Eigenvalue cluster of P_h inside |z| < delta_hat h and the certificates built on it"""

    def __init__(self, h: float = 0.0, small_eigenvalues: Optional[List[complex]] = None, delta_hat: float = 0.0,
                 c_hat: float = 0.0, gap_ratio: float = 0.0, outside_abscissa: float = 0.0,
                 projector_norm: Optional[float] = None, projector_rank: Optional[int] = None,
                 projector_agreement: Optional[float] = None, projector_idempotency: Optional[float] = None,
                 pt_residual: Optional[float] = None, kappa_gram_min_eig: Optional[float] = None,
                 eigvec_condition: Optional[float] = None, mode_projector_norms: Optional[List[float]] = None):
        self.h = h
        self.small_eigenvalues = small_eigenvalues or []
        self.delta_hat = delta_hat
        self.c_hat = c_hat
        self.gap_ratio = gap_ratio
        self.outside_abscissa = outside_abscissa
        self.projector_norm = projector_norm
        self.projector_rank = projector_rank
        self.projector_agreement = projector_agreement
        self.projector_idempotency = projector_idempotency
        self.pt_residual = pt_residual
        self.kappa_gram_min_eig = kappa_gram_min_eig
        self.eigvec_condition = eigvec_condition
        self.mode_projector_norms = mode_projector_norms or []

    @property
    def count(self) -> int:
        return len(self.small_eigenvalues)

    @property
    def max_imag(self) -> float:
        return float(max((abs(np.imag(v)) for v in self.small_eigenvalues), default=0.0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h': self.h,
            'small_eigenvalues': complex_pairs(self.small_eigenvalues),
            'delta_hat': self.delta_hat,
            'c_hat': self.c_hat,
            'gap_ratio': self.gap_ratio,
            'outside_abscissa': self.outside_abscissa,
            'projector_norm': self.projector_norm,
            'projector_rank': self.projector_rank,
            'projector_agreement': self.projector_agreement,
            'projector_idempotency': self.projector_idempotency,
            'pt_residual': self.pt_residual,
            'kappa_gram_min_eig': self.kappa_gram_min_eig,
            'eigvec_condition': self.eigvec_condition,
            'mode_projector_norms': list(self.mode_projector_norms)
        }


class ResolventSample:
    def __init__(self, z: complex, sigma_min: float):
        self.z = z
        self.sigma_min = sigma_min

    @property
    def norm(self) -> float:
        return 1.0 / self.sigma_min

    def to_row(self, h: float) -> List[float]:
        return [float(np.real(self.z)), float(np.imag(self.z)), self.sigma_min, self.norm, h]


class ResolventSweep:
    """Polar samples of the annulus delta1 h <= |z| <= delta_hat h plus the imaginary-axis segment"""

    def __init__(self, h: float, inner_radius: float, outer_radius: float,
                 samples: Optional[List[ResolventSample]] = None, line_samples: Optional[List[ResolventSample]] = None,
                 accretive_norm: Optional[float] = None):
        self.h = h
        self.inner_radius = inner_radius
        self.outer_radius = outer_radius
        self.samples = samples or []
        self.line_samples = line_samples or []
        self.accretive_norm = accretive_norm

    @property
    def summary(self) -> float:
        """max h ||(P - z)^-1|| over the annulus"""
        return max((self.h * s.norm for s in self.samples), default=0.0)

    @property
    def line_summary(self) -> float:
        return max((self.h * s.norm for s in self.line_samples), default=0.0)

    def rows(self) -> List[List[float]]:
        return [s.to_row(self.h) for s in self.samples + self.line_samples]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h': self.h,
            'annulus': [self.inner_radius, self.outer_radius],
            'summary': self.summary,
            'line_summary': self.line_summary,
            'accretive_norm': self.accretive_norm,
            'sample_count': len(self.samples),
            'line_sample_count': len(self.line_samples)
        }


class SpectralProjector:
    """Pi0 = basis @ coefficients with an orthonormal (complex) basis of its range"""

    def __init__(self, basis: np.ndarray, coefficients: np.ndarray, range_basis: np.ndarray,
                 eigenvalues: np.ndarray, agreement: Optional[float] = None):
        self.basis = basis
        self.coefficients = coefficients
        self.range_basis = range_basis
        self.eigenvalues = eigenvalues
        self.agreement = agreement

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def apply(self, u: np.ndarray) -> np.ndarray:
        return np.real(self.basis @ (self.coefficients @ u))

    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        return np.real(self.coefficients.T @ (self.basis.T @ v))

    def matrix(self) -> np.ndarray:
        return np.real(self.basis @ self.coefficients)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients, 2))

    def idempotency_defect(self) -> float:
        """||Pi0^2 - Pi0||_2"""
        inner = self.coefficients @ self.basis - np.eye(self.rank)
        return float(np.linalg.norm(inner @ self.coefficients, 2))


class ModeProjector:
    """Rank-one Pi_j = right left^T onto the eigenvector of mu_j"""

    def __init__(self, eigenvalue: float, right: np.ndarray, left: np.ndarray):
        self.eigenvalue = eigenvalue
        self.right = right
        self.left = left

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.right * float(self.left @ u)

    def norm(self) -> float:
        return float(np.linalg.norm(self.right) * np.linalg.norm(self.left))


class KappaGramResult:
    def __init__(self, gram: np.ndarray, min_eig: float, eigenvalues: np.ndarray, eigvec_condition: float,
                 mode_projectors: Optional[List[ModeProjector]] = None):
        self.gram = gram
        self.min_eig = min_eig
        self.eigenvalues = eigenvalues
        self.eigvec_condition = eigvec_condition
        self.mode_projectors = mode_projectors or []

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gram': self.gram.tolist(),
            'min_eig': self.min_eig,
            'eigenvalues': [float(v) for v in self.eigenvalues],
            'eigvec_condition': self.eigvec_condition,
            'mode_projector_norms': [p.norm() for p in self.mode_projectors]
        }
