import logging
from typing import Callable, Optional

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

from models.enums import DifferenceScheme


class MatrixHelper:
    """Grid differentiation, tensor-layout helpers and norm estimates"""

    @staticmethod
    def derivative_matrix(N: int, dx: float, scheme: DifferenceScheme = DifferenceScheme.fourier) -> np.ndarray:
        """Antisymmetric first-derivative matrix on N uniform nodes"""
        if scheme == DifferenceScheme.central:
            D = (np.eye(N, k=1) - np.eye(N, k=-1)) / (2.0 * dx)
        else:
            period = N * dx
            k = np.arange(1, N)
            sign = np.where(k % 2 == 0, 1.0, -1.0)
            if N % 2 == 0:
                entries = 0.5 * sign / np.tan(k * np.pi / N)
            else:
                entries = 0.5 * sign / np.sin(k * np.pi / N)
            column = np.concatenate([[0.0], entries]) * (2.0 * np.pi / period)
            D = linalg.toeplitz(column, -column)
        return 0.5 * (D - D.T)

    @staticmethod
    def smoothstep(t):
        """Quintic step, 0 for t <= 0 and 1 for t >= 1 with two vanishing derivatives at both ends"""
        t = np.clip(t, 0.0, 1.0)
        return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)

    @staticmethod
    def smoothstep_derivative(t):
        inside = (t > 0.0) & (t < 1.0)
        t = np.clip(t, 0.0, 1.0)
        return np.where(inside, 30.0 * t ** 2 * (1.0 - t) ** 2, 0.0)

    @staticmethod
    def cutoff(positions: np.ndarray, center: float, radius: float, width: float) -> np.ndarray:
        if not np.isfinite(radius):
            return np.ones_like(positions)
        return 1.0 - MatrixHelper.smoothstep((np.abs(positions - center) - radius) / width)

    @staticmethod
    def cutoff_derivative(positions: np.ndarray, center: float, radius: float, width: float) -> np.ndarray:
        if not np.isfinite(radius):
            return np.zeros_like(positions)
        offset = positions - center
        return -np.sign(offset) * MatrixHelper.smoothstep_derivative((np.abs(offset) - radius) / width) / width

    @staticmethod
    def kron_apply(velocity_factor, position_factor, u: np.ndarray, K: int, N: int) -> np.ndarray:
        """(velocity_factor kron position_factor) u without forming the product"""
        modes = u.reshape(K, N)
        return np.asarray(velocity_factor @ (position_factor @ modes.T).T).reshape(-1)

    @staticmethod
    def mode_vector(position_part: np.ndarray, K: int, weights: Optional[dict] = None) -> np.ndarray:
        """position_part placed in velocity modes given by weights (default mode 0 only)"""
        weights = weights or {0: 1.0}
        modes = np.zeros((K, position_part.size), dtype=position_part.dtype)
        for k, weight in weights.items():
            modes[k] = weight * position_part
        return modes.reshape(-1)

    @staticmethod
    def spectral_norm(matvec: Callable, rmatvec: Callable, size: int, tol: float = 1e-4,
                      maxiter: int = 500, seed: int = 1234) -> float:
        """Largest singular value by power iteration on M^T M"""
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(size)
        x /= np.linalg.norm(x)
        estimate = 0.0
        for iteration in range(maxiter):
            y = rmatvec(matvec(x))
            norm_y = np.linalg.norm(y)
            if norm_y == 0.0:
                return 0.0
            previous, estimate = estimate, float(np.sqrt(norm_y))
            x = y / norm_y
            if abs(estimate - previous) <= tol * estimate:
                logging.debug(f"MATRIX_HELPER: Power iteration converged - iterations={iteration + 1}, norm={estimate}")
                return estimate
        logging.warning(f"MATRIX_HELPER: Power iteration hit the cap - maxiter={maxiter}, norm={estimate}")
        return estimate

    @staticmethod
    def frobenius(M) -> float:
        return float(sparse_linalg.norm(M) if sparse.issparse(M) else np.linalg.norm(M))

    @staticmethod
    def relative_frobenius(difference, reference) -> float:
        scale = MatrixHelper.frobenius(reference)
        residual = MatrixHelper.frobenius(difference)
        return residual / scale if scale > 0 else residual
