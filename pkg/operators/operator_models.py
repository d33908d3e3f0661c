import logging
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import linalg, sparse

from models.enums import ExceptionMessage
from models.exceptions import NumericalException
from operators.operator_schemas import GridSpec
from potential.potential_schemas import PotentialSpec


class Lambda2Factor:
    """Lambda^2 = I kron A^T A + B^T B kron I + h I, block diagonal over velocity modes

    Block k is A^T A + (B^T B)_kk + h, factored by Cholesky once per mode.
    """

    def __init__(self, A: np.ndarray, B: np.ndarray, h: float, factorize: bool = True):
        velocity = B.T @ B
        if np.count_nonzero(velocity - np.diag(np.diag(velocity))):
            raise ValueError("B^T B must be diagonal for the per-mode factorization")
        self.N = A.shape[0]
        self.K = B.shape[0]
        self.h = h
        self.position_block = A.T @ A
        self.shifts = np.diag(velocity) + h
        self.factors = []
        if factorize:
            for k, shift in enumerate(self.shifts):
                try:
                    self.factors.append(linalg.cho_factor(self.position_block + shift * np.eye(self.N), lower=True))
                except linalg.LinAlgError as e:
                    logging.error(f"LAMBDA2_FACTOR: Cholesky failed - mode={k}, shift={shift}, error={str(e)}")
                    raise NumericalException({'mode': k, 'shift': float(shift)},
                                             ExceptionMessage.factorization_error.value)

    @property
    def shape(self):
        return (self.N * self.K, self.N * self.K)

    def apply(self, u: np.ndarray) -> np.ndarray:
        modes = u.reshape(self.K, -1) if u.ndim == 1 else u.reshape(self.K, self.N, -1)
        if u.ndim == 1:
            result = modes @ self.position_block.T + self.shifts[:, None] * modes
        else:
            result = np.einsum('ij,kjm->kim', self.position_block, modes) + self.shifts[:, None, None] * modes
        return result.reshape(u.shape)

    def solve(self, u: np.ndarray) -> np.ndarray:
        """Lambda^-2 u for a vector or a block of columns"""
        if not self.factors:
            raise NumericalException({'reason': 'factorization not computed'})
        tail = u.shape[1:] if u.ndim > 1 else ()
        modes = u.reshape((self.K, self.N) + tail)
        result = np.empty(modes.shape, dtype=np.result_type(u.dtype, float))
        for k, factor in enumerate(self.factors):
            result[k] = linalg.cho_solve(factor, modes[k])
        return result.reshape(u.shape)

    def matrix(self) -> sparse.csr_matrix:
        blocks = [self.position_block + shift * np.eye(self.N) for shift in self.shifts]
        return sparse.block_diag(blocks, format='csr')

    def min_eigenvalue(self) -> float:
        smallest_block = linalg.eigvalsh(self.position_block, subset_by_index=[0, 0])[0]
        return float(smallest_block + np.min(self.shifts))


class OperatorBundle:
    """Discrete operators on one grid, immutable after assembly"""

    def __init__(self, potential: PotentialSpec, grid: GridSpec, D: np.ndarray, A: np.ndarray, B: np.ndarray,
                 X0: sparse.csr_matrix, Pi: sparse.csr_matrix, P: sparse.csr_matrix,
                 lambda2: Lambda2Factor, Ukappa: sparse.csr_matrix, maxwellian: np.ndarray):
        self.potential = potential
        self.grid = grid
        self.D = D
        self.A = A
        self.B = B
        self.X0 = X0
        self.Pi = Pi
        self.P = P
        self.lambda2 = lambda2
        self.Ukappa = Ukappa
        self.maxwellian = maxwellian
        self._dense_P = None

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def N(self) -> int:
        return self.grid.N

    @property
    def K(self) -> int:
        return self.grid.K

    @property
    def size(self) -> int:
        return self.grid.size

    def dense_P(self) -> np.ndarray:
        if self._dense_P is None:
            self._dense_P = self.P.toarray()
        return self._dense_P

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grid': self.grid.model_dump(mode='json'),
            'potential': self.potential.model_dump(mode='json'),
            'size': self.size,
            'nnz_P': int(self.P.nnz)
        }


class QuasimodeFamily:
    """Normalized g_j = chi_j e^{-V/2h} kron (velocity ground mode), one per minimum"""

    def __init__(self, vectors: np.ndarray, position_parts: np.ndarray, cutoffs: List[Dict[str, float]],
                 residual_norms: Optional[List[float]] = None, adjoint_residual_norms: Optional[List[float]] = None,
                 gram: Optional[np.ndarray] = None, h: float = 0.0):
        self.vectors = vectors
        self.position_parts = position_parts
        self.cutoffs = cutoffs
        self.residual_norms = residual_norms or []
        self.adjoint_residual_norms = adjoint_residual_norms or []
        self.gram = gram if gram is not None else vectors.T @ vectors
        self.h = h

    @property
    def n0(self) -> int:
        return self.vectors.shape[1]

    def max_off_diagonal(self) -> float:
        if self.n0 < 2:
            return 0.0
        return float(np.max(np.abs(self.gram - np.diag(np.diag(self.gram)))))

    def drop(self, index: int) -> 'QuasimodeFamily':
        """Family without the quasimode of one minimum"""
        keep = [j for j in range(self.n0) if j != index]
        return QuasimodeFamily(
            vectors=self.vectors[:, keep],
            position_parts=self.position_parts[:, keep],
            cutoffs=[self.cutoffs[j] for j in keep],
            residual_norms=[self.residual_norms[j] for j in keep] if self.residual_norms else None,
            adjoint_residual_norms=[self.adjoint_residual_norms[j] for j in keep] if self.adjoint_residual_norms else None,
            h=self.h
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h': self.h,
            'n0': self.n0,
            'cutoffs': self.cutoffs,
            'residual_norms': list(self.residual_norms),
            'adjoint_residual_norms': list(self.adjoint_residual_norms),
            'gram': self.gram.tolist()
        }
