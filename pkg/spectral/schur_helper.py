import logging
from typing import Tuple

import numpy as np
from scipy import linalg


class SchurHelper:
    """Ordered Schur forms, the decoupling Sylvester equation and a contour cross-check in Schur coordinates"""

    @staticmethod
    def sorted_schur(M: np.ndarray, radius: float) -> Tuple[np.ndarray, np.ndarray, int, np.ndarray, np.ndarray]:
        """Real Schur form with the eigenvalues of modulus below radius leading, and its complex form"""
        radius_sq = radius * radius
        T, Z, sdim = linalg.schur(M, output='real', sort=lambda re, im: re * re + im * im < radius_sq)
        Tc, Zc = linalg.rsf2csf(T, Z)
        logging.debug(f"SCHUR_HELPER: Sorted Schur form - size={M.shape[0]}, radius={radius}, sdim={sdim}")
        return T, Z, int(sdim), Tc, Zc

    @staticmethod
    def decoupling_solution(Tc: np.ndarray, s: int) -> np.ndarray:
        """R with T11 R - R T22 = -T12, one triangular solve per row of R"""
        T11, T12, T22 = Tc[:s, :s], Tc[:s, s:], Tc[s:, s:]
        R = np.zeros(T12.shape, dtype=complex)
        shifted = -T22.copy()
        base_diagonal = np.diag(T22).copy()
        for i in range(s - 1, -1, -1):
            rhs = -T12[i] - T11[i, i + 1:s] @ R[i + 1:s]
            np.fill_diagonal(shifted, T11[i, i] - base_diagonal)
            R[i] = linalg.solve_triangular(shifted, rhs, trans='T', lower=False)
        return R

    @staticmethod
    def contour_agreement(Tc: np.ndarray, s: int, R: np.ndarray, radius: float, nodes: int = 64,
                          power_iterations: int = 8, seed: int = 1234) -> float:
        """Bound on ||Pi_contour - Pi_schur||_2 for the trapezoidal rule on |z| = radius

        In Schur coordinates the difference is [[C11 - I, C12 + R], [0, C22]]; the first block row is
        formed exactly and ||C22|| is estimated by power iteration.
        """
        T11, T12, T22 = Tc[:s, :s], Tc[:s, s:], Tc[s:, s:]
        n2 = T22.shape[0]
        angles = 2.0 * np.pi * (np.arange(nodes) + 0.5) / nodes
        points = radius * np.exp(1j * angles)
        weights = points / nodes
        work = -T22.copy()
        base_diagonal = np.diag(T22).copy()

        C11 = np.zeros((s, s), dtype=complex)
        C12 = np.zeros((s, n2), dtype=complex)
        for z, w in zip(points, weights):
            inner = linalg.solve_triangular(z * np.eye(s) - T11, np.eye(s))
            np.fill_diagonal(work, z - base_diagonal)
            right = linalg.solve_triangular(work, T12.T, trans='T').T
            C11 += w * inner
            C12 += w * (inner @ right)
        top = np.hstack([C11 - np.eye(s), C12 + R])

        def apply_c22(v, adjoint=False):
            total = np.zeros(n2, dtype=complex)
            for z, w in zip(points, weights):
                np.fill_diagonal(work, z - base_diagonal)
                if adjoint:
                    total += np.conj(w) * linalg.solve_triangular(work, v, trans='C')
                else:
                    total += w * linalg.solve_triangular(work, v)
            return total

        rng = np.random.default_rng(seed)
        v = rng.standard_normal(n2) + 1j * rng.standard_normal(n2)
        v /= np.linalg.norm(v)
        c22_norm = 0.0
        for _ in range(power_iterations):
            w = apply_c22(apply_c22(v), adjoint=True)
            norm_w = np.linalg.norm(w)
            if norm_w == 0.0:
                break
            c22_norm = float(np.sqrt(norm_w))
            v = w / norm_w
        agreement = float(np.linalg.norm(top, 2) + c22_norm)
        logging.debug(f"SCHUR_HELPER: Contour cross-check - nodes={nodes}, top_block={np.linalg.norm(top, 2)}, "
                      f"c22={c22_norm}")
        return agreement
