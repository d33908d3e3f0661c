import logging
from typing import Callable, Tuple

import numpy as np
from scipy import linalg

from models.exceptions import NumericalException

SAFETY = 0.9
MAX_GROWTH = 10.0
MAX_SUBSTEPS = 100000


class KrylovHelper:
    """Arnoldi exponential action exp(-t M) v with error-controlled substeps"""

    @staticmethod
    def arnoldi(matvec: Callable, v: np.ndarray, m: int) -> Tuple[np.ndarray, np.ndarray, int]:
        """Orthonormal Krylov basis V (n x (k+1)) and Hessenberg H ((k+1) x k); k < m on happy breakdown"""
        n = v.size
        V = np.zeros((n, m + 1), dtype=v.dtype)
        H = np.zeros((m + 1, m), dtype=v.dtype)
        beta = np.linalg.norm(v)
        V[:, 0] = v / beta
        for j in range(m):
            w = matvec(V[:, j])
            for i in range(j + 1):
                H[i, j] = np.vdot(V[:, i], w)
                w = w - H[i, j] * V[:, i]
            H[j + 1, j] = np.linalg.norm(w)
            if H[j + 1, j] <= 1e-12 * beta:
                return V[:, :j + 2], H[:j + 2, :j + 1], j + 1
            V[:, j + 1] = w / H[j + 1, j]
        return V, H, m

    @staticmethod
    def expv(matvec: Callable, v: np.ndarray, t: float, m: int = 30, tol: float = 1e-8) -> np.ndarray:
        """exp(-t M) v; each substep tau is accepted when beta |h_{k+1,k}| |[exp(-tau H_k)]_{k,1}| <= tol |v| tau/t"""
        w = np.array(v, dtype=float, copy=True)
        reference = np.linalg.norm(w)
        if t == 0.0 or reference == 0.0:
            return w
        m = min(m, w.size)
        elapsed, tau, substeps = 0.0, t, 0
        while t - elapsed > 1e-14 * t:
            beta = np.linalg.norm(w)
            if beta == 0.0:
                return w
            V, H, k = KrylovHelper.arnoldi(matvec, w, m)
            breakdown = abs(H[k, k - 1]) <= 1e-12 * beta
            tau = min(tau, t - elapsed)
            while True:
                substeps += 1
                if substeps > MAX_SUBSTEPS:
                    raise NumericalException({'t': t, 'elapsed': elapsed, 'reason': 'substep limit'})
                E = linalg.expm(-tau * H[:k, :k])
                error = 0.0 if breakdown else beta * abs(H[k, k - 1]) * abs(E[k - 1, 0])
                allowed = tol * reference * tau / t
                if error <= allowed:
                    break
                tau *= max(0.2, SAFETY * (allowed / error) ** (1.0 / k))
                if tau <= 1e-14 * t:
                    logging.error(f"KRYLOV_HELPER: Step size collapse - t={t}, elapsed={elapsed}, error={error}")
                    raise NumericalException({'t': t, 'elapsed': elapsed, 'tau': tau, 'error': error})
            w = beta * (V[:, :k] @ E[:, 0])
            elapsed += tau
            growth = MAX_GROWTH if error == 0.0 else min(MAX_GROWTH, SAFETY * (allowed / error) ** (1.0 / k))
            tau = tau * max(growth, 1.0)
        logging.debug(f"KRYLOV_HELPER: Exponential action - t={t}, substeps={substeps}")
        return w
