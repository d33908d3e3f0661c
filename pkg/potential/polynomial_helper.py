import logging
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly


class PolynomialHelper:
    """Exact operations on ascending-degree coefficient arrays"""

    @staticmethod
    def derivative(coefficients: Sequence[float], order: int) -> np.ndarray:
        """Coefficients of the order-th derivative"""
        coefficients = np.asarray(coefficients, dtype=float)
        if order == 0:
            return coefficients
        derived = npoly.polyder(coefficients, order)
        return derived if derived.size else np.zeros(1)

    @staticmethod
    def evaluate(coefficients: Sequence[float], x, order: int = 0):
        return npoly.polyval(x, PolynomialHelper.derivative(coefficients, order))

    @staticmethod
    def cauchy_bound(coefficients: Sequence[float]) -> float:
        """Every root r of the polynomial satisfies |r| <= bound"""
        coefficients = np.trim_zeros(np.asarray(coefficients, dtype=float), 'b')
        if coefficients.size < 2:
            return 0.0
        lead = coefficients[-1]
        return 1.0 + float(np.max(np.abs(coefficients[:-1] / lead)))

    @staticmethod
    def near_real_roots(coefficients: Sequence[float], imag_tol: float = 1e-6) -> np.ndarray:
        """Real parts of the roots whose imaginary part is below imag_tol*(1+|root|)"""
        coefficients = np.trim_zeros(np.asarray(coefficients, dtype=float), 'b')
        if coefficients.size < 2:
            return np.array([])
        roots = npoly.polyroots(coefficients)
        mask = np.abs(roots.imag) <= imag_tol * (1.0 + np.abs(roots))
        real_roots = np.sort(roots[mask].real)
        logging.debug(f"POLYNOMIAL_HELPER: Companion roots - total={roots.size}, near_real={real_roots.size}")
        return real_roots

    @staticmethod
    def rescale(coefficients: Sequence[float], h: float) -> np.ndarray:
        """Coefficients of V_h(x) = V(sqrt(h) x)/h, i.e. c_k -> c_k h^(k/2 - 1)"""
        coefficients = np.asarray(coefficients, dtype=float)
        powers = np.arange(coefficients.size) / 2.0 - 1.0
        return coefficients * np.power(h, powers)
