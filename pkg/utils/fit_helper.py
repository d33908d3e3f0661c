import logging
from typing import Dict, Sequence

import numpy as np


class FitHelper:
    """Least-squares line fits used by the exponential-smallness and decay checks"""

    @staticmethod
    def linear_fit(x: Sequence[float], y: Sequence[float]) -> Dict[str, float]:
        """Fit y = slope*x + intercept and return slope, intercept and R^2"""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size != y.size or x.size < 2:
            raise ValueError("linear_fit needs at least two points of matching length")
        slope, intercept = np.polyfit(x, y, 1)
        predicted = slope * x + intercept
        ss_res = float(np.sum((y - predicted) ** 2))
        ss_tot = float(np.sum((y - np.mean(y)) ** 2))
        r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        logging.debug(f"FIT_HELPER: Linear fit - points={x.size}, slope={slope}, r_squared={r_squared}")
        return {'slope': float(slope), 'intercept': float(intercept), 'r_squared': float(r_squared)}

    @staticmethod
    def arrhenius_fit(h_values: Sequence[float], quantities: Sequence[float]) -> Dict[str, float]:
        """Fit log(quantity) against 1/h"""
        h_values = np.asarray(h_values, dtype=float)
        quantities = np.abs(np.asarray(quantities, dtype=float))
        if np.any(quantities <= 0):
            raise ValueError("arrhenius_fit needs strictly positive quantities")
        return FitHelper.linear_fit(1.0 / h_values, np.log(quantities))

    @staticmethod
    def spread_ratio(values: Sequence[float]) -> float:
        """max/min of positive values, the uniformity proxy of the h-sweeps"""
        values = np.abs(np.asarray(values, dtype=float))
        if values.size == 0:
            return 1.0
        smallest = float(np.min(values))
        if smallest <= 0:
            return float('inf')
        return float(np.max(values)) / smallest
