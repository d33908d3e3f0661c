from typing import Any, Dict, List, Optional

import numpy as np


class DecayFit:
    """Decay of exp(-tP)(I - Pi0) u0 and its exponential fit on the tail window"""

    def __init__(self, h: float = 0.0, times: Optional[List[float]] = None,
                 remainder_norms: Optional[List[float]] = None, fitted_rate: Optional[float] = None,
                 r_squared: Optional[float] = None, predicted_rate: float = 0.0, monotone_tail: bool = True):
        self.h = h
        self.times = times or []
        self.remainder_norms = remainder_norms or []
        self.fitted_rate = fitted_rate
        self.r_squared = r_squared
        self.predicted_rate = predicted_rate
        self.monotone_tail = monotone_tail

    @property
    def rate_ratio(self) -> Optional[float]:
        """fitted_rate over the smallest real part outside the cluster"""
        if self.fitted_rate is None or self.predicted_rate <= 0:
            return None
        return self.fitted_rate / self.predicted_rate

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h': self.h,
            'fitted_rate': self.fitted_rate,
            'r_squared': self.r_squared,
            'predicted_rate': self.predicted_rate,
            'rate_ratio': self.rate_ratio,
            'monotone_tail': self.monotone_tail,
            'sample_count': len(self.times)
        }


class DecompositionReport:
    """Residual of exp(-tP) u0 against the sum of the metastable modes"""

    def __init__(self, times: Optional[List[float]] = None, residuals: Optional[List[float]] = None,
                 mode_norms: Optional[List[float]] = None, eigenvalues: Optional[List[float]] = None,
                 bound_constant: Optional[float] = None, commutation_defect: Optional[float] = None):
        self.times = times or []
        self.residuals = residuals or []
        self.mode_norms = mode_norms or []
        self.eigenvalues = eigenvalues or []
        self.bound_constant = bound_constant
        self.commutation_defect = commutation_defect

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode_norms': list(self.mode_norms),
            'eigenvalues': list(self.eigenvalues),
            'bound_constant': self.bound_constant,
            'commutation_defect': self.commutation_defect
        }


class MetastableReport:
    """Well-mass time series started from one well, with plateau and equilibration times"""

    def __init__(self, h: float = 0.0, start_well: int = 0, times: Optional[List[float]] = None,
                 masses: Optional[np.ndarray] = None, limits: Optional[List[float]] = None,
                 plateau_start: Optional[float] = None, plateau_end: Optional[float] = None,
                 t_eq: Optional[float] = None, mu2: Optional[float] = None):
        self.h = h
        self.start_well = start_well
        self.times = times or []
        self.masses = masses if masses is not None else np.zeros((0, 0))
        self.limits = limits or []
        self.plateau_start = plateau_start
        self.plateau_end = plateau_end
        self.t_eq = t_eq
        self.mu2 = mu2

    @property
    def plateau_detected(self) -> bool:
        return self.plateau_start is not None

    @property
    def final_masses(self) -> List[float]:
        return self.masses[-1].tolist() if len(self.masses) else []

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h': self.h,
            'start_well': self.start_well,
            'limits': list(self.limits),
            'final_masses': self.final_masses,
            'plateau_detected': self.plateau_detected,
            'plateau_start': self.plateau_start,
            'plateau_end': self.plateau_end,
            't_eq': self.t_eq,
            'mu2': self.mu2
        }
