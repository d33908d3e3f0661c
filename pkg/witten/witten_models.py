from typing import Any, Dict, List, Optional


class WittenReport:
    """Low-lying spectrum of W_h = A^T A and the estimated gap constant tau"""

    def __init__(self, h: float = 0.0, n0: int = 0, eigenvalues: Optional[List[float]] = None,
                 tau_hat: float = 0.0, tau_raw: float = 0.0, quasimode_residuals: Optional[List[float]] = None,
                 count_below_half_gap: int = 0, direct_formula_gap: Optional[float] = None):
        self.h = h
        self.n0 = n0
        self.eigenvalues = eigenvalues or []
        self.tau_hat = tau_hat
        self.tau_raw = tau_raw
        self.quasimode_residuals = quasimode_residuals or []
        self.count_below_half_gap = count_below_half_gap
        self.direct_formula_gap = direct_formula_gap

    @property
    def cluster_ok(self) -> bool:
        return self.count_below_half_gap == self.n0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'WittenReport':
        return cls(
            h=data.get('h', 0.0),
            n0=data.get('n0', 0),
            eigenvalues=data.get('eigenvalues', []),
            tau_hat=data.get('tau_hat', 0.0),
            tau_raw=data.get('tau_raw', 0.0),
            quasimode_residuals=data.get('residuals', []),
            count_below_half_gap=data.get('count_below_half_gap', 0),
            direct_formula_gap=data.get('direct_formula_gap')
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h': self.h,
            'n0': self.n0,
            'eigenvalues': list(self.eigenvalues),
            'tau_hat': self.tau_hat,
            'tau_raw': self.tau_raw,
            'residuals': list(self.quasimode_residuals),
            'count_below_half_gap': self.count_below_half_gap,
            'direct_formula_gap': self.direct_formula_gap
        }
