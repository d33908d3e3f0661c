from typing import Any, Dict, List, Optional


class HypoCertificate:
    """Modified coercivity estimate of P_h on the complement of the quasimodes"""

    def __init__(self, h: float = 0.0, epsilon: float = 0.0, norm_L: float = 0.0, norm_A: float = 0.0,
                 tau_hat: float = 0.0, kappa_min: float = 0.0, gap_lemma_min: Optional[float] = None,
                 commutator_residual: Optional[float] = None, crude_L_bound: Optional[float] = None,
                 halved_kappa_min: Optional[float] = None, quasimode_count: int = 0):
        self.h = h
        self.epsilon = epsilon
        self.norm_L = norm_L
        self.norm_A = norm_A
        self.tau_hat = tau_hat
        self.kappa_min = kappa_min
        self.gap_lemma_min = gap_lemma_min
        self.commutator_residual = commutator_residual
        self.crude_L_bound = crude_L_bound
        self.halved_kappa_min = halved_kappa_min
        self.quasimode_count = quasimode_count

    @property
    def implied_A(self) -> float:
        return self.h / self.kappa_min if self.kappa_min > 0 else float('inf')

    @property
    def predicted_bound(self) -> float:
        """epsilon tau_hat / 8, the lower bound on kappa_min/h implied by the epsilon constraints"""
        return self.epsilon * self.tau_hat / 8.0

    @property
    def epsilon_constraints_hold(self) -> bool:
        return self.epsilon <= 0.125 and self.epsilon * self.norm_L <= 0.5

    def sweep_row(self) -> List[float]:
        return [self.h, self.epsilon, self.norm_L, self.norm_A, self.kappa_min, self.implied_A]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HypoCertificate':
        return cls(
            h=data.get('h', 0.0),
            epsilon=data.get('epsilon', 0.0),
            norm_L=data.get('norm_L', 0.0),
            norm_A=data.get('norm_A', 0.0),
            tau_hat=data.get('tau_hat', 0.0),
            kappa_min=data.get('kappa_min', 0.0),
            gap_lemma_min=data.get('gap_lemma_min'),
            commutator_residual=data.get('commutator_residual'),
            crude_L_bound=data.get('crude_L_bound'),
            halved_kappa_min=data.get('halved_kappa_min'),
            quasimode_count=data.get('quasimode_count', 0)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'h': self.h,
            'epsilon': self.epsilon,
            'norm_L': self.norm_L,
            'norm_A': self.norm_A,
            'tau_hat': self.tau_hat,
            'kappa_min': self.kappa_min,
            'implied_A': self.implied_A,
            'predicted_bound': self.predicted_bound,
            'gap_lemma_min': self.gap_lemma_min,
            'commutator_residual': self.commutator_residual,
            'crude_L_bound': self.crude_L_bound,
            'halved_kappa_min': self.halved_kappa_min,
            'quasimode_count': self.quasimode_count
        }
