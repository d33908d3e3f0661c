from typing import Any, Dict, List, Optional

import numpy as np


class CriticalPoint:
    """Non-degenerate critical point of V"""

    def __init__(self, location: float = 0.0, value: float = 0.0, second_derivative: float = 0.0):
        self.location = location
        self.value = value
        self.second_derivative = second_derivative

    @property
    def is_minimum(self) -> bool:
        return self.second_derivative > 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CriticalPoint':
        return cls(
            location=data.get('location', 0.0),
            value=data.get('value', 0.0),
            second_derivative=data.get('second_derivative', 0.0)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'location': self.location,
            'value': self.value,
            'second_derivative': self.second_derivative
        }


class CriticalPointCatalog:
    """Minima and maxima of V sorted along the axis, with pairwise barrier heights"""

    def __init__(self, minima: Optional[List[CriticalPoint]] = None, saddles: Optional[List[CriticalPoint]] = None):
        self.minima = sorted(minima or [], key=lambda p: p.location)
        self.saddles = sorted(saddles or [], key=lambda p: p.location)
        self.barriers = self._barrier_matrix()

    @property
    def n0(self) -> int:
        return len(self.minima)

    @property
    def global_minimum_value(self) -> float:
        return min(p.value for p in self.minima)

    @property
    def points(self) -> List[CriticalPoint]:
        """All critical points in axis order"""
        return sorted(self.minima + self.saddles, key=lambda p: p.location)

    def alternates(self) -> bool:
        kinds = [p.is_minimum for p in self.points]
        return all(a != b for a, b in zip(kinds, kinds[1:]))

    def basin_edges(self) -> List[float]:
        """Saddle locations separating consecutive minima"""
        return [p.location for p in self.saddles
                if self.minima and self.minima[0].location < p.location < self.minima[-1].location]

    def smallest_barrier(self) -> Optional[float]:
        """Smallest finite off-diagonal barrier, None when n0 = 1"""
        if self.n0 < 2:
            return None
        off_diagonal = self.barriers[~np.eye(self.n0, dtype=bool)]
        return float(np.min(off_diagonal))

    def _barrier_matrix(self) -> np.ndarray:
        n0 = len(self.minima)
        barriers = np.zeros((n0, n0))
        for i, start in enumerate(self.minima):
            for j, end in enumerate(self.minima):
                if i == j:
                    continue
                lo, hi = sorted((start.location, end.location))
                peak = max([end.value] + [s.value for s in self.saddles if lo < s.location < hi])
                barriers[i, j] = peak - start.value
        return barriers

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CriticalPointCatalog':
        return cls(
            minima=[CriticalPoint.from_dict(p) for p in data.get('minima', [])],
            saddles=[CriticalPoint.from_dict(p) for p in data.get('saddles', [])]
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'minima': [p.to_dict() for p in self.minima],
            'saddles': [p.to_dict() for p in self.saddles],
            'n0': self.n0,
            'barriers': self.barriers.tolist()
        }


class HypothesisDiagnostics:
    """Numerical surrogate of the Morse and growth conditions on V"""

    def __init__(self, box: tuple = (0.0, 0.0), min_gradient_outside: float = 0.0,
                 max_second_derivative: float = 0.0, max_third_derivative: float = 0.0,
                 partition_values: Optional[Dict[float, float]] = None, passed: bool = False,
                 failures: Optional[List[str]] = None):
        self.box = box
        self.min_gradient_outside = min_gradient_outside
        self.max_second_derivative = max_second_derivative
        self.max_third_derivative = max_third_derivative
        self.partition_values = partition_values or {}
        self.passed = passed
        self.failures = failures or []

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HypothesisDiagnostics':
        return cls(
            box=tuple(data.get('box', (0.0, 0.0))),
            min_gradient_outside=data.get('min_gradient_outside', 0.0),
            max_second_derivative=data.get('max_second_derivative', 0.0),
            max_third_derivative=data.get('max_third_derivative', 0.0),
            partition_values={float(k): v for k, v in data.get('partition_values', {}).items()},
            passed=data.get('passed', False),
            failures=data.get('failures', [])
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'box': list(self.box),
            'min_gradient_outside': self.min_gradient_outside,
            'max_second_derivative': self.max_second_derivative,
            'max_third_derivative': self.max_third_derivative,
            'partition_values': {str(k): v for k, v in self.partition_values.items()},
            'passed': self.passed,
            'failures': self.failures
        }
