import logging
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from models.exceptions import MorseViolationException
from potential.polynomial_helper import PolynomialHelper
from potential.potential_models import CriticalPoint, CriticalPointCatalog, HypothesisDiagnostics
from potential.potential_schemas import PotentialSpec
from models.enums import PotentialKind

MORSE_THRESHOLD = 1e-8
CRITICAL_RESIDUAL = 1e-10
MERGE_TOLERANCE = 1e-9


class PotentialController:
    def evaluate(self, spec: PotentialSpec, x, order: int = 0):
        """V and its first three derivatives by exact polynomial differentiation"""
        if order not in (0, 1, 2, 3):
            raise ValueError(f"Unsupported derivative order {order}, expected 0..3")
        return PolynomialHelper.evaluate(spec.coefficients, x, order)

    def default_search_box(self, spec: PotentialSpec) -> Tuple[float, float]:
        """Symmetric box containing every real root of V'"""
        radius = PolynomialHelper.cauchy_bound(PolynomialHelper.derivative(spec.coefficients, 1))
        radius = max(radius, 1.0)
        return -radius, radius

    def find_critical_points(self, spec: PotentialSpec, search_box: Optional[Tuple[float, float]] = None,
                             seed_count: int = 4001) -> CriticalPointCatalog:
        """Grid scan for sign changes of V', bracketed root finding, Newton polish"""
        try:
            lo, hi = search_box if search_box is not None else self.default_search_box(spec)
            if not lo < hi:
                raise ValueError(f"Empty search box [{lo}, {hi}]")
            if seed_count < 3:
                raise ValueError("seed_count must be at least 3")

            grid = np.linspace(lo, hi, seed_count)
            slope = self.evaluate(spec, grid, 1)
            roots = list(grid[slope == 0.0])
            signs = np.sign(slope)
            for i in np.where(signs[:-1] * signs[1:] < 0)[0]:
                root = optimize.brentq(lambda x: self.evaluate(spec, x, 1), grid[i], grid[i + 1],
                                       xtol=1e-15, maxiter=200)
                roots.append(self._newton_polish(spec, root, grid[i], grid[i + 1]))
            roots = self._merge(sorted(roots))

            # Roots of even multiplicity never change sign; the companion matrix still sees them
            for candidate in PolynomialHelper.near_real_roots(PolynomialHelper.derivative(spec.coefficients, 1)):
                if lo <= candidate <= hi and not any(abs(candidate - r) <= 1e-6 * (1 + abs(r)) for r in roots):
                    logging.error(f"POTENTIAL_CONTROLLER: Tangential critical point - location={candidate}")
                    raise MorseViolationException({'location': float(candidate),
                                                   'second_derivative': float(self.evaluate(spec, candidate, 2))})

            minima, saddles = [], []
            for root in roots:
                point = CriticalPoint(location=float(root),
                                      value=float(self.evaluate(spec, root, 0)),
                                      second_derivative=float(self.evaluate(spec, root, 2)))
                if abs(point.second_derivative) < MORSE_THRESHOLD:
                    logging.error(f"POTENTIAL_CONTROLLER: Degenerate critical point - location={point.location}, "
                                  f"second_derivative={point.second_derivative}")
                    raise MorseViolationException(point.to_dict())
                residual = abs(self.evaluate(spec, root, 1))
                if residual > CRITICAL_RESIDUAL:
                    logging.warning(f"POTENTIAL_CONTROLLER: Critical point residual above target - "
                                    f"location={point.location}, residual={residual}")
                (minima if point.is_minimum else saddles).append(point)

            catalog = CriticalPointCatalog(minima=minima, saddles=saddles)
            if not catalog.alternates():
                logging.warning(f"POTENTIAL_CONTROLLER: Minima and maxima do not alternate - box=({lo}, {hi})")
            logging.info(f"POTENTIAL_CONTROLLER: Critical points found - kind={spec.kind.value}, n0={catalog.n0}, "
                         f"saddles={len(catalog.saddles)}")
            return catalog
        except Exception as e:
            logging.error(f"POTENTIAL_CONTROLLER: Error finding critical points - kind={spec.kind.value}, error={str(e)}")
            raise e

    def check_hypothesis(self, spec: PotentialSpec, box: Tuple[float, float], samples: int = 2001,
                         h_values: Iterable[float] = (0.1,), gradient_floor: float = 1e-3,
                         derivative_ceiling: float = 1e8) -> HypothesisDiagnostics:
        """Gradient bound on an outer annulus, derivative bounds and partition integrals on the box"""
        lo, hi = box
        width = hi - lo
        outside = np.concatenate([np.linspace(lo - width / 2, lo, samples), np.linspace(hi, hi + width / 2, samples)])
        inside = np.linspace(lo, hi, samples)
        min_gradient = float(np.min(np.abs(self.evaluate(spec, outside, 1))))
        max_second = float(np.max(np.abs(self.evaluate(spec, inside, 2))))
        max_third = float(np.max(np.abs(self.evaluate(spec, inside, 3))))

        floor = float(np.min(self.evaluate(spec, inside, 0)))
        breakpoints = [x for x in np.linspace(lo, hi, 9)[1:-1]]
        partition_values = {}
        for h in h_values:
            value, _ = integrate.quad(lambda x: np.exp(-(self.evaluate(spec, x, 0) - floor) / h), lo, hi,
                                      points=breakpoints, limit=500, epsabs=0.0, epsrel=1e-12)
            partition_values[float(h)] = float(value * np.exp(-floor / h))

        failures = []
        if min_gradient < gradient_floor:
            failures.append(f"min |V'| outside box {min_gradient} < {gradient_floor}")
        if max(max_second, max_third) > derivative_ceiling:
            failures.append(f"derivative bound exceeds {derivative_ceiling}")
        if not all(np.isfinite(v) and v > 0 for v in partition_values.values()):
            failures.append("partition integral not finite and positive")

        diagnostics = HypothesisDiagnostics(box=(lo, hi), min_gradient_outside=min_gradient,
                                            max_second_derivative=max_second, max_third_derivative=max_third,
                                            partition_values=partition_values, passed=not failures,
                                            failures=failures)
        logging.info(f"POTENTIAL_CONTROLLER: Hypothesis check - box=({lo}, {hi}), passed={diagnostics.passed}, "
                     f"min_gradient={min_gradient}")
        return diagnostics

    def rescale_potential(self, spec: PotentialSpec, h: float) -> PotentialSpec:
        """V_h(x) = V(sqrt(h) x)/h as an exact polynomial"""
        if h <= 0:
            raise ValueError(f"h must be positive, got {h}")
        coefficients = PolynomialHelper.rescale(spec.coefficients, h)
        return PotentialSpec(kind=PotentialKind.polynomial, coefficients=coefficients.tolist())

    def _newton_polish(self, spec: PotentialSpec, root: float, lo: float, hi: float) -> float:
        best, best_residual = root, abs(self.evaluate(spec, root, 1))
        current = root
        for _ in range(5):
            curvature = self.evaluate(spec, current, 2)
            if curvature == 0.0 or best_residual == 0.0:
                break
            current = current - self.evaluate(spec, current, 1) / curvature
            if not lo <= current <= hi:
                break
            residual = abs(self.evaluate(spec, current, 1))
            if residual < best_residual:
                best, best_residual = current, residual
        return float(best)

    @staticmethod
    def _merge(roots: Sequence[float]) -> list:
        merged = []
        for root in roots:
            if merged and abs(root - merged[-1]) <= MERGE_TOLERANCE * (1 + abs(root)):
                continue
            merged.append(float(root))
        return merged
