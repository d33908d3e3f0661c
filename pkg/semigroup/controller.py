import logging
import warnings
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg, sparse

import config
from models.exceptions import TransientWarning
from operators.operator_models import OperatorBundle, QuasimodeFamily
from potential.potential_models import CriticalPointCatalog
from semigroup.krylov_helper import KrylovHelper
from semigroup.semigroup_models import DecayFit, DecompositionReport, MetastableReport
from spectral.spectral_models import ModeProjector, SpectralProjector
from utils.decorator import DecoratorUtils
from utils.fit_helper import FitHelper

KRYLOV_DIMENSION = 30
PROPAGATION_TOL = 1e-8
TAIL_FRACTION = 0.8
PLATEAU_CHANGE = 0.01
LIMIT_TOLERANCE = 0.05


class SemigroupController:
    def __init__(self, krylov_dimension: int = KRYLOV_DIMENSION, tol: float = PROPAGATION_TOL):
        self.krylov_dimension = krylov_dimension
        self.tol = tol

    def propagate(self, P: sparse.spmatrix, u0: np.ndarray, t: float) -> np.ndarray:
        """exp(-tP) u0"""
        if t < 0:
            raise ValueError(f"Propagation time must be nonnegative, got {t}")
        if t == 0:
            return np.array(u0, dtype=float, copy=True)
        return KrylovHelper.expv(lambda x: P @ x, u0, t, m=self.krylov_dimension, tol=self.tol)

    def propagate_series(self, P: sparse.spmatrix, u0: np.ndarray, times: Sequence[float]) -> np.ndarray:
        """States at nondecreasing times, each step started from the previous state"""
        times = np.asarray(times, dtype=float)
        if times.size and (times[0] < 0 or np.any(np.diff(times) < 0)):
            raise ValueError("Time grid must be nonnegative and nondecreasing")
        states = np.zeros((times.size, np.size(u0)))
        state, now = np.array(u0, dtype=float), 0.0
        for i, t in enumerate(times):
            state = self.propagate(P, state, t - now)
            now = t
            states[i] = state
        return states

    def dense_oracle(self, P: sparse.spmatrix, u0: np.ndarray, t: float) -> Optional[np.ndarray]:
        """Scaling-and-squaring exp(-tP) u0, only up to the oracle size limit"""
        if P.shape[0] > config.expm_oracle_limit:
            return None
        return linalg.expm(-t * P.toarray()) @ u0

    def oracle_agreement(self, P: sparse.spmatrix, u0: np.ndarray, t: float) -> Optional[float]:
        reference = self.dense_oracle(P, u0, t)
        if reference is None:
            return None
        return float(np.linalg.norm(self.propagate(P, u0, t) - reference) / np.linalg.norm(u0))

    def steady_state_defect(self, P: sparse.spmatrix, maxwellian: np.ndarray, times: Sequence[float]) -> float:
        """max_t ||exp(-tP) M - M|| for the unit Maxwellian"""
        states = self.propagate_series(P, maxwellian, times)
        return float(np.max(np.linalg.norm(states - maxwellian, axis=1)))

    @staticmethod
    def contraction_excess(states: np.ndarray, u0: np.ndarray) -> float:
        """max_t ||exp(-tP) u0|| / ||u0|| - 1"""
        return float(np.max(np.linalg.norm(states, axis=1)) / np.linalg.norm(u0) - 1.0)

    @DecoratorUtils.profile
    def decay_experiment(self, P: sparse.spmatrix, projector: SpectralProjector, u0: np.ndarray,
                         time_grid: Sequence[float], predicted_rate: float, h: float = 0.0) -> DecayFit:
        """Remainder exp(-tP)(I - Pi0) u0 and its fitted decay rate on the tail window"""
        try:
            times = np.asarray(time_grid, dtype=float)
            remainder = u0 - projector.apply(u0)
            states = self.propagate_series(P, remainder, times)
            norms = np.linalg.norm(states, axis=1)
            tail = slice(int(round((1.0 - TAIL_FRACTION) * times.size)), times.size)
            tail_norms = norms[tail]
            fit = DecayFit(h=h, times=times.tolist(), remainder_norms=norms.tolist(), predicted_rate=predicted_rate)
            if np.all(tail_norms > 1e-12 * np.linalg.norm(u0)):
                line = FitHelper.linear_fit(times[tail], np.log(tail_norms))
                fit.fitted_rate = -line['slope']
                fit.r_squared = line['r_squared']
            fit.monotone_tail = bool(np.all(np.diff(tail_norms) <= 1e-8 * tail_norms[:-1] + 1e-14))
            if not fit.monotone_tail:
                logging.warning(f"SEMIGROUP_CONTROLLER: Non-monotone tail - h={h}")
                warnings.warn(TransientWarning({'h': h, 'tail_norms': tail_norms.tolist()}))
            logging.info(f"SEMIGROUP_CONTROLLER: Decay experiment - h={h}, fitted_rate={fit.fitted_rate}, "
                         f"predicted_rate={predicted_rate}, r_squared={fit.r_squared}")
            return fit
        except Exception as e:
            logging.error(f"SEMIGROUP_CONTROLLER: Error in decay experiment - h={h}, error={str(e)}")
            raise e

    def decompose_semigroup(self, P: sparse.spmatrix, mode_projectors: List[ModeProjector], u0: np.ndarray,
                            time_grid: Sequence[float], fitted_rate: Optional[float],
                            projector: Optional[SpectralProjector] = None,
                            states: Optional[np.ndarray] = None) -> DecompositionReport:
        """||exp(-tP) u0 - sum_j exp(-t mu_j) Pi_j u0|| along the time grid"""
        times = np.asarray(time_grid, dtype=float)
        states = self.propagate_series(P, u0, times) if states is None else states
        components = [p.apply(u0) for p in mode_projectors]
        residuals = []
        for t, state in zip(times, states):
            metastable = sum((np.exp(-t * p.eigenvalue) * c for p, c in zip(mode_projectors, components)),
                             np.zeros_like(u0))
            residuals.append(float(np.linalg.norm(state - metastable)))
        report = DecompositionReport(times=times.tolist(), residuals=residuals,
                                     mode_norms=[p.norm() for p in mode_projectors],
                                     eigenvalues=[p.eigenvalue for p in mode_projectors])
        if fitted_rate is not None:
            tail = slice(int(round((1.0 - TAIL_FRACTION) * times.size)), times.size)
            envelope = np.exp(-fitted_rate * times[tail]) * np.linalg.norm(u0)
            report.bound_constant = float(np.max(np.asarray(residuals)[tail] / envelope))
        if projector is not None:
            projected_states = self.propagate_series(P, projector.apply(u0), times)
            report.commutation_defect = float(max(
                np.linalg.norm(projector.apply(state) - projected)
                for state, projected in zip(states, projected_states)) / np.linalg.norm(u0))
        logging.info(f"SEMIGROUP_CONTROLLER: Decomposition - modes={len(mode_projectors)}, "
                     f"bound_constant={report.bound_constant}, mode_norms={report.mode_norms}")
        return report

    @staticmethod
    def well_masses(state: np.ndarray, catalog: CriticalPointCatalog, positions: np.ndarray) -> np.ndarray:
        """Basin fractions of the squared velocity-mode-0 coefficients, basins split at the saddles"""
        density = state[:positions.size] ** 2
        basins = np.digitize(positions, catalog.basin_edges())
        masses = np.bincount(basins, weights=density, minlength=catalog.n0)[:catalog.n0]
        total = masses.sum()
        return masses / total if total > 0 else masses

    @staticmethod
    def default_start_well(catalog: CriticalPointCatalog) -> int:
        """The shallowest well, the first one when depths tie"""
        values = [p.value for p in catalog.minima]
        return int(np.argmax(np.round(values, 12)))

    @DecoratorUtils.profile
    def metastable_experiment(self, bundle: OperatorBundle, catalog: CriticalPointCatalog,
                              quasimodes: QuasimodeFamily, time_grid: Sequence[float], mu2: Optional[float] = None,
                              start_well: Optional[int] = None) -> MetastableReport:
        """Well masses of exp(-tP) g_j for the quasimode of one well"""
        if catalog.n0 < 2:
            raise ValueError("Metastability needs at least two minima")
        start_well = self.default_start_well(catalog) if start_well is None else start_well
        times = np.asarray(time_grid, dtype=float)
        positions = bundle.grid.positions
        states = self.propagate_series(bundle.P, quasimodes.vectors[:, start_well], times)
        masses = np.array([self.well_masses(state, catalog, positions) for state in states])
        limits = self.well_masses(bundle.maxwellian, catalog, positions)

        report = MetastableReport(h=bundle.h, start_well=start_well, times=times.tolist(), masses=masses,
                                  limits=limits.tolist(), mu2=mu2)
        plateau = self.find_plateau(times, masses)
        if plateau is not None:
            report.plateau_start, report.plateau_end = plateau
        report.t_eq = self.equilibration_time(times, masses, limits)
        logging.info(f"SEMIGROUP_CONTROLLER: Metastable experiment - h={bundle.h}, start_well={start_well}, "
                     f"plateau={plateau}, t_eq={report.t_eq}, final={report.final_masses}")
        return report

    @staticmethod
    def find_plateau(times: np.ndarray, masses: np.ndarray, change: float = PLATEAU_CHANGE):
        """Earliest t_a whose masses move by less than change * max mass over [t_a, 10 t_a], and where that stops"""
        def holds(a):
            window = (times >= times[a]) & (times <= 10.0 * times[a])
            if times[a] <= 0 or times[-1] < 10.0 * times[a]:
                return False
            drift = np.max(np.abs(masses[window] - masses[a]))
            return drift < change * np.max(masses[a])

        flags = [holds(a) for a in range(times.size)]
        if not any(flags):
            return None
        start = flags.index(True)
        end = start
        while end + 1 < len(flags) and flags[end + 1]:
            end += 1
        return float(times[start]), float(times[end])

    @staticmethod
    def equilibration_time(times: np.ndarray, masses: np.ndarray, limits: np.ndarray,
                           tolerance: float = LIMIT_TOLERANCE) -> Optional[float]:
        """Earliest time after which every sample stays within tolerance of the limits"""
        close = np.all(np.abs(masses - limits) <= tolerance, axis=1)
        if not close[-1]:
            return None
        index = times.size - 1
        while index > 0 and close[index - 1]:
            index -= 1
        return float(times[index])
