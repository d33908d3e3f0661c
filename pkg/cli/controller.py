import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from cli.cli_schemas import ExperimentConfig
from cli.presets import preset_config
from cli.report_writer import ReportWriter
from hypocoercivity.controller import HypocoercivityController
from models.enums import DeltaPolicy, ExperimentName, PotentialKind, ReportFile, RunStatus, UniversalMessage
from models.exceptions import ClusterSeparationException, ConfigurationException
from models.result import ExperimentResult
from models.summary import SummaryJson
from operators.controller import OperatorController
from operators.matrix_helper import MatrixHelper
from operators.operator_schemas import GridSpec
from potential.controller import PotentialController
from semigroup.controller import SemigroupController
from spectral.controller import SpectralController
from utils.decorator import DecoratorUtils
from utils.fit_helper import FitHelper
from witten.controller import WittenController

EIGENVALUE_HEADER = ['h', 're_mu', 'im_mu', 'index', 'max_projection_defect']
RESOLVENT_HEADER = ['re_z', 'im_z', 'sigma_min', 'norm', 'h']
HYPO_HEADER = ['h', 'epsilon', 'norm_L', 'norm_A', 'kappa_min', 'implied_A']
STEADY_SAMPLES = 11
ACCRETIVE_SLACK = 1e-12


def h_key(h: float) -> str:
    return repr(float(h))


def value_near(values: Dict[float, Any], target: float, rtol: float = 1e-6) -> Optional[Any]:
    """Entry whose h key lies within rtol of target"""
    for h, value in values.items():
        if abs(h - target) <= rtol * target:
            return value
    return None


class SweepPoint:
    """Everything computed for one h, shared by the experiments that run on it"""

    def __init__(self, h: float, results: Dict[str, ExperimentResult]):
        self.h = h
        self.results = results
        self.grid = None
        self.bundle = None
        self.quasimodes = None
        self.witten = None
        self.hypo = None
        self.eigenvalues = None
        self.spectral_report = None
        self.projector = None
        self.kappa = None
        self.pt_residual = None

    def wants(self, name: ExperimentName) -> bool:
        return name.value in self.results

    def result(self, name: ExperimentName) -> ExperimentResult:
        return self.results[name.value]

    def fail(self, names: List[ExperimentName], error: Exception):
        for name in names:
            if self.wants(name):
                self.result(name).add_error(error, self.h)


class ExperimentRunner:
    def __init__(self, experiment_config: ExperimentConfig):
        self.config = experiment_config
        self.tolerances = experiment_config.tolerances
        self.potential_controller = PotentialController()
        self.operator_controller = OperatorController()
        self.witten_controller = WittenController()
        self.spectral_controller = SpectralController(experiment_config.arnoldi_seed)
        self.hypo_controller = HypocoercivityController(experiment_config.arnoldi_seed)
        self.semigroup_controller = SemigroupController(experiment_config.semigroup.krylov_dimension,
                                                        experiment_config.semigroup.tol)
        self.writer = ReportWriter(experiment_config.output_dir)
        self.results: Dict[str, ExperimentResult] = {}
        self.per_h: Dict[str, Dict[str, Any]] = {}
        self.catalog = None
        self.hypothesis = None

    @staticmethod
    def load_config(path: Optional[str] = None, preset: Optional[str] = None,
                    experiments: Optional[List[str]] = None, overrides: Optional[Dict[str, Any]] = None
                    ) -> ExperimentConfig:
        """Preset, then the JSON file, then command-line overrides; every problem becomes a ConfigurationException"""
        data: Dict[str, Any] = {}
        if preset is not None:
            try:
                data = preset_config(preset)
            except KeyError as e:
                raise ConfigurationException({'preset': preset}, str(e.args[0]))
        if path is not None:
            try:
                file_data = json.loads(Path(path).read_text(encoding='utf-8'))
            except OSError as e:
                logging.error(f"EXPERIMENT_RUNNER: Config not readable - path={path}, error={str(e)}")
                raise ConfigurationException({'path': str(path), 'error': str(e)},
                                             f"Cannot read configuration {path}: {e}")
            except json.JSONDecodeError as e:
                logging.error(f"EXPERIMENT_RUNNER: Invalid JSON - path={path}, line={e.lineno}, column={e.colno}")
                raise ConfigurationException({'path': str(path), 'line': e.lineno, 'column': e.colno, 'error': e.msg},
                                             f"Invalid JSON in {path} at line {e.lineno}, column {e.colno}: {e.msg}")
            if not isinstance(file_data, dict):
                raise ConfigurationException({'path': str(path)}, f"Configuration {path} must be a JSON object")
            data.update(file_data)
        if experiments is not None:
            data['experiments'] = list(experiments)
        elif 'experiments' not in data:
            data['experiments'] = [e.value for e in ExperimentName.ordered()]
        data.update({key: value for key, value in (overrides or {}).items() if value is not None})

        try:
            return ExperimentConfig.model_validate(data)
        except ValidationError as e:
            issues = [UniversalMessage.key_error.value.format('.'.join(str(p) for p in error['loc']) or '<root>',
                                                              error['msg'])
                      for error in e.errors()]
            logging.error(f"EXPERIMENT_RUNNER: Invalid configuration - issues={issues}")
            raise ConfigurationException({'errors': issues}, "Invalid experiment configuration: " + "; ".join(issues))

    def grid_for(self, h: float) -> GridSpec:
        section = self.config.grid
        domain = section.domain_for(h)
        if domain is None:
            domain = self.operator_controller.default_domain(self.config.potential, self.catalog, h)
        return GridSpec(x_min=domain[0], x_max=domain[1], N=section.N, K=section.K, h=h, scheme=section.scheme)

    @DecoratorUtils.profile
    def run(self) -> RunStatus:
        """Every requested experiment over the h sweep, then the cross-h checks and the report files"""
        cfg = self.config
        self.results = {name.value: ExperimentResult(name.value) for name in cfg.ordered_experiments()}
        self.per_h = {}
        logging.info(f"EXPERIMENT_RUNNER: Run started - potential={cfg.potential.kind.value}, "
                     f"h_values={cfg.h_values}, experiments={list(self.results)}, workers={cfg.workers}")
        try:
            self.catalog = self.potential_controller.find_critical_points(cfg.potential)
            self.hypothesis = self.potential_controller.check_hypothesis(
                cfg.potential, self.potential_controller.default_search_box(cfg.potential), h_values=cfg.h_values)
        except Exception as e:
            logging.error(f"EXPERIMENT_RUNNER: Potential analysis failed - error={str(e)}")
            for result in self.results.values():
                result.add_error(e)
            self.emit_report()
            return RunStatus.failed

        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            points = list(pool.map(self._run_point, cfg.h_values))
        for point in points:
            for name, result in point.results.items():
                self.results[name].merge(result)
            self.per_h[h_key(point.h)] = {'pt_residual': point.pt_residual}

        self._aggregate()
        self.emit_report()
        status = SummaryJson(results=self.results).status
        logging.info(f"EXPERIMENT_RUNNER: Run finished - status={status.value[1]}")
        return status

    def _run_point(self, h: float) -> SweepPoint:
        point = SweepPoint(h, {name: ExperimentResult(name) for name in self.results})
        everything = ExperimentName.ordered()
        try:
            point.grid = self.grid_for(h)
            point.bundle = self.operator_controller.assemble(self.config.potential, point.grid)
            point.quasimodes = self.operator_controller.build_quasimodes(self.catalog, point.bundle,
                                                                         self.config.cutoffs)
            point.pt_residual = (self.spectral_controller.pt_check(point.bundle.P, point.bundle.Ukappa)
                                 / MatrixHelper.frobenius(point.bundle.P))
        except Exception as e:
            logging.error(f"EXPERIMENT_RUNNER: Assembly failed - h={h}, error={str(e)}")
            point.fail(everything, e)
            return point

        if point.wants(ExperimentName.ptsym):
            self._ptsym(point)

        dependents = [n for n in everything if n != ExperimentName.ptsym]
        try:
            point.witten = self.witten_controller.report(self.catalog, point.bundle, self.config.cutoffs)
        except Exception as e:
            point.fail(dependents, e)
            return point
        if point.wants(ExperimentName.witten):
            self._witten(point)

        certified = self.config.spectral.delta_policy == DeltaPolicy.certified
        if point.wants(ExperimentName.hypo) or certified:
            try:
                point.hypo = self.hypo_controller.report(point.bundle, point.quasimodes, point.witten.tau_hat)
            except Exception as e:
                point.fail([ExperimentName.hypo], e)
            if point.hypo is not None and point.wants(ExperimentName.hypo):
                self._hypo(point)

        spectral_users = [ExperimentName.spectrum, ExperimentName.resolvent, ExperimentName.semigroup,
                          ExperimentName.metastable]
        if not any(point.wants(n) for n in spectral_users):
            return point
        try:
            self._spectral_core(point, certified)
        except Exception as e:
            logging.error(f"EXPERIMENT_RUNNER: Spectral analysis failed - h={h}, error={str(e)}")
            point.fail(spectral_users, e)
            return point

        for name, step in ((ExperimentName.spectrum, self._spectrum), (ExperimentName.resolvent, self._resolvent),
                           (ExperimentName.semigroup, self._semigroup),
                           (ExperimentName.metastable, self._metastable)):
            if point.wants(name):
                try:
                    step(point)
                except Exception as e:
                    logging.error(f"EXPERIMENT_RUNNER: Experiment failed - name={name.value}, h={h}, error={str(e)}")
                    point.result(name).add_error(e, h)
        return point

    def _ptsym(self, point: SweepPoint):
        result, tol, h = point.result(ExperimentName.ptsym), self.tolerances, point.h
        try:
            identities = self.operator_controller.identity_report(point.bundle)
            for name, value in identities.items():
                if name == 'lambda2_min_eig_margin':
                    result.add_check(name, value >= -tol.exact_algebra, value, -tol.exact_algebra, h)
                else:
                    result.add_check(name, value <= tol.exact_algebra, value, tol.exact_algebra, h)
            payload = {'identities': identities, 'pt_residual': point.pt_residual}
            if h == self._refinement_h():
                refinement = self.operator_controller.refinement_report(
                    self.config.potential, self.catalog, point.grid, self.config.spectral.refinement_levels,
                    self.config.cutoffs)
                for key in ('maxwellian', 'commutator', 'quasimode'):
                    ratios = refinement[f'{key}_ratios']
                    passed = all(tol.refinement_min <= r <= tol.refinement_max for r in ratios)
                    result.add_check(f'refinement_{key}', passed, ratios, [tol.refinement_min, tol.refinement_max], h)
                payload['refinement'] = refinement
            result.payload[h_key(h)] = payload
        except Exception as e:
            logging.error(f"EXPERIMENT_RUNNER: Error in ptsym - h={h}, error={str(e)}")
            result.add_error(e, h)

    def _refinement_h(self) -> float:
        target = self.config.spectral.refinement_h
        return min(self.config.h_values, key=lambda h: (abs(h - target), -h))

    def _witten(self, point: SweepPoint):
        result, tol, h, report = point.result(ExperimentName.witten), self.tolerances, point.h, point.witten
        result.add_check('cluster_count', report.cluster_ok, report.count_below_half_gap, self.catalog.n0, h)
        result.add_check('hypothesis', self.hypothesis.passed, self.hypothesis.failures, [], h)
        if self.config.potential.kind == PotentialKind.harmonic:
            expected = h * np.arange(min(5, len(report.eigenvalues)))
            computed = np.asarray(report.eigenvalues[:expected.size])
            zero_error = float(abs(computed[0]))
            relative = float(np.max(np.abs(computed[1:] - expected[1:]) / expected[1:]))
            result.add_check('harmonic_zero_mode', zero_error <= tol.harmonic_zero_atol, zero_error,
                             tol.harmonic_zero_atol, h)
            result.add_check('harmonic_closed_form', relative <= tol.harmonic_rtol, relative, tol.harmonic_rtol, h)
        result.payload[h_key(h)] = report.to_dict()

    def _hypo(self, point: SweepPoint):
        result, tol, h, cert = point.result(ExperimentName.hypo), self.tolerances, point.h, point.hypo
        result.add_check('kappa_positive', cert.kappa_min > 0, cert.kappa_min, 0.0, h)
        threshold = cert.tau_hat / 4.0 - tol.gap_lemma
        result.add_check('gap_lemma', cert.gap_lemma_min >= threshold, cert.gap_lemma_min, threshold, h)
        result.add_check('epsilon_constraints', cert.epsilon_constraints_hold, [cert.epsilon, cert.epsilon * cert.norm_L],
                         [0.125, 0.5], h)
        result.payload[h_key(h)] = cert.to_dict()
        result.add_rows(ReportFile.hypo_sweep.value, [cert.sweep_row()])

    def _spectral_core(self, point: SweepPoint, certified: bool):
        cfg, bundle, h = self.config, point.bundle, point.h
        n0 = self.catalog.n0
        point.eigenvalues = self.spectral_controller.compute_spectrum(bundle.P, n0)
        kappa_min = point.hypo.kappa_min if certified and point.hypo is not None else None
        delta_hat, c_hat = self.spectral_controller.disk_radius(point.eigenvalues, n0, h, point.witten.tau_hat,
                                                                cfg.spectral.delta_policy, kappa_min,
                                                                cfg.spectral.delta_hat)
        try:
            report = self.spectral_controller.small_eigenvalues(point.eigenvalues, h, delta_hat,
                                                                self.tolerances.min_gap_ratio)
        except ClusterSeparationException as e:
            report = e.object
        report.c_hat = c_hat
        report.pt_residual = point.pt_residual
        point.spectral_report = report

        if point.wants(ExperimentName.spectrum) or point.wants(ExperimentName.semigroup):
            point.projector = self.spectral_controller.spectral_projector(
                bundle.P, h, delta_hat, cfg.spectral.contour_nodes, expected_rank=n0)
            report.projector_rank = point.projector.rank
            report.projector_norm = point.projector.norm()
            report.projector_agreement = point.projector.agreement
            report.projector_idempotency = point.projector.idempotency_defect()
            point.kappa = self.spectral_controller.kappa_gram(point.projector, bundle.Ukappa, bundle.P)
            report.kappa_gram_min_eig = point.kappa.min_eig
            report.eigvec_condition = point.kappa.eigvec_condition
            report.mode_projector_norms = [p.norm() for p in point.kappa.mode_projectors]

    def _spectrum(self, point: SweepPoint):
        result, tol, h, report = point.result(ExperimentName.spectrum), self.tolerances, point.h, point.spectral_report
        n0 = self.catalog.n0
        result.add_check('cluster_count', report.count == n0, report.count, n0, h)
        # reported only above gap_ratio_h_max
        if h <= tol.gap_ratio_h_max:
            result.add_check('gap_ratio', report.gap_ratio >= tol.min_gap_ratio, report.gap_ratio,
                             tol.min_gap_ratio, h)
        result.add_check('realness', report.max_imag <= tol.imag_rtol * h, report.max_imag, tol.imag_rtol * h, h)
        result.add_check('projector_rank', report.projector_rank == n0, report.projector_rank, n0, h)
        result.add_check('projector_agreement', report.projector_agreement <= tol.projector_agreement,
                         report.projector_agreement, tol.projector_agreement, h)
        result.add_check('projector_idempotency', report.projector_idempotency <= tol.projector_idempotency,
                         report.projector_idempotency, tol.projector_idempotency, h)
        if h <= tol.kappa_gram_h_max:
            result.add_check('kappa_gram_min', report.kappa_gram_min_eig >= tol.kappa_gram_min,
                             report.kappa_gram_min_eig, tol.kappa_gram_min, h)
        if h <= tol.projector_h_max:
            result.add_check('projector_norm', report.projector_norm <= tol.projector_norm_max, report.projector_norm,
                             tol.projector_norm_max, h)
            largest = max(report.mode_projector_norms, default=0.0)
            result.add_check('mode_projector_norm', largest <= tol.projector_norm_max, largest,
                             tol.projector_norm_max, h)

        defects = [float(np.linalg.norm(point.projector.apply(g) - g)) for g in point.quasimodes.vectors.T]
        if n0 == 1:
            result.add_check('projection_defect', defects[0] <= tol.projection_defect, defects[0],
                             tol.projection_defect, h)

        payload = report.to_dict()
        payload.update({'gap_ratio_asserted': h <= tol.gap_ratio_h_max,
                        'kappa': point.kappa.to_dict(), 'projection_defects': defects,
                        'quasimode_residuals': point.quasimodes.residual_norms,
                        'adjoint_quasimode_residuals': point.quasimodes.adjoint_residual_norms})
        if any(abs(h - s) <= 1e-12 * h for s in self.config.spectral.scaling_h):
            payload['scaling_mismatch'] = self._scaling_bridge(point, result)
        if self.config.spectral.k_convergence:
            payload['k_convergence'] = self._k_convergence(point, result)
        result.payload[h_key(h)] = payload
        largest_defect = max(defects, default=None)
        result.add_rows(ReportFile.eigenvalues.value,
                        [[h, float(np.real(v)), float(np.imag(v)), i, largest_defect]
                         for i, v in enumerate(report.small_eigenvalues)])

    def _cluster(self, eigenvalues: np.ndarray) -> np.ndarray:
        values = np.asarray(eigenvalues)
        return values[np.argsort(np.abs(values))][:self.catalog.n0]

    def _scaling_bridge(self, point: SweepPoint, result: ExperimentResult) -> float:
        """Cluster of P_h against h times the cluster of the unit-temperature problem with V_h"""
        potential, grid = self.operator_controller.unit_scale_problem(self.config.potential, point.grid)
        unit = self.operator_controller.assemble(potential, grid)
        unit_cluster = self._cluster(self.spectral_controller.compute_spectrum(unit.P, self.catalog.n0))
        cluster = self._cluster(point.eigenvalues)
        mismatch = self.spectral_controller.relative_mismatch(cluster, point.h * unit_cluster, point.h)
        matched = self.spectral_controller.eigenvalues_match(cluster, point.h * unit_cluster, point.h,
                                                             self.tolerances.scaling_rtol)
        result.add_check('scaling_bridge', matched, mismatch, self.tolerances.scaling_rtol, point.h)
        return mismatch

    def _k_convergence(self, point: SweepPoint, result: ExperimentResult) -> float:
        doubled = point.grid.model_copy(update={'K': 2 * point.grid.K})
        bundle = self.operator_controller.assemble(self.config.potential, doubled)
        refined = self._cluster(self.spectral_controller.compute_spectrum(bundle.P, self.catalog.n0))
        cluster = self._cluster(point.eigenvalues)
        mismatch = self.spectral_controller.relative_mismatch(cluster, refined, point.h)
        matched = self.spectral_controller.eigenvalues_match(cluster, refined, point.h,
                                                             self.tolerances.k_convergence_rtol)
        result.add_check('k_convergence', matched, mismatch, self.tolerances.k_convergence_rtol, point.h)
        return mismatch

    def _resolvent(self, point: SweepPoint):
        result, h, spectral = point.result(ExperimentName.resolvent), point.h, self.config.spectral
        delta_hat = point.spectral_report.delta_hat
        sweep = self.spectral_controller.resolvent_sweep(point.bundle.P, h, spectral.delta1_fraction * delta_hat,
                                                         delta_hat, spectral.n_angles, spectral.n_radii,
                                                         spectral.n_line)
        result.add_check('accretive', sweep.accretive_norm <= 1.0 + ACCRETIVE_SLACK, sweep.accretive_norm, 1.0, h)
        result.payload[h_key(h)] = sweep.to_dict()
        result.add_rows(ReportFile.resolvent_sweep.value, sweep.rows())

    def initial_state(self, point: SweepPoint) -> np.ndarray:
        """Maxwellian position profile in velocity mode 1 plus the first quasimode, normalized"""
        N, K = point.bundle.N, point.bundle.K
        profile = point.bundle.maxwellian[:N] / np.linalg.norm(point.bundle.maxwellian[:N])
        u0 = MatrixHelper.mode_vector(profile, K, {1: 1.0}) + point.quasimodes.vectors[:, 0]
        return u0 / np.linalg.norm(u0)

    def _semigroup(self, point: SweepPoint):
        result, tol, h, section = point.result(ExperimentName.semigroup), self.tolerances, point.h, self.config.semigroup
        bundle, report = point.bundle, point.spectral_report
        u0 = self.initial_state(point)
        rate = report.outside_abscissa
        times = np.linspace(0.0, section.decay_horizon / rate, section.samples)

        fit = self.semigroup_controller.decay_experiment(bundle.P, point.projector, u0, times, rate, h)
        ratio = fit.rate_ratio
        passed = ratio is not None and tol.rate_ratio_min <= ratio <= tol.rate_ratio_max
        result.add_check('rate_ratio', passed, ratio, [tol.rate_ratio_min, tol.rate_ratio_max], h)

        states = self.semigroup_controller.propagate_series(bundle.P, u0, times)
        decomposition = self.semigroup_controller.decompose_semigroup(
            bundle.P, point.kappa.mode_projectors, u0, times, fit.fitted_rate, point.projector, states)
        constant = decomposition.bound_constant
        result.add_check('decomposition_bound', constant is not None and constant <= tol.decomposition_constant,
                         constant, tol.decomposition_constant, h)
        result.add_check('commutation', decomposition.commutation_defect <= tol.projector_idempotency,
                         decomposition.commutation_defect, tol.projector_idempotency, h)

        maxwellian = bundle.maxwellian / np.linalg.norm(bundle.maxwellian)
        steady = self.semigroup_controller.steady_state_defect(
            bundle.P, maxwellian, np.linspace(0.0, section.steady_horizon, STEADY_SAMPLES))
        result.add_check('steady_state', steady <= tol.steady_state, steady, tol.steady_state, h)
        excess = self.semigroup_controller.contraction_excess(states, u0)
        result.add_check('contraction', excess <= tol.contraction, excess, tol.contraction, h)
        oracle = self.semigroup_controller.oracle_agreement(bundle.P, u0, float(times[-1]))
        if oracle is not None:
            result.add_check('oracle_agreement', oracle <= tol.oracle_agreement, oracle, tol.oracle_agreement, h)

        result.payload[h_key(h)] = {**fit.to_dict(), 'decomposition': decomposition.to_dict(),
                                    'steady_state_defect': steady, 'contraction_excess': excess,
                                    'oracle_agreement': oracle}
        positions = point.grid.positions
        rows = []
        for t, remainder, state, residual in zip(times, fit.remainder_norms, states, decomposition.residuals):
            masses = self.semigroup_controller.well_masses(state, self.catalog, positions)
            rows.append([float(t), remainder, *masses.tolist(), residual])
        result.add_rows(ReportFile.semigroup.value.format(h_key(h)), rows)

    def _mu2(self, point: SweepPoint) -> Optional[float]:
        real_parts = np.sort(np.real(self._cluster(point.eigenvalues)))
        return float(real_parts[1]) if real_parts.size > 1 else None

    def _metastable(self, point: SweepPoint):
        result, tol, h, section = point.result(ExperimentName.metastable), self.tolerances, point.h, self.config.semigroup
        if self.catalog.n0 < 2:
            result.payload[h_key(h)] = {'h': h, 'skipped': 'single well'}
            return
        mu2 = self._mu2(point)
        if mu2 is None or mu2 <= 0:
            raise ValueError(f"Metastable experiment needs a positive mu_2, got {mu2}")
        times = np.concatenate([[0.0], np.logspace(-1.0, np.log10(section.metastable_horizon / mu2),
                                                   section.metastable_samples)])
        report = self.semigroup_controller.metastable_experiment(point.bundle, self.catalog, point.quasimodes,
                                                                 times, mu2, section.start_well)
        if h <= tol.projector_h_max:
            result.add_check('plateau', report.plateau_detected, report.plateau_start, None, h)
        bound = tol.equilibration_factor / abs(mu2)
        result.add_check('equilibration_time', report.t_eq is not None and report.t_eq >= bound, report.t_eq,
                         bound, h)
        deviation = float(np.max(np.abs(np.asarray(report.final_masses) - np.asarray(report.limits))))
        result.add_check('limit_masses', deviation <= tol.limit_tolerance, deviation, tol.limit_tolerance, h)
        if self.config.potential.is_even and self.catalog.n0 == 2:
            symmetric = float(np.max(np.abs(np.asarray(report.final_masses) - 0.5)))
            result.add_check('symmetric_masses', symmetric <= tol.limit_tolerance, symmetric, tol.limit_tolerance, h)

        late = report.masses[report.times.index(report.plateau_end):] if report.plateau_detected else report.masses
        deepest = int(np.argmin([p.value for p in self.catalog.minima]))
        steps = np.diff(np.asarray(late)[:, deepest])
        largest_drop = float(max(0.0, -np.min(steps))) if steps.size else 0.0
        monotone = largest_drop <= tol.monotone_slack
        if not self.config.potential.is_even and self.catalog.n0 == 2 and h <= tol.projector_h_max:
            result.add_check('late_transfer_monotone', monotone, largest_drop, tol.monotone_slack, h)
        result.payload[h_key(h)] = {**report.to_dict(), 'late_transfer_monotone': monotone,
                                    'late_transfer_largest_drop': largest_drop}
        result.add_rows(ReportFile.metastable.value.format(h_key(h)),
                        [[float(t), *m.tolist()] for t, m in zip(report.times, report.masses)])

    def _aggregate(self):
        """Checks that compare quantities across the h sweep"""
        tol = self.tolerances
        h_values = self.config.h_values

        def collected(name: str, field: str) -> Dict[float, Any]:
            payload = self.results[name].payload
            return {h: payload[h_key(h)].get(field) for h in h_values
                    if h_key(h) in payload and payload[h_key(h)].get(field) is not None}

        witten = self.results.get(ExperimentName.witten.value)
        if witten is not None:
            taus = collected('witten', 'tau_hat')
            if len(taus) >= 2:
                spread = FitHelper.spread_ratio(list(taus.values()))
                witten.payload['tau_spread'] = spread
                witten.add_check('tau_stability', spread <= tol.tau_spread, spread, tol.tau_spread)

        spectrum = self.results.get(ExperimentName.spectrum.value)
        if spectrum is not None and self.catalog.n0 >= 2:
            clusters = {h: sorted(v[0] for v in pairs)
                        for h, pairs in collected('spectrum', 'small_eigenvalues').items() if len(pairs) > 1}
            mu2 = {h: values[1] for h, values in clusters.items() if values[1] > 0}
            if len(mu2) >= 3:
                fit = FitHelper.arrhenius_fit(list(mu2), list(mu2.values()))
                fit['smallest_barrier'] = self.catalog.smallest_barrier()
                spectrum.payload['arrhenius'] = fit
                spectrum.add_check('arrhenius_slope', fit['slope'] < 0, fit['slope'], 0.0)
                spectrum.add_check('arrhenius_r2', fit['r_squared'] >= tol.eigenvalue_r2, fit['r_squared'],
                                   tol.eigenvalue_r2)
            residuals = {h: max(v) for h, v in collected('spectrum', 'quasimode_residuals').items()}
            if len(residuals) >= 3:
                fit = FitHelper.arrhenius_fit(list(residuals), list(residuals.values()))
                spectrum.payload['quasimode_fit'] = fit
                spectrum.add_check('quasimode_slope', fit['slope'] < 0, fit['slope'], 0.0)
                spectrum.add_check('quasimode_r2', fit['r_squared'] >= tol.quasimode_r2, fit['r_squared'],
                                   tol.quasimode_r2)

        resolvent = self.results.get(ExperimentName.resolvent.value)
        if resolvent is not None:
            summaries = collected('resolvent', 'summary')
            if len(summaries) >= 2:
                spread = FitHelper.spread_ratio(list(summaries.values()))
                resolvent.payload['spread'] = spread
                resolvent.add_check('uniformity', spread <= tol.resolvent_spread, spread, tol.resolvent_spread)

        hypo = self.results.get(ExperimentName.hypo.value)
        if hypo is not None:
            kappas = collected('hypo', 'kappa_min')
            if len(kappas) >= 2:
                spread = FitHelper.spread_ratio([k / h for h, k in kappas.items()])
                hypo.add_check('kappa_scaling', spread <= tol.certificate_spread, spread, tol.certificate_spread)
            for field in ('norm_L', 'norm_A'):
                values = collected('hypo', field)
                if len(values) >= 2:
                    spread = FitHelper.spread_ratio(list(values.values()))
                    hypo.add_check(f'{field}_uniform', spread <= tol.operator_norm_spread, spread,
                                   tol.operator_norm_spread)

        semigroup = self.results.get(ExperimentName.semigroup.value)
        if semigroup is not None:
            rates = collected('semigroup', 'fitted_rate')
            if len(rates) >= 2:
                spread = FitHelper.spread_ratio([r / h for h, r in rates.items()])
                semigroup.add_check('rate_scaling', spread <= tol.rate_spread, spread, tol.rate_spread)

        metastable = self.results.get(ExperimentName.metastable.value)
        if metastable is not None:
            times = collected('metastable', 't_eq')
            coarse, fine = value_near(times, 0.15), value_near(times, 0.1)
            if coarse is not None and fine is not None:
                growth = fine / coarse
                metastable.add_check('equilibration_growth', growth > tol.equilibration_growth, growth,
                                     tol.equilibration_growth)

    def emit_report(self) -> List[Path]:
        """Write summary.json plus the JSON and CSV files of every experiment that ran"""
        cfg, writer, results = self.config, self.writer, self.results
        potential = {'spec': cfg.potential.model_dump(mode='json'),
                     'catalog': self.catalog.to_dict() if self.catalog is not None else None,
                     'hypothesis': self.hypothesis.to_dict() if self.hypothesis is not None else None}
        summary = SummaryJson(potential=potential, h_values=cfg.h_values, results=results, per_h=self.per_h,
                              seed=cfg.arnoldi_seed)
        written = [writer.write_json(ReportFile.summary.value, summary.to_dict())]

        def document(*names: ExperimentName) -> Dict[str, Any]:
            return {'schema_version': UniversalMessage.schema_version.value,
                    **{name.value: results[name.value].payload for name in names if name.value in results}}

        if ExperimentName.witten.value in results:
            written.append(writer.write_json(ReportFile.witten.value, document(ExperimentName.witten)))
        if ExperimentName.hypo.value in results:
            written.append(writer.write_json(ReportFile.hypo.value, document(ExperimentName.hypo)))
        spectral_names = [n for n in (ExperimentName.spectrum, ExperimentName.resolvent, ExperimentName.ptsym,
                                      ExperimentName.semigroup, ExperimentName.metastable) if n.value in results]
        if spectral_names:
            written.append(writer.write_json(ReportFile.spectral.value, document(*spectral_names)))

        n0 = self.catalog.n0 if self.catalog is not None else 0
        wells = [f'mass_well_{j + 1}' for j in range(n0)]
        for result in results.values():
            for table, rows in result.tables.items():
                if table == ReportFile.eigenvalues.value:
                    header = EIGENVALUE_HEADER
                elif table == ReportFile.resolvent_sweep.value:
                    header = RESOLVENT_HEADER
                elif table == ReportFile.hypo_sweep.value:
                    header = HYPO_HEADER
                elif table.startswith('semigroup_h'):
                    header = ['t', 'remainder_norm', *wells, 'decomposition_residual']
                else:
                    header = ['t', *wells]
                written.append(writer.write_csv(table, header, rows))
        return written
