import logging
from typing import List, Optional

import numpy as np
from scipy import linalg

from models.exceptions import NumericalException
from operators.controller import OperatorController
from operators.matrix_helper import MatrixHelper
from operators.operator_models import OperatorBundle
from operators.operator_schemas import CutoffSpec, GridSpec
from potential.potential_models import CriticalPointCatalog
from potential.potential_schemas import PotentialSpec
from utils.decorator import DecoratorUtils
from witten.witten_models import WittenReport

EXTRA_EIGENVALUES = 5


class WittenController:
    def __init__(self):
        self.operator_controller = OperatorController()

    def assemble_witten(self, A: np.ndarray) -> np.ndarray:
        """W = A^T A, symmetric positive semidefinite"""
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"Dimension mismatch - A shape={A.shape}")
        return A.T @ A

    def direct_witten(self, potential: PotentialSpec, grid: GridSpec, D: np.ndarray) -> np.ndarray:
        """-h^2 D^2 + diag(V'^2/4) - diag(h V''/2)"""
        evaluate = self.operator_controller.potential_controller.evaluate
        x = grid.positions
        return (-grid.h ** 2 * (D @ D) + np.diag(evaluate(potential, x, 1) ** 2 / 4.0)
                - np.diag(grid.h * evaluate(potential, x, 2) / 2.0))

    def witten_small_spectrum(self, W: np.ndarray, n0: int, h: float) -> WittenReport:
        """Lowest min(n0 + 5, N) eigenvalues and tau_hat = lambda_{n0+1}/h clamped to 1"""
        count = min(n0 + EXTRA_EIGENVALUES, W.shape[0])
        if count <= n0:
            raise ValueError(f"Grid too small to resolve the gap - N={W.shape[0]}, n0={n0}")
        try:
            eigenvalues = linalg.eigh(W, eigvals_only=True, subset_by_index=[0, count - 1])
        except linalg.LinAlgError as e:
            logging.error(f"WITTEN_CONTROLLER: Eigensolver failed - h={h}, N={W.shape[0]}, error={str(e)}")
            raise NumericalException({'h': h, 'N': W.shape[0], 'error': str(e)})
        tau_raw = float(eigenvalues[n0] / h)
        tau_hat = min(tau_raw, 1.0)
        report = WittenReport(h=h, n0=n0, eigenvalues=[float(v) for v in eigenvalues], tau_hat=tau_hat,
                              tau_raw=tau_raw,
                              count_below_half_gap=int(np.sum(eigenvalues < tau_hat * h / 2.0)))
        logging.info(f"WITTEN_CONTROLLER: Small spectrum - h={h}, n0={n0}, tau_raw={tau_raw}, "
                     f"count_below={report.count_below_half_gap}")
        return report

    def quasimode_residual(self, W: np.ndarray, catalog: CriticalPointCatalog, potential: PotentialSpec,
                           grid: GridSpec, cutoffs: Optional[CutoffSpec] = None) -> List[float]:
        """||W e_j|| / ||e_j|| for e_j = chi_j e^{-V/2h}"""
        weight = self.operator_controller.position_weight(potential, grid, catalog.global_minimum_value)
        residuals = []
        for cutoff in self.operator_controller.cutoff_parameters(catalog, cutoffs):
            e = MatrixHelper.cutoff(grid.positions, cutoff['center'], cutoff['radius'], cutoff['width']) * weight
            residuals.append(float(np.linalg.norm(W @ e) / np.linalg.norm(e)))
        return residuals

    @DecoratorUtils.profile
    def report(self, catalog: CriticalPointCatalog, bundle: OperatorBundle,
               cutoffs: Optional[CutoffSpec] = None) -> WittenReport:
        """Full Witten report of one bundle, including the direct-formula comparison on the quasimodes"""
        try:
            W = self.assemble_witten(bundle.A)
            report = self.witten_small_spectrum(W, catalog.n0, bundle.h)
            report.quasimode_residuals = self.quasimode_residual(W, catalog, bundle.potential, bundle.grid, cutoffs)
            difference = W - self.direct_witten(bundle.potential, bundle.grid, bundle.D)
            weight = self.operator_controller.position_weight(bundle.potential, bundle.grid,
                                                              catalog.global_minimum_value)
            report.direct_formula_gap = float(np.linalg.norm(difference @ weight) / np.linalg.norm(weight))
            return report
        except Exception as e:
            logging.error(f"WITTEN_CONTROLLER: Error building report - h={bundle.h}, error={str(e)}")
            raise e
