from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import config
from models.enums import DeltaPolicy, DifferenceScheme, ExperimentName
from operators.operator_schemas import CutoffSpec
from potential.potential_schemas import PotentialSpec


class DomainOverride(BaseModel):
    model_config = ConfigDict(extra="forbid")

    h: float = Field(..., gt=0)
    x_min: float
    x_max: float

    @model_validator(mode="after")
    def check_interval(self) -> 'DomainOverride':
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min must be below x_max, got [{self.x_min}, {self.x_max}]")
        return self


class GridSection(BaseModel):
    """Discretization shared by every h; the domain defaults to the per-h confinement box"""
    model_config = ConfigDict(extra="forbid")

    N: int = Field(config.default_N, ge=16, description="Number of uniform position nodes")
    K: int = Field(config.default_K, ge=4, description="Number of velocity Hermite modes")
    scheme: DifferenceScheme = DifferenceScheme.fourier
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    domains: List[DomainOverride] = Field(default_factory=list, description="Per-h domain overrides")

    @model_validator(mode="after")
    def check_domain(self) -> 'GridSection':
        if (self.x_min is None) != (self.x_max is None):
            raise ValueError("x_min and x_max must be given together")
        if self.x_min is not None and not self.x_min < self.x_max:
            raise ValueError(f"x_min must be below x_max, got [{self.x_min}, {self.x_max}]")
        return self

    def domain_for(self, h: float) -> Optional[tuple]:
        for override in self.domains:
            if abs(override.h - h) <= 1e-12 * h:
                return override.x_min, override.x_max
        if self.x_min is not None:
            return self.x_min, self.x_max
        return None


class ToleranceConfig(BaseModel):
    """Pass/fail thresholds of every acceptance check"""
    model_config = ConfigDict(extra="forbid")

    exact_algebra: float = Field(1e-13, gt=0)
    harmonic_rtol: float = Field(1e-4, gt=0)
    harmonic_zero_atol: float = Field(1e-6, gt=0)
    min_gap_ratio: float = Field(10.0, gt=0)
    gap_ratio_h_max: float = Field(0.1, gt=0, description="Largest h where the cluster gap ratio is asserted")
    tau_spread: float = Field(1.2, ge=1, description="Spread of tau_hat across the sweep")
    imag_rtol: float = Field(1e-10, gt=0, description="max |Im mu| relative to h")
    kappa_gram_min: float = Field(0.9, gt=0)
    kappa_gram_h_max: float = Field(0.1, gt=0, description="Largest h where the kappa-Gram bound is asserted")
    eigenvalue_r2: float = Field(0.99, gt=0, le=1)
    quasimode_r2: float = Field(0.98, gt=0, le=1)
    resolvent_spread: float = Field(3.0, ge=1)
    certificate_spread: float = Field(2.0, ge=1)
    operator_norm_spread: float = Field(2.0, ge=1)
    gap_lemma: float = Field(0.05, ge=0)
    projector_agreement: float = Field(1e-6, gt=0)
    projector_idempotency: float = Field(1e-8, gt=0)
    projector_norm_max: float = Field(2.0, gt=0)
    projector_h_max: float = Field(0.1, gt=0, description="Largest h where the projector norm bound is asserted")
    rate_ratio_min: float = Field(0.5, gt=0)
    rate_ratio_max: float = Field(2.0, gt=0)
    rate_spread: float = Field(2.0, ge=1, description="Spread of fitted_rate/h across the sweep")
    decomposition_constant: float = Field(10.0, gt=0)
    steady_state: float = Field(1e-3, gt=0)
    contraction: float = Field(1e-10, ge=0)
    oracle_agreement: float = Field(1e-6, gt=0)
    limit_tolerance: float = Field(0.05, gt=0)
    monotone_slack: float = Field(1e-6, ge=0, description="Allowed decrease of the deep-well mass after the plateau")
    equilibration_factor: float = Field(0.1, gt=0, description="t_eq must exceed this over |mu_2|")
    equilibration_growth: float = Field(2.0, gt=0, description="t_eq(0.1)/t_eq(0.15) lower bound")
    scaling_rtol: float = Field(1e-8, gt=0)
    k_convergence_rtol: float = Field(1e-8, gt=0)
    refinement_min: float = Field(3.0, gt=0)
    refinement_max: float = Field(5.0, gt=0)
    projection_defect: float = Field(1e-2, gt=0, description="||Pi0 g - g|| bound for single-well potentials")


class SpectralSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delta_policy: DeltaPolicy = DeltaPolicy.spectral
    delta_hat: Optional[float] = Field(None, gt=0, description="Explicit disk radius, overrides the policy")
    delta1_fraction: float = Field(0.5, gt=0, le=1, description="Inner annulus radius as a fraction of delta_hat")
    n_angles: int = Field(32, ge=4)
    n_radii: int = Field(4, ge=1)
    n_line: int = Field(16, ge=2)
    contour_nodes: int = Field(64, ge=8)
    scaling_h: List[float] = Field(default_factory=lambda: [0.2, 0.1])
    k_convergence: bool = Field(False, description="Recompute the cluster with 2K velocity modes")
    refinement_h: float = Field(0.1, gt=0, description="h of the grid refinement suite (nearest sweep value)")
    refinement_levels: int = Field(3, ge=2)


class SemigroupSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    krylov_dimension: int = Field(30, ge=2)
    tol: float = Field(1e-8, gt=0)
    samples: int = Field(40, ge=5)
    decay_horizon: float = Field(10.0, gt=0, description="Decay window in units of 1/(smallest outside Re)")
    steady_horizon: float = Field(10.0, gt=0)
    metastable_samples: int = Field(60, ge=10)
    metastable_horizon: float = Field(20.0, gt=0, description="Metastable window end in units of 1/mu_2")
    start_well: Optional[int] = Field(None, ge=0)


class ExperimentConfig(BaseModel):
    """One reproducible run: potential, discretization, h sweep and the experiments to run on it"""
    model_config = ConfigDict(extra="forbid")

    potential: PotentialSpec
    grid: GridSection = Field(default_factory=GridSection)
    h_values: List[float] = Field(..., min_length=1)
    experiments: List[ExperimentName] = Field(..., min_length=1)
    output_dir: str = config.output_dir
    arnoldi_seed: int = config.arnoldi_seed
    workers: int = Field(config.worker_count, ge=1)
    cutoffs: CutoffSpec = Field(default_factory=CutoffSpec)
    spectral: SpectralSection = Field(default_factory=SpectralSection)
    semigroup: SemigroupSection = Field(default_factory=SemigroupSection)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)

    @field_validator('h_values')
    @classmethod
    def check_h_values(cls, value: List[float]) -> List[float]:
        if any(h <= 0 or h > 1 for h in value):
            raise ValueError(f"h values must lie in (0, 1], got {value}")
        if len(set(value)) != len(value):
            raise ValueError(f"h values must be distinct, got {value}")
        if value != sorted(value, reverse=True):
            raise ValueError(f"h values must be sorted descending, got {value}")
        return value

    @field_validator('experiments')
    @classmethod
    def check_experiments(cls, value: List[ExperimentName]) -> List[ExperimentName]:
        if len(set(value)) != len(value):
            raise ValueError("experiments must not repeat")
        return value

    def ordered_experiments(self) -> List[ExperimentName]:
        return [name for name in ExperimentName.ordered() if name in self.experiments]
