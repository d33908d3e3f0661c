from enum import Enum


class ExceptionMessage(Enum):
    morse_violation = 'Degenerate critical point: |V\'\'| below the Morse threshold'
    configuration_error = 'Invalid experiment configuration'
    overlapping_cutoffs = 'Cutoff supports of distinct minima overlap'
    domain_error = 'Weight vector underflows on the computational domain'
    numerical_error = 'Numerical routine failed'
    factorization_error = 'Factorization of a positive definite operator failed'
    cluster_separation = 'Eigenvalue cluster not separated from the rest of the spectrum, choose a different delta_hat'
    spectrum_hit = 'Shift lies on the spectrum, resolvent is singular'
    kappa_degenerate = 'Kappa form is not positive definite on the cluster subspace'
    certificate_failure = 'Modified coercivity form is not positive on the quasimode complement'
    gap_failure = 'Gap lemma quotient below tolerance'
    conditioning_warning = 'Schur and contour projectors disagree'
    transient_warning = 'Remainder norm is not monotone on the tail window'
    confinement_warning = 'Boundary weight exceeds the confinement threshold'


class RunStatus(Enum):
    success = (0, 'success')
    failed = (1, 'checks failed')
    config_error = (2, 'configuration error')


class PotentialKind(str, Enum):
    harmonic = 'harmonic'
    double_well = 'double_well'
    tilted_double_well = 'tilted_double_well'
    polynomial = 'polynomial'


class DifferenceScheme(str, Enum):
    fourier = 'fourier'
    central = 'central'


class DeltaPolicy(str, Enum):
    spectral = 'spectral'
    certified = 'certified'


class ExperimentName(str, Enum):
    spectrum = 'spectrum'
    resolvent = 'resolvent'
    hypo = 'hypo'
    witten = 'witten'
    ptsym = 'ptsym'
    semigroup = 'semigroup'
    metastable = 'metastable'

    @classmethod
    def ordered(cls):
        """Execution order used by the runner (later experiments reuse earlier results)"""
        return [cls.witten, cls.ptsym, cls.hypo, cls.spectrum, cls.resolvent, cls.semigroup, cls.metastable]


class ReportFile(Enum):
    summary = 'summary.json'
    witten = 'witten.json'
    spectral = 'spectral.json'
    hypo = 'hypo.json'
    eigenvalues = 'eigenvalues.csv'
    resolvent_sweep = 'resolvent_sweep.csv'
    hypo_sweep = 'hypo_sweep.csv'
    semigroup = 'semigroup_h{}.csv'
    metastable = 'metastable_h{}.csv'


class UniversalMessage(Enum):
    schema_version = 'bgk-spectra/1'
    check_passed = '{} passed'
    check_failed = '{} failed: value={} threshold={}'
    experiment_error = '{} raised {}: {}'
    key_error = '{}: {}'
