from models.enums import ExceptionMessage


class MorseViolationException(Exception):
    def __init__(self, obj, message=ExceptionMessage.morse_violation.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class ConfigurationException(Exception):
    def __init__(self, obj, message=ExceptionMessage.configuration_error.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class DomainException(Exception):
    def __init__(self, obj, message=ExceptionMessage.domain_error.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class NumericalException(Exception):
    def __init__(self, obj, message=ExceptionMessage.numerical_error.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class ClusterSeparationException(Exception):
    def __init__(self, obj, message=ExceptionMessage.cluster_separation.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class SpectrumHitException(Exception):
    def __init__(self, obj, message=ExceptionMessage.spectrum_hit.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class KappaDegenerateException(Exception):
    def __init__(self, obj, message=ExceptionMessage.kappa_degenerate.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class CertificateFailureException(Exception):
    def __init__(self, obj, message=ExceptionMessage.certificate_failure.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class GapFailureException(Exception):
    def __init__(self, obj, message=ExceptionMessage.gap_failure.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class ConditioningWarning(UserWarning):
    def __init__(self, obj, message=ExceptionMessage.conditioning_warning.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class TransientWarning(UserWarning):
    def __init__(self, obj, message=ExceptionMessage.transient_warning.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)


class ConfinementWarning(UserWarning):
    def __init__(self, obj, message=ExceptionMessage.confinement_warning.value):
        self.object = obj
        self.message = message
        super().__init__(self.message)
