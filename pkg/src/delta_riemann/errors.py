"""Exception hierarchy shared by all solver modules."""


class DeltaRiemannError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(DeltaRiemannError, ValueError):
    pass


class NumericalFailure(DeltaRiemannError):
    """Raised when a numerical procedure cannot deliver its contract."""


class QuadratureFailure(NumericalFailure):
    pass


class CflViolation(NumericalFailure):
    pass


class BoundaryContamination(NumericalFailure):
    pass


class DegenerateData(DeltaRiemannError, ValueError):
    """Left and right states coincide."""


class NotDeltaRegime(DeltaRiemannError, ValueError):
    pass


class NotApplicable(DeltaRiemannError, ValueError):
    pass


class MuBelowCritical(DeltaRiemannError, ValueError):
    pass


class InvalidTime(DeltaRiemannError, ValueError):
    pass


class NoSpike(DeltaRiemannError):
    pass


class SingularProfile(DeltaRiemannError, ValueError):
    pass


class EmptyInput(DeltaRiemannError, ValueError):
    pass
