"""Exception hierarchy shared across the package."""


class ZmcError(Exception):
    """Base class for all errors raised by this package."""


class ZeroDenominator(ZmcError):
    pass


class ZeroFunction(ZmcError):
    pass


class NonConvergence(ZmcError):
    pass


class NonRationalPole(ZmcError):
    """A pole could not be identified as an exact Gaussian rational."""


class PoleProximity(ZmcError):
    pass


class DivisionUnderflow(ZmcError):
    pass


class JetAmbiguous(ZmcError):
    pass


class RadiusTooSmall(ZmcError):
    pass


class NotNearInteger(ZmcError):
    pass


class PathThroughSingularity(ZmcError):
    pass


class NotValidated(ZmcError):
    pass


class UnsupportedType(ZmcError):
    pass


class EvaluationFailure(ZmcError):
    pass


class IndeterminateScale(ZmcError):
    pass


class ConstantGauss(ZmcError):
    pass


class DegreeUncertain(ZmcError):
    pass


class PathBlocked(ZmcError):
    pass


class QuadratureFailure(ZmcError):
    pass


class DegenerateDual(ZmcError):
    pass
