"""Exception hierarchy shared by all modules."""


class HermiteSplineError(Exception):
    pass


class InvalidArgumentError(HermiteSplineError, ValueError):
    pass


class UnsupportedOperationError(HermiteSplineError, TypeError):
    pass


class MeasurementFailedError(HermiteSplineError, RuntimeError):
    pass


class OrderExceededError(HermiteSplineError, ValueError):
    pass


class MissingDerivativeError(HermiteSplineError, ValueError):
    pass


class RadiusTooSmallError(HermiteSplineError, ValueError):
    pass


class DegenerateBasisError(HermiteSplineError, RuntimeError):
    """Gram matrix is (numerically) singular: the generators are not a Riesz basis."""


class KernelInconsistencyError(HermiteSplineError, RuntimeError):
    """An error kernel came out negative beyond round-off."""


class FitFailedError(HermiteSplineError, RuntimeError):
    pass


class NonIntegrableError(HermiteSplineError, RuntimeError):
    pass


class DomainCoverageError(HermiteSplineError, ValueError):
    pass


class MissingSpectrumError(HermiteSplineError, ValueError):
    pass


class ExperimentInvalidError(HermiteSplineError, RuntimeError):
    pass
