"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    pass


class NoCoexistence(ValueError):
    """The competition coefficients admit no positive constant steady state."""


class UnsupportedConfiguration(ValueError):
    pass


class AmplitudeTooLarge(ValueError):
    pass


class SubcriticalUnsupported(ValueError):
    pass


class AmbiguousMode(ValueError):
    """The critical threshold is attained by two modes."""


class SingularSystem(ArithmeticError):
    pass


class NumericalFailure(RuntimeError):
    """Base class for failures that map to CLI exit status 2."""


class NoConvergence(NumericalFailure):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SchemeFailure(NumericalFailure):
    pass
