"""Exception taxonomy shared by every module in the package."""


class LevySmashError(Exception):
    """Base class for all package-specific errors."""


class DomainError(LevySmashError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class PoleError(DomainError):
    """A gamma-function argument sits exactly on a pole (0, -1, -2, ...)."""


class ConvergenceGateError(LevySmashError, ValueError):
    """A Wright series fails the absolute-convergence margin test."""


class TermCapExceeded(LevySmashError, ArithmeticError):
    """The series stopping rule never fired within the configured term cap."""


class ConstructionError(LevySmashError, RuntimeError):
    """A structurally valid index produced an invalid series assembly.

    Raised only from internal consistency checks; seeing it means a bug.
    """


class AccuracyError(LevySmashError, ArithmeticError):
    """No evaluation path could certify the requested accuracy."""


class OracleDisagreement(LevySmashError, ArithmeticError):
    """The two independent oracle quadratures disagree beyond tolerance."""


class QuadratureFailure(LevySmashError, ArithmeticError):
    """Adaptive quadrature failed to converge or is numerically infeasible."""


class DivergentMoment(LevySmashError, ArithmeticError):
    """The requested fractional moment does not exist."""
