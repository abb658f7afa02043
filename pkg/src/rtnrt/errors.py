"""Exception hierarchy shared by every module of the package."""


class RtnrtError(Exception):
    """Base class for all package errors."""


class ParameterError(RtnrtError, ValueError):
    """An argument is outside its admissible range."""


class GeometryError(RtnrtError, ValueError):
    """Curves are malformed, non-convex, intersecting or not nested."""


class SingularEvaluationError(RtnrtError, ValueError):
    """A kernel was evaluated at its singularity (x == y)."""


class DomainError(RtnrtError, ValueError):
    """A point lies outside the region where a kernel is defined."""


class SolverError(RtnrtError, ArithmeticError):
    """A discrete boundary integral system could not be solved."""


class SpaceError(RtnrtError, ArithmeticError):
    """A Gram matrix is not symmetric positive definite."""


class DegenerateOperatorError(RtnrtError, ArithmeticError):
    """Every singular mode of an operator was truncated away."""


class ConsistencyError(RtnrtError, ArithmeticError):
    """An internal invariant (e.g. path monotonicity) was violated."""


class PlanError(RtnrtError, ValueError):
    """A sweep plan generates an inadmissible test domain."""


class MetricError(RtnrtError, ValueError):
    """An accuracy metric cannot be evaluated (e.g. empty mask)."""


class ConfigError(RtnrtError, ValueError):
    """A scenario configuration failed validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid configuration")
