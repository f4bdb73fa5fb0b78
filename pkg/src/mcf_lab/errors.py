"""Exception hierarchy shared by all mcf_lab modules."""


class MCFLabError(Exception):
    """Base class for every error raised by mcf_lab."""


class DomainError(MCFLabError, ValueError):
    """A point lies outside the coordinate domain of a metric or field."""


class MetricError(MCFLabError, ValueError):
    """The metric is degenerate (e.g. A <= 0) at an evaluation point."""


class SpeedError(MCFLabError, ValueError):
    """A curve state violates the unit-speed constraint."""


class ParamError(MCFLabError, ValueError):
    """Degenerate family parameters."""


class SingularDomainError(MCFLabError, ValueError):
    """A requested domain touches a singular locus of a conformal family."""


class SingularError(MCFLabError, ArithmeticError):
    """The soliton ODE divides by a vanishing tangent component."""

    def __init__(self, message, arclength=None, curve=None):
        super().__init__(message)
        self.arclength = arclength
        self.curve = curve


class DomainExit(MCFLabError):
    """An integrated trajectory left the domain."""

    def __init__(self, message, arclength=None, curve=None):
        super().__init__(message)
        self.arclength = arclength
        self.curve = curve


class TooFewPoints(MCFLabError, ValueError):
    """A curve has too few points for the requested stencil."""


class TooFewTimeLevels(MCFLabError, ValueError):
    """Not enough stored time levels for time differencing."""


class CFLViolation(MCFLabError, ValueError):
    """The explicit time step exceeds the stability bound."""


class BlowUp(MCFLabError, ArithmeticError):
    """A graph solution lost the graph property (|u_x| too large)."""


class SelfIntersection(MCFLabError):
    """Two non-adjacent segments of an evolving curve cross."""


class CollapseError(MCFLabError):
    """An evolving curve shrank below the resolvable length."""


class ManifoldError(MCFLabError, ValueError):
    """A jet does not lie on the solution manifold."""


class SingularMatrix(MCFLabError, ValueError):
    """Matrix is singular or has non-positive determinant."""


class DifferentiationError(MCFLabError, ValueError):
    """Insufficient samples to differentiate a family at t = 0."""


class ConfigError(MCFLabError, ValueError):
    """Invalid scenario or CLI configuration."""
