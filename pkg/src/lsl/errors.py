"""Exception hierarchy shared by all modules."""


class LSLError(Exception):
    """Base class for every error raised by the package."""


class StructuralError(LSLError, ValueError):
    """Vector/point shapes do not match the ambient dimension."""


class DomainError(LSLError, ValueError):
    """Input lies outside the region where an operation is defined."""


class ParameterError(LSLError, ValueError):
    """Model or configuration parameters violate their constraints."""


class NumericalDerivativeError(LSLError, ArithmeticError):
    """Finite differences produced non-finite values."""


class RankError(LSLError, ArithmeticError):
    """The differential of an immersion is (numerically) rank deficient."""


class AngleUndefinedError(LSLError, ArithmeticError):
    """The holomorphic volume pullback vanishes, so the phase is undefined."""


class LiftRefusedError(LSLError, ValueError):
    """A chart is not Lagrangian/Legendrian enough to lift or project."""


class StabilityError(LSLError, ValueError):
    """A time step exceeds the explicit scheme's stability bound."""


class DiscretizationError(LSLError, ValueError):
    """A discrete curve is too short or has degenerate segments."""
