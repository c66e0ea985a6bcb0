"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A parameter violates an operation's precondition."""


class ResolutionError(RuntimeError):
    """Requested data cannot be represented faithfully on the grid."""


class NumericDomainError(ArithmeticError):
    """A symbol or multiplier was evaluated outside its numeric domain."""


class TermBudgetError(RuntimeError):
    """A direct multilinear sum would exceed the allowed term count."""


class QuadratureError(RuntimeError):
    """An oscillatory quadrature failed to converge; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InconclusiveFitError(RuntimeError):
    """Measured increments sit at the round-off floor; fit is meaningless."""


class AbortedRunError(RuntimeError):
    """An evolution tripped a runtime guard; carries the partial record."""

    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record
