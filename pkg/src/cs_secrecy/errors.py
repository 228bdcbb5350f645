"""Exception types shared across the toolkit."""


class CsSecrecyError(Exception):
    """Base class for every toolkit error."""


class DimensionError(CsSecrecyError, ValueError):
    """Shapes or sizes of operands do not line up."""


class DomainError(CsSecrecyError, ValueError):
    """A parameter lies outside the range an operation is defined on."""


class ValidationError(CsSecrecyError, ValueError):
    """A value or file violates its declared format or invariants."""


class BudgetError(CsSecrecyError, RuntimeError):
    """An enumeration would exceed the configured work budget."""


class SolverError(CsSecrecyError, RuntimeError):
    """An iterative solver exceeded its iteration cap or degenerated."""


class RecoveryError(CsSecrecyError, RuntimeError):
    """Sparse recovery did not reach the feasibility tolerance."""

    def __init__(self, message: str, residual_l2: float | None = None):
        super().__init__(message)
        self.residual_l2 = residual_l2
