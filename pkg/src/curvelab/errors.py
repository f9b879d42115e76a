"""Exception types shared across the package."""


class CurvelabError(Exception):
    """Base class for all package-specific errors."""


class ArgumentError(CurvelabError, ValueError):
    """An argument violates an operation's stated precondition."""


class DomainError(CurvelabError, ValueError):
    """A parameter value lies outside the curve's domain."""


class FormError(CurvelabError, ValueError):
    """The curve is not in the parametric form the operation requires."""


class UnsupportedDimension(CurvelabError, ValueError):
    """Dimension is outside the range the determinant engine supports."""


class DegenerateInput(CurvelabError, ValueError):
    """Tied nodes or rates make the requested quantity degenerate."""


class RangeError(CurvelabError, OverflowError):
    """A value overflowed the double range even after rescaling."""


class NoCriticalPoint(CurvelabError, ValueError):
    """No sign change of the stationarity equation inside the domain."""


class InternalConsistencyError(CurvelabError, RuntimeError):
    """A quantity that must be invariant failed its internal cross-check."""


class HypothesisViolated(CurvelabError, ValueError):
    """A structural hypothesis (e.g. a fixed-sign derivative) fails on the domain."""


class BudgetExceeded(CurvelabError, RuntimeError):
    """A compute budget (panel count, sample count) was exhausted.

    The ``partial`` attribute carries whatever partial result was
    available when the budget ran out, or ``None``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(CurvelabError, ValueError):
    """Config text failed validation; ``errors`` lists (line, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"line {ln}: {msg}" if ln else msg for ln, msg in self.errors)
        super().__init__(lines)
