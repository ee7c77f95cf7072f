"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid numerical configuration (panel counts, orders, ranges)."""


class UsageError(ValueError):
    """An operation was called with incompatible arguments."""


class EvaluationError(ArithmeticError):
    """A callback produced a non-finite value."""


class DomainError(ValueError):
    """A point lies outside the domain of a classical observable."""
