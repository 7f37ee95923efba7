"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(RuntimeError):
    """The request is well-posed but outside what this package evaluates reliably."""


class PreconditionError(ValueError):
    """A hypothesis required by an inequality is not met by the input."""
