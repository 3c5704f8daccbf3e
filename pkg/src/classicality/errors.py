"""Exception types shared across the package."""


class ClassicalityError(Exception):
    """Base class for all package errors."""


class DomainError(ClassicalityError):
    """Input violates a mathematical precondition (bad spectrum, bad angle, ...)."""


class CapacityError(ClassicalityError):
    """Request exceeds a practical resource bound (e.g. permanent size)."""


class ContractViolation(ClassicalityError):
    """An internal invariant that callers rely on was broken."""
