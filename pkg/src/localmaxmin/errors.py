"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MaxMinError(Exception):
    """Base class for every error raised by this package."""


class RoleError(MaxMinError, ValueError):
    """A vertex does not exist or has the wrong role for the operation."""


class DomainError(MaxMinError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParseError(MaxMinError, ValueError):
    """Malformed instance document. ``location`` is a JSON-path-like pointer."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


class ValidationError(MaxMinError, ValueError):
    def __init__(self, report):
        lines = "; ".join(f"{v.kind} at {v.where}: {v.message}" for v in report.violations)
        super().__init__(f"invalid instance: {lines}")
        self.report = report


class UnsupportedInstanceError(MaxMinError):
    """The instance is valid but outside what the algorithm handles."""


class UnboundedError(MaxMinError):
    pass


class InfeasibleError(MaxMinError):
    pass


class ConstructionError(MaxMinError):
    """A lower-bound construction precondition (e.g. girth) does not hold."""


class ResourceBudgetError(MaxMinError):
    """Generation ran out of its iteration or size budget."""

    def __init__(self, message: str, best_girth: float | int | None = None):
        super().__init__(message)
        self.best_girth = best_girth
