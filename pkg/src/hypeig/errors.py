"""Exception types shared across the package."""

from __future__ import annotations


class HypeigError(Exception):
    """Base class for all package errors."""


class ParameterError(HypeigError, ValueError):
    """An input lies outside the documented domain of an operation."""


class NumericalError(HypeigError, ArithmeticError):
    """A numerical procedure failed to converge or to bracket a root.

    Parameters
    ----------
    message : str
        Human readable description.
    partial : object, optional
        Best value available when the failure was detected (a partial sum,
        a scan table, ...). Kept for diagnostics.
    """

    def __init__(self, message: str, partial: object = None):
        super().__init__(message)
        self.partial = partial


class PreconditionError(HypeigError):
    """A hypothesis required by a comparison was not satisfied."""

    def __init__(self, message: str, hypothesis: str):
        super().__init__(message)
        self.hypothesis = hypothesis


class UnsupportedDimensionError(ParameterError):
    """Requested order exceeds the precomputed closed-form tables."""


class DivergenceError(NumericalError):
    """An integral that the caller asked for is infinite."""
