"""Exception types raised across the package."""

from __future__ import annotations


class BergopError(Exception):
    """Base class for package errors."""


class QuadratureError(BergopError):
    """A quadrature did not reach its error target.

    ``achieved`` carries the error estimate at the point of failure.
    """

    def __init__(self, message: str, achieved: float = float("nan")):
        super().__init__(message)
        self.achieved = achieved


class NodeEvaluationError(BergopError):
    """A density returned a non-finite value at a quadrature node."""

    def __init__(self, message: str, location: complex):
        super().__init__(f"{message} at z={location!r}")
        self.location = location


class DivergentIntegralError(BergopError):
    """An integral that is required to be finite was classified divergent."""


class SelfMapError(BergopError):
    """A symbol is not (numerically) a self-map of the disk."""

    def __init__(self, message: str, location: complex | None = None):
        super().__init__(message if location is None else f"{message} at z={location!r}")
        self.location = location


class UnsupportedRegimeError(BergopError):
    """Exponent regime outside the hypotheses of the characterization used."""


class PreconditionError(BergopError):
    """A computation was requested outside its hypotheses (e.g. an unbounded operator)."""


class ConfigError(BergopError):
    """Invalid experiment configuration."""
