"""Analytic functions on the disk: Taylor polynomials, normalized kernel-type
test functions and normalized monomials, with exact derivatives, Bergman
norms and the pointwise growth ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, special

from . import _kernels as K
from .errors import DivergentIntegralError, QuadratureError
from .quadrature import IntegralOutcome, QuadratureSpec, integrate_disk
from .weights import DoublingReport, RadialWeight


class AnalyticFunction:
    """Common interface: values and exact derivatives on the disk."""

    def derivative(self, n: int, z):
        raise NotImplementedError

    def __call__(self, z):
        return self.derivative(0, z)

    def focus(self) -> list[tuple[complex, float]]:
        """Points where the function has boundary-scale structure."""
        return []

    def taylor_coefficients(self, degree: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Taylor(AnalyticFunction):
    """Polynomial ``sum_k coeffs[k] z**k``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("Taylor needs a non-empty 1-D coefficient list")
        if not np.all(np.isfinite(c)):
            raise ValueError("Taylor coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def derivative_coeffs(self, n: int) -> np.ndarray:
        c = self.coeffs
        if n == 0:
            return c
        if n >= c.size:
            return np.zeros(1, dtype=complex)
        k = np.arange(n, c.size)
        fall = special.poch(k - n + 1.0, n)  # k! / (k - n)!
        return c[n:] * fall

    def derivative(self, n: int, z):
        if n < 0:
            raise ValueError("derivative order must be >= 0")
        return K.horner(self.derivative_coeffs(int(n)), np.asarray(z, dtype=complex))

    def taylor_coefficients(self, degree: int) -> np.ndarray:
        out = np.zeros(degree + 1, dtype=complex)
        m = min(degree + 1, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    def scaled(self, c: complex) -> "Taylor":
        return Taylor(self.coeffs * c)

    def __add__(self, other: "Taylor") -> "Taylor":
        n = max(self.coeffs.size, other.coeffs.size)
        return Taylor(self.taylor_coefficients(n - 1) + other.taylor_coefficients(n - 1))

    def __repr__(self):
        return f"Taylor(degree={self.degree})"


@dataclass(frozen=True, eq=False)
class TestFunction(AnalyticFunction):
    """``f_a(z) = ((1 - |a|) / (1 - conj(a) z))**delta * omega(S(a))**(-1/p)``.

    With ``squared=True`` the numerator uses ``1 - |a|**2`` instead.
    """

    __test__ = False  # not a pytest class

    a: complex
    delta: float
    weight: RadialWeight
    p: float
    squared: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"test function needs delta > 0, got {self.delta}")
        if abs(self.a) >= 1:
            raise ValueError("test function needs |a| < 1")
        if not self.p > 0:
            raise ValueError("p must be positive")
        object.__setattr__(self, "a", complex(self.a))

    @property
    def prefactor(self) -> float:
        m = abs(self.a)
        base = (1.0 - m) * (1.0 + m) if self.squared else 1.0 - m
        return base ** self.delta * float(self.weight.box_weight(self.a)) ** (-1.0 / self.p)

    def derivative(self, n: int, z):
        if n < 0:
            raise ValueError("derivative order must be >= 0")
        z = np.asarray(z, dtype=complex)
        ca = np.conj(self.a)
        c = special.poch(self.delta, n) * ca ** n
        return c * self.prefactor * (1.0 - ca * z) ** (-(self.delta + n))

    def focus(self):
        if self.a == 0:
            return []
        return [(self.a, 1.0 - abs(self.a))]

    def taylor_coefficients(self, degree: int) -> np.ndarray:
        k = np.arange(degree + 1)
        ca = np.conj(self.a)
        # (delta)_k / k!  via log-gamma to stay finite for large k
        logc = special.gammaln(self.delta + k) - special.gammaln(self.delta) - special.gammaln(k + 1.0)
        return self.prefactor * np.exp(logc) * ca ** k


@dataclass(frozen=True, eq=False)
class MonomialNormalized(AnalyticFunction):
    """``z**n / ||z**n||_{A^p_omega}``."""

    n: int
    weight: RadialWeight
    p: float

    @property
    def monomial_norm(self) -> float:
        return monomial_norm(self.n, self.weight, self.p)

    def as_taylor(self) -> Taylor:
        c = np.zeros(self.n + 1, dtype=complex)
        c[self.n] = 1.0 / self.monomial_norm
        return Taylor(c)

    def derivative(self, n: int, z):
        return self.as_taylor().derivative(n, z)

    def taylor_coefficients(self, degree: int) -> np.ndarray:
        return self.as_taylor().taylor_coefficients(degree)


def monomial_norm(n: int, w: RadialWeight, p: float) -> float:
    """``||z**n||_{A^p_omega} = (2 int_0^1 r**(n p + 1) omega(r) dr)**(1/p)`` by 1-D quadrature."""
    val, err = integrate.quad(lambda r: r ** (n * p + 1.0) * float(w(r)), 0.0, 1.0,
                              epsabs=0.0, epsrel=1e-12, limit=400)
    if err > 1e-9 * abs(val):
        raise QuadratureError("monomial norm quadrature did not converge", achieved=err)
    return (2.0 * val) ** (1.0 / p)


# ---------------------------------------------------------------------------
# operations


def eval_derivative(f: AnalyticFunction, n: int, z):
    """Exact ``f^{(n)}(z)``."""
    return f.derivative(int(n), z)


def bergman_norm_outcome(f: AnalyticFunction, w: RadialWeight, p: float,
                         spec: QuadratureSpec | None = None) -> IntegralOutcome:
    """Quadrature of ``int |f|^p omega dA``."""
    if not p > 0:
        raise ValueError("p must be positive")
    return integrate_disk(lambda z: np.abs(f(z)) ** p * w.on_disk(z), spec, focus=f.focus())


def bergman_norm(f: AnalyticFunction, w: RadialWeight, p: float,
                 spec: QuadratureSpec | None = None) -> float:
    """``||f||_{A^p_omega}`` by disk quadrature."""
    out = bergman_norm_outcome(f, w, p, spec)
    if out.divergent:
        raise DivergentIntegralError(
            f"||f||^p integral diverges for {f!r} (delta too small or outside A^p)")
    return float(out.value) ** (1.0 / p)


def bergman_norm_moments(f: Taylor, w: RadialWeight) -> float:
    """``||f||_{A^2_omega}`` from ``sum |a_k|^2 * 2 omega_{2k+1}``."""
    c = np.asarray(f.coeffs)
    k = np.arange(c.size)
    return math.sqrt(float(np.sum(np.abs(c) ** 2 * 2.0 * w.moments(2 * k + 1))))


@dataclass(frozen=True)
class DeltaChoice:
    """Exponent of the test-function family and where it came from."""

    delta: float
    basis: str  # "user" | "heuristic"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")


def choose_delta(w: RadialWeight | None, p: float, report: DoublingReport | None = None,
                 override: float | None = None) -> DeltaChoice:
    """``max(2, 2 (beta_high + 1) / p)`` unless the user overrides it."""
    if override is not None:
        return DeltaChoice(float(override), "user")
    if report is None:
        if w is None:
            raise ValueError("choose_delta needs a weight or a doubling report")
        from .weights import doubling_report
        report = doubling_report(w)
    beta = report.exponents[1]
    return DeltaChoice(max(2.0, 2.0 * (beta + 1.0) / p), "heuristic")


def make_test_function(a, delta: DeltaChoice | float, w: RadialWeight, p: float,
                       squared: bool = False) -> TestFunction:
    d = delta.delta if isinstance(delta, DeltaChoice) else float(delta)
    if not d > 0:
        raise ValueError(f"delta must be positive, got {d}")
    return TestFunction(complex(a), d, w, float(p), squared)


def growth_ratio(f: AnalyticFunction, w: RadialWeight, p: float, n: int, grid: Sequence[complex],
                 norm: float | None = None, spec: QuadratureSpec | None = None) -> float:
    """``max_z |f^{(n)}(z)| omega(S(z))^{1/p} (1-|z|)^n / ||f||``."""
    if norm is None:
        norm = bergman_norm(f, w, p, spec)
    if not norm > 0:
        raise ValueError("growth_ratio needs a function of positive norm")
    z = np.asarray(grid, dtype=complex)
    vals = np.abs(f.derivative(n, z)) * w.box_weight(z) ** (1.0 / p) * (1.0 - np.abs(z)) ** n
    return float(np.max(vals) / norm)
