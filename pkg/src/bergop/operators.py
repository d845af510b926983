"""Generalized weighted composition operators ``f -> u * (f^{(n)} o phi)`` and
their pullback measures ``mu(E) = int_{phi^{-1}(E)} |u|^q nu dA``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .errors import ConfigError, DivergentIntegralError, SelfMapError, UnsupportedRegimeError
from .functions import AnalyticFunction
from .geometry import Region, mobius, pseudo_disk_euclidean, region_contains
from .quadrature import IntegralOutcome, QuadratureSpec, integrate_disk, integrate_region
from .weights import RadialWeight

CERT_BOUNDARY_POINTS = 4096
CERT_BOUNDARY_RADIUS = 0.9999


@dataclass(frozen=True, eq=False)
class HoloMap:
    """Closed-form analytic map used for symbols ``phi`` and multipliers ``u``.

    ``kind`` is one of ``constant``, ``scaling``, ``power``, ``blaschke``,
    ``taylor``.  ``param`` holds the constant, the scaling factor, the power
    or the Blaschke zero; ``coeffs`` the Taylor coefficients.
    """

    kind: str
    param: complex = 0j
    coeffs: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "scaling", "power", "blaschke", "taylor"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "power" and (int(self.param.real) != self.param or self.param.real < 1):
            raise ValueError("power map needs an integer exponent >= 1")
        if self.kind == "blaschke" and abs(self.param) >= 1:
            raise ValueError("blaschke zero must lie in the disk")
        if self.kind == "taylor" and len(self.coeffs) == 0:
            raise ValueError("taylor map needs coefficients")

    # -- constructors
    @classmethod
    def constant(cls, c) -> "HoloMap":
        return cls("constant", complex(c))

    @classmethod
    def scaling(cls, lam) -> "HoloMap":
        return cls("scaling", complex(lam))

    @classmethod
    def identity(cls) -> "HoloMap":
        return cls("scaling", 1 + 0j)

    @classmethod
    def power(cls, k: int) -> "HoloMap":
        return cls("power", complex(int(k)))

    @classmethod
    def blaschke(cls, a) -> "HoloMap":
        return cls("blaschke", complex(a))

    @classmethod
    def taylor(cls, coeffs: Sequence[complex]) -> "HoloMap":
        return cls("taylor", 0j, tuple(complex(c) for c in coeffs))

    @classmethod
    def parse(cls, spec) -> "HoloMap":
        """Parse ``"scaling:0.5"``, ``"constant:0.3"``, ``"power:2"``,
        ``"blaschke:0.5"``, ``"taylor:0,0.5,0.25"``, ``"identity"`` or a list
        of Taylor coefficients."""
        if isinstance(spec, (list, tuple)):
            try:
                return cls.taylor([_to_complex(c) for c in spec])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad taylor coefficient list {spec!r}") from exc
        if isinstance(spec, (int, float, complex)):
            return cls.constant(spec)
        if not isinstance(spec, str):
            raise ConfigError(f"cannot parse map spec {spec!r}")
        s = spec.strip()
        if s == "identity":
            return cls.identity()
        kind, _, arg = s.partition(":")
        kind = kind.strip().lower()
        try:
            if kind == "power":
                return cls.power(int(arg))
            if kind == "taylor":
                return cls.taylor([_to_complex(c) for c in arg.split(",")])
            if kind in ("constant", "scaling", "blaschke"):
                return getattr(cls, kind)(_to_complex(arg))
        except ValueError as exc:
            raise ConfigError(f"bad map spec {spec!r}: {exc}") from exc
        raise ConfigError(f"unknown map spec {spec!r}")

    def spec_string(self):
        if self.kind == "taylor":
            return [_fmt_complex(c) for c in self.coeffs]
        if self.kind == "power":
            return f"power:{int(self.param.real)}"
        return f"{self.kind}:{_fmt_complex(self.param)}"

    # -- evaluation
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "constant":
            return np.full(z.shape, self.param, dtype=complex)
        if self.kind == "scaling":
            return self.param * z
        if self.kind == "power":
            return z ** int(self.param.real)
        if self.kind == "blaschke":
            return mobius(self.param, z)
        return K.horner(np.asarray(self.coeffs, dtype=complex), z)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "constant":
            return np.zeros(z.shape, dtype=complex)
        if self.kind == "scaling":
            return np.full(z.shape, self.param, dtype=complex)
        if self.kind == "power":
            k = int(self.param.real)
            return k * z ** (k - 1)
        if self.kind == "blaschke":
            a = self.param
            return -(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * z) ** 2
        c = np.asarray(self.coeffs, dtype=complex)
        return K.horner(c[1:] * np.arange(1, c.size), z) if c.size > 1 else np.zeros(z.shape, complex)

    def preimages(self, w: complex) -> list[complex]:
        """Points of the open disk mapped to ``w``."""
        w = complex(w)
        if self.kind == "constant":
            return []
        if self.kind == "scaling":
            if self.param == 0:
                return []
            cands = [w / self.param]
        elif self.kind == "power":
            k = int(self.param.real)
            if w == 0:
                cands = [0j]
            else:
                root = abs(w) ** (1.0 / k)
                ang = cmath.phase(w)
                cands = [root * cmath.exp(1j * (ang + 2 * math.pi * j) / k) for j in range(k)]
        elif self.kind == "blaschke":
            cands = [complex(mobius(self.param, w))]
        else:
            c = np.array(self.coeffs, dtype=complex)
            c[0] -= w
            nz = np.flatnonzero(c)
            if nz.size == 0 or nz[-1] == 0:
                return []
            cands = list(np.roots(c[: nz[-1] + 1][::-1]))
        return [complex(x) for x in cands if abs(x) < 1.0]

    @property
    def rotation_degree(self) -> int | None:
        """``k`` with ``phi(e^{it} z) = e^{ikt} phi(z)`` for all t, if any."""
        if self.kind == "constant":
            return 0 if self.param == 0 else None
        if self.kind == "scaling":
            return 1
        if self.kind == "power":
            return int(self.param.real)
        if self.kind == "blaschke":
            return 1 if self.param == 0 else None
        nz = np.flatnonzero(np.array(self.coeffs))
        return int(nz[0]) if nz.size == 1 else (0 if nz.size == 0 else None)

    @property
    def radial_modulus(self) -> bool:
        """True when ``|m(z)|`` depends only on ``|z|``."""
        return self.rotation_degree is not None or self.kind == "constant"


def _to_complex(x) -> complex:
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _fmt_complex(c: complex):
    c = complex(c)
    return f"{c.real:g}" if c.imag == 0 else f"{c.real:g}{c.imag:+g}j"


def certification_points() -> np.ndarray:
    radii = 1.0 - 2.0 ** -np.arange(1, 21)
    ang = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    inner = (radii[:, None] * np.exp(1j * ang)[None, :]).ravel()
    bang = np.linspace(0.0, 2.0 * math.pi, CERT_BOUNDARY_POINTS, endpoint=False)
    return np.concatenate([[0j], inner, CERT_BOUNDARY_RADIUS * np.exp(1j * bang)])


@dataclass(frozen=True, eq=False)
class OperatorSymbol:
    """The data ``(phi, u, n)`` of ``D^n_{phi,u} f = u * f^{(n)} o phi``."""

    phi: HoloMap
    u: HoloMap
    n: int = 0
    certificate: float = field(init=False, default=float("nan"))

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("derivative order n must be a nonnegative integer")
        object.__setattr__(self, "n", int(self.n))
        pts = certification_points()
        mod = np.abs(self.phi(pts))
        k = int(np.argmax(mod))
        if not mod[k] < 1.0:
            raise SelfMapError(f"|phi| = {mod[k]:.6g} >= 1: not a self-map of the disk", complex(pts[k]))
        object.__setattr__(self, "certificate", float(mod[k]))

    @classmethod
    def parse(cls, phi, u="constant:1", n: int = 0) -> "OperatorSymbol":
        return cls(HoloMap.parse(phi), HoloMap.parse(u), int(n))

    @property
    def radial_kernel(self) -> bool:
        """Kernel integrals ``B(a)`` depend only on ``|a|`` (rotation structure)."""
        return self.phi.rotation_degree is not None and self.u.radial_modulus

    def preimage_focus(self, points: Sequence[tuple[complex, float]]):
        """Map focus points of the target side back through ``phi``."""
        out = []
        for w, scale in points:
            for zeta in self.phi.preimages(w):
                d = abs(complex(self.phi.derivative(np.array([zeta]))[0]))
                s = scale / d if d > 0 else 1.0 - abs(zeta)
                out.append((zeta, min(s, 1.0 - abs(zeta))))
        return out

    def to_dict(self) -> dict:
        return {"phi": self.phi.spec_string(), "u": self.u.spec_string(), "n": self.n}


def apply(op: OperatorSymbol, f: AnalyticFunction, z):
    """``u(z) f^{(n)}(phi(z))``."""
    z = np.asarray(z, dtype=complex)
    w = op.phi(z)
    bad = np.abs(w) >= 1.0
    if np.any(bad):
        raise SelfMapError("|phi(z)| >= 1", complex(z[np.unravel_index(np.argmax(bad), z.shape)] if z.ndim else z))
    return op.u(z) * f.derivative(op.n, w)


def image_norm_outcome(op: OperatorSymbol, f: AnalyticFunction, nu: RadialWeight, q: float,
                       spec: QuadratureSpec | None = None) -> IntegralOutcome:
    if not q > 0:
        raise ValueError("q must be positive")

    def density(z):
        return np.abs(op.u(z) * f.derivative(op.n, op.phi(z))) ** q * nu.on_disk(z)

    return integrate_disk(density, spec, focus=op.preimage_focus(f.focus()))


def image_norm(op: OperatorSymbol, f: AnalyticFunction, nu: RadialWeight, q: float,
               spec: QuadratureSpec | None = None) -> float:
    """``||D^n_{phi,u} f||_{A^q_nu}``."""
    out = image_norm_outcome(op, f, nu, q, spec)
    if out.divergent:
        raise DivergentIntegralError("operator image is not in A^q_nu for this f")
    return float(out.value) ** (1.0 / q)


@dataclass(frozen=True, eq=False)
class PullbackMeasure:
    """``mu(E) = int_{phi^{-1}(E)} |u|^q nu dA``; total mass checked finite."""

    symbol: OperatorSymbol
    nu: RadialWeight
    q: float
    spec: QuadratureSpec | None = None
    total_mass: float = field(init=False, default=float("nan"))

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError("q must be positive")
        out = integrate_disk(self.base_density, self.spec)
        if out.divergent:
            raise DivergentIntegralError("u is not in A^q_nu: pullback measure is not finite")
        object.__setattr__(self, "total_mass", float(out.value))

    def base_density(self, z):
        return np.abs(self.symbol.u(z)) ** self.q * self.nu.on_disk(z)


def pullback_integrate(pm: PullbackMeasure, g, spec: QuadratureSpec | None = None,
                       focus=None, side: str = "source") -> IntegralOutcome:
    """``int g d mu``.

    ``side="source"`` integrates ``g(phi) |u|^q nu`` over the disk.
    ``side="target"`` handles a univalent or constant ``phi`` on the target
    side, ``int_{phi(D)} g |u o psi|^q (nu o psi) |psi'|^2 dA`` with ``psi``
    the inverse map, an independent computation of the same number.
    ``side="auto"`` uses the target side when available.
    """
    if side not in ("auto", "source", "target"):
        raise ValueError("side must be 'auto', 'source' or 'target'")
    spec = spec or pm.spec
    phi = pm.symbol.phi
    focus = list(focus or [])
    if side == "target" and not _has_target_side(phi):
        raise UnsupportedRegimeError(f"no target-side form for {phi.kind} maps")
    if side != "source":
        if phi.kind == "constant" or (phi.kind == "scaling" and phi.param == 0):
            v = complex(np.asarray(g(np.array([phi.param])))[0]) * pm.total_mass
            v = v.real if v.imag == 0 else v
            return IntegralOutcome(v, 0.0, "converged", np.array([v]))
        if phi.kind in ("scaling", "blaschke"):
            return _target_side(pm, g, spec, focus)
    return integrate_disk(lambda z: g(phi(z)) * pm.base_density(z), spec,
                          focus=pm.symbol.preimage_focus(focus))


def _has_target_side(phi: HoloMap) -> bool:
    return phi.kind in ("constant", "scaling", "blaschke")


def _target_side(pm: PullbackMeasure, g, spec, focus) -> IntegralOutcome:
    phi = pm.symbol.phi
    if phi.kind == "scaling":
        lam = phi.param

        def psi(w):
            return w / lam

        def jac(w):
            return np.full(w.shape, 1.0 / abs(lam) ** 2)

        reg = Region.full_disk() if abs(lam) >= 1 else Region.pseudo_disk(0j, abs(lam))
    else:
        a = phi.param

        def psi(w):
            return mobius(a, w)

        def jac(w):
            return (1.0 - abs(a) ** 2) ** 2 / np.abs(1.0 - np.conj(a) * w) ** 4

        reg = Region.full_disk()

    def density(w):
        return g(w) * pm.base_density(psi(w)) * jac(w)

    return integrate_region(density, reg, spec, focus=focus)


def _region_focus(reg: Region):
    if reg.tag == "pseudo_disk":
        _, R = pseudo_disk_euclidean(reg.center, reg.r)
        return [(reg.center, R)]
    if reg.tag == "carleson_square":
        z = reg.center
        g = 1.0 - abs(z)
        return [(z / abs(z) * (1.0 - 0.5 * g), 0.5 * g)]
    return []


def pullback_region_mass_outcome(pm: PullbackMeasure, reg: Region,
                                 spec: QuadratureSpec | None = None) -> IntegralOutcome:
    phi = pm.symbol.phi
    if phi.kind == "constant":
        inside = bool(region_contains(reg, np.array([phi.param]))[0])
        v = pm.total_mass if inside else 0.0
        return IntegralOutcome(v, 0.0, "converged", np.array([v]))
    if reg.tag == "full_disk":
        return IntegralOutcome(pm.total_mass, 0.0, "converged", np.array([pm.total_mass]))

    def density(z):
        return region_contains(reg, phi(z)).astype(float) * pm.base_density(z)

    return integrate_disk(density, spec or pm.spec, focus=pm.symbol.preimage_focus(_region_focus(reg)))


def pullback_region_mass(pm: PullbackMeasure, reg: Region, spec: QuadratureSpec | None = None) -> float:
    """``mu(reg)`` via the indicator of ``phi(z) in reg`` on the source side."""
    return float(pullback_region_mass_outcome(pm, reg, spec).value)
