"""Pseudo-hyperbolic geometry of the unit disk and the regions used by the criteria."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K


def pseudo_distance(z, w):
    """``rho(z, w) = |(w - z) / (1 - conj(w) z)|``, vectorized."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.abs((w - z) / (1.0 - np.conj(w) * z))


def mobius(a, u):
    """The involutive automorphism ``(a - u) / (1 - conj(a) u)``."""
    u = np.asarray(u, dtype=complex)
    return (a - u) / (1.0 - np.conj(a) * u)


def wrap_angle(x):
    """Map angles to ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    y = np.mod(x + np.pi, 2.0 * np.pi) - np.pi
    return np.where(y == -np.pi, np.pi, y)


def pseudo_disk_euclidean(center: complex, r: float) -> tuple[complex, float]:
    """Euclidean center and radius of the pseudo-hyperbolic disk ``Delta(center, r)``."""
    c = complex(center)
    m2 = abs(c) ** 2
    den = 1.0 - r * r * m2
    return c * (1.0 - r * r) / den, r * (1.0 - m2) / den


@dataclass(frozen=True)
class Region:
    """A measurable subset of the disk.

    ``tag`` is one of ``pseudo_disk``, ``carleson_square``, ``full_disk``,
    ``annulus_complement`` (the set ``r < |xi| < 1``).
    """

    tag: str
    center: complex = 0j
    r: float = 0.0

    def __post_init__(self):
        if self.tag not in ("pseudo_disk", "carleson_square", "full_disk", "annulus_complement"):
            raise ValueError(f"unknown region tag {self.tag!r}")
        if abs(self.center) >= 1:
            raise ValueError("region anchor must lie in the open disk")
        if self.tag in ("pseudo_disk", "annulus_complement") and not 0.0 < self.r < 1.0:
            raise ValueError(f"{self.tag} radius must lie in (0, 1)")

    @classmethod
    def pseudo_disk(cls, center, r: float) -> "Region":
        return cls("pseudo_disk", complex(center), float(r))

    @classmethod
    def carleson_square(cls, z) -> "Region":
        z = complex(z)
        if z == 0:
            return cls("full_disk")
        return cls("carleson_square", z)

    @classmethod
    def full_disk(cls) -> "Region":
        return cls("full_disk")

    @classmethod
    def annulus_complement(cls, r: float) -> "Region":
        return cls("annulus_complement", 0j, float(r))

    def contains(self, xi):
        return region_contains(self, xi)


def region_contains(reg: Region, xi):
    """Exact membership test, vectorized over ``xi``.

    Boundaries are excluded except the inner edge ``|xi| = |z|`` of a
    Carleson square.
    """
    xi = np.asarray(xi, dtype=complex)
    inside = np.abs(xi) < 1.0
    if reg.tag == "full_disk":
        return inside
    if reg.tag == "pseudo_disk":
        if K.USE_NUMBA and xi.ndim:
            return inside & (K.pseudo_disk_mask(xi, reg.center, reg.r) > 0)
        return inside & (pseudo_distance(xi, reg.center) < reg.r)
    if reg.tag == "annulus_complement":
        return inside & (np.abs(xi) > reg.r)
    z = reg.center
    mz = abs(z)
    half = 0.5 * (1.0 - mz)
    dang = np.abs(wrap_angle(np.angle(xi) - math.atan2(z.imag, z.real)))
    return inside & (np.abs(xi) >= mz) & (dang < half)
