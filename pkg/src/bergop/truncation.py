"""Taylor truncations, Fejer means and reproducing-kernel series.

For ``f = sum a_k z^k``:

* sharp split: head ``sum_{k<m} a_k z^k``, tail ``sum_{k>=m} a_k z^k``;
* Fejer split: head ``sum_{k<m} (1 - k/m) a_k z^k``, tail the rest;
* kernel ``B_z(xi) = sum_k (xi conj(z))^k / (2 omega_{2k+1})`` and its
  coefficient tails, which dominate the pointwise size of remainders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DivergentIntegralError, UnsupportedRegimeError
from .functions import AnalyticFunction, Taylor, bergman_norm, bergman_norm_moments
from .quadrature import QuadratureSpec, integrate_disk
from .weights import RadialWeight

FLAVORS = ("sharp", "fejer")
EXPANSION_DEGREE = 256
_TERM_REL = 1e-16
_MAX_TERMS = 1 << 20
_BATCH = 512


@dataclass(frozen=True)
class TruncationPair:
    head: Taylor
    tail: Taylor
    m: int
    flavor: str


def expand(f: AnalyticFunction, degree: int = EXPANSION_DEGREE) -> tuple[Taylor, float]:
    """Taylor expansion to ``degree`` and the size of the first dropped coefficient."""
    if isinstance(f, Taylor):
        return f, 0.0
    c = f.taylor_coefficients(degree + 1)
    return Taylor(c[:-1]), float(abs(c[-1]))


def truncate(f: AnalyticFunction, m: int, flavor: str = "sharp") -> TruncationPair:
    """Exact coefficient split of a Taylor polynomial.

    Raises
    ------
    UnsupportedRegimeError
        If ``f`` is not a :class:`Taylor`; expand closed forms first with
        :func:`expand`.
    """
    if not isinstance(f, Taylor):
        raise UnsupportedRegimeError("truncate needs a Taylor polynomial; use expand() first")
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}")
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    c = f.coeffs
    head = np.zeros_like(c)
    k = min(m, c.size)
    if flavor == "sharp":
        head[:k] = c[:k]
    else:
        head[:k] = (1.0 - np.arange(k) / m) * c[:k]
    # tail defined as the difference so that head + tail == f exactly
    return TruncationPair(Taylor(head), Taylor(c - head), m, flavor)


def _weighted_sq(c: np.ndarray, w: RadialWeight) -> np.ndarray:
    k = np.arange(c.size)
    return np.abs(c) ** 2 * 2.0 * w.moments(2 * k + 1)


def truncation_norm_ratio(f: AnalyticFunction, w: RadialWeight, p: float, m: int,
                          flavor: str = "sharp", spec: QuadratureSpec | None = None) -> float:
    """``||head||_{A^p_omega} / ||f||_{A^p_omega}``.

    At ``p = 2`` the norms come from the moment formula, and the sharp ratio
    is computed from one cumulative sum so that it never exceeds 1.
    """
    if flavor == "sharp" and not p > 1:
        raise UnsupportedRegimeError("sharp truncation bounds need p > 1")
    if flavor == "fejer" and not p >= 1:
        raise UnsupportedRegimeError("Fejer bounds need p >= 1")
    g, _ = expand(f)
    pair = truncate(g, m, flavor)
    if p == 2:
        terms = _weighted_sq(g.coeffs, w)
        total = float(np.cumsum(terms)[-1])
        if total == 0:
            raise ValueError("f has zero norm")
        if flavor == "sharp":
            k = min(pair.m, terms.size)
            head = float(np.cumsum(terms)[k - 1])
        else:
            head = float(np.sum(_weighted_sq(pair.head.coeffs, w)))
        return math.sqrt(head / total)
    nf = bergman_norm(g, w, p, spec)
    if nf == 0:
        raise ValueError("f has zero norm")
    if not np.any(pair.head.coeffs):
        return 0.0
    return bergman_norm(pair.head, w, p, spec) / nf


def kernel_coefficients(w: RadialWeight, N: int) -> np.ndarray:
    """``1 / (2 omega_{2k+1})`` for ``k = 0..N``."""
    k = np.arange(int(N) + 1)
    return 1.0 / (2.0 * w.moments(2 * k + 1))


def kernel_partial_sum(w: RadialWeight, z: complex, xi: complex, N: int) -> complex:
    """``sum_{k=0}^N (xi conj(z))^k / (2 omega_{2k+1})``."""
    if abs(z) >= 1 or abs(xi) >= 1:
        raise ValueError("z and xi must lie in the open disk")
    c = kernel_coefficients(w, N).astype(complex)
    return complex(K.horner(c, np.asarray([complex(xi) * np.conj(complex(z))]))[0])


def kernel_tail(w: RadialWeight, r: float, m: int) -> float:
    """``sum_{k>=m} r^k / (2 omega_{2k+1})`` until terms drop below ``1e-16`` of the sum.

    Raises
    ------
    DivergentIntegralError
        If the terms have not become negligible after ``2**20`` terms.
    """
    if not 0 <= r < 1:
        raise ValueError("r must lie in [0, 1)")
    m = int(m)
    if m < 0:
        raise ValueError("m must be >= 0")
    if r == 0:
        return float(kernel_coefficients(w, 0)[0]) if m == 0 else 0.0
    total = 0.0
    start = m
    logr = math.log(r)
    while start - m < _MAX_TERMS:
        k = np.arange(start, start + _BATCH)
        terms = np.exp(k * logr) / (2.0 * w.moments(2 * k + 1))
        csum = total + np.cumsum(terms)
        small = terms < _TERM_REL * np.maximum(csum, 1e-300)
        # terms may still be rising; only stop once they are small and falling
        falling = np.concatenate([[False], np.diff(terms) <= 0])
        hit = np.flatnonzero(small & falling)
        if hit.size:
            return float(csum[hit[0]])
        total = float(csum[-1])
        if not math.isfinite(total):
            break
        start += _BATCH
    raise DivergentIntegralError(f"kernel tail terms do not decay for r = {r}")


def smallest_m(w: RadialWeight, r: float, eps: float, m_max: int = 1 << 16) -> int:
    """Smallest ``m`` with ``kernel_tail(w, r, m) < eps`` (bisection; the tail is monotone)."""
    if kernel_tail(w, r, 0) < eps:
        return 0
    lo, hi = 0, 1
    while kernel_tail(w, r, hi) >= eps:
        lo, hi = hi, hi * 2
        if hi > m_max:
            raise DivergentIntegralError(f"no m <= {m_max} brings the tail below {eps}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if kernel_tail(w, r, mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def fejer_extra(w: RadialWeight, r: float, m: int) -> float:
    """``(1/m) sum_{k<m} k r^{k-1} / (2 omega_{2k+1})``."""
    m = int(m)
    if m <= 1:
        return 0.0
    k = np.arange(1, m)
    return float(np.sum(k * r ** (k - 1.0) * kernel_coefficients(w, m - 1)[1:]) / m)


@dataclass(frozen=True)
class RemainderCheck:
    measured: float  # sup_{|z|<=r} |R_m f(z)| / ||f||
    tail_bound: float  # kernel_tail(w, r, m), plus the Fejer term for flavor fejer
    m: int
    r: float
    flavor: str

    @property
    def ratio(self) -> float:
        if self.tail_bound == 0:
            return 0.0 if self.measured == 0 else math.inf
        return self.measured / self.tail_bound


def remainder_sup_check(f: AnalyticFunction, w: RadialWeight, p: float, m: int, r: float,
                        flavor: str = "sharp", angles: int = 2048, circles: int = 8,
                        spec: QuadratureSpec | None = None) -> RemainderCheck:
    """Sup of the remainder over ``|z| <= r`` on a polar grid, against the kernel-tail bound.

    At ``p = 2`` Cauchy-Schwarz in the moment inner product gives
    ``measured <= sqrt(2 omega_1) * tail_bound``.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    g, _ = expand(f)
    nf = bergman_norm_moments(g, w) if p == 2 else bergman_norm(g, w, p, spec)
    if nf == 0:
        raise ValueError("f has zero norm")
    pair = truncate(g, m, flavor)
    rad = r * np.arange(1, circles + 1) / circles
    th = 2.0 * np.pi * np.arange(angles) / angles
    z = (rad[:, None] * np.exp(1j * th)[None, :]).ravel()
    measured = float(np.max(np.abs(pair.tail(z)))) / nf
    bound = kernel_tail(w, r, m)
    if flavor == "fejer":
        bound += fejer_extra(w, r, m)
    return RemainderCheck(measured, bound, int(m), float(r), flavor)


@dataclass(frozen=True)
class ReproducingResult:
    residual: float  # |<f, B_z^N> - f(z)| from the coefficient pairing
    pairing: complex
    quadrature_pairing: complex | None = None


def reproducing_check(w: RadialWeight, f: Taylor, z: complex, N: int,
                      spec: QuadratureSpec | None = None, quadrature: bool = False) -> ReproducingResult:
    """Pair ``f`` with the degree-``N`` kernel partial sum at ``z``.

    ``<f, g> = int f conj(g) omega dA``; by orthogonality of monomials the
    pairing equals ``sum_{k<=N} a_k z^k``.  With ``quadrature=True`` the
    pairing is also computed by disk quadrature as an independent check.
    """
    z = complex(z)
    c = np.asarray(f.coeffs)
    k = min(int(N), c.size - 1)
    # a_k * 2 omega_{2k+1} * conj(conj(z)^k / (2 omega_{2k+1}))
    pairing = complex(np.sum(c[:k + 1] * z ** np.arange(k + 1)))
    residual = abs(pairing - complex(f(np.asarray([z]))[0]))
    qp = None
    if quadrature:
        kc = kernel_coefficients(w, N).astype(complex)

        def density(xi):
            b = K.horner(kc, xi * np.conj(z))
            return f(xi) * np.conj(b) * w.on_disk(xi)

        qp = complex(integrate_disk(density, spec).value)
    return ReproducingResult(residual, pairing, qp)
