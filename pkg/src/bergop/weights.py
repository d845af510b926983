"""Radial weights: tails, moments, doubling diagnostics and Carleson-box masses.

A radial weight is a nonnegative integrable density ``omega(r)`` on ``[0, 1)``.
Everything downstream uses three derived quantities:

* the tail ``omega_hat(r) = int_r^1 omega(s) ds``,
* the moments ``omega_n = int_0^1 r^n omega(r) dr``,
* the Carleson-box mass ``omega(S(z)) = (1 - |z|) / pi * int_{|z|}^1 s omega(s) ds``
  (with ``S(0)`` the whole disk, so ``omega(S(0)) = 2 omega_1``).

Tails are parametrized internally by the gap ``t = 1 - r`` so that radii
such as ``1 - 2**-40`` keep full relative precision.
"""

from __future__ import annotations

import csv
import logging
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError, QuadratureError

log = logging.getLogger(__name__)

PROFILE_POINTS = 4096
_TINY = 1e-300


class RadialWeight:
    """A radial weight on the unit disk.

    Use the constructors :meth:`standard`, :meth:`table` and :meth:`custom`
    rather than calling ``__init__`` directly.
    """

    def __init__(self, kind: str, params: dict, func: Callable | None = None,
                 name: str | None = None):
        self.kind = kind
        self.params = params
        self._func = func
        self.name = name or kind
        self._moments: dict[int, float] = {}
        self._lock = threading.Lock()
        self._profile: Callable | None = None
        if kind == "table":
            self._prepare_table()

    # -- constructors -----------------------------------------------------

    @classmethod
    def standard(cls, alpha: float = 0.0) -> "RadialWeight":
        """The weight ``(1 - r**2)**alpha``, ``alpha > -1``."""
        alpha = float(alpha)
        if not alpha > -1.0:
            raise ValueError(f"standard weight needs alpha > -1, got {alpha}")
        return cls("standard", {"alpha": alpha}, name=f"standard:alpha={alpha:g}")

    @classmethod
    def table(cls, r: Sequence[float], values: Sequence[float], name: str | None = None) -> "RadialWeight":
        """Tabulated weight with linear interpolation between samples.

        Outside the sampled range the weight is continued by the nearest sample.
        """
        r = np.asarray(r, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("table weight needs two equal-length 1-D arrays with >= 2 samples")
        if np.any(np.diff(r) <= 0):
            raise ValueError("table radii must be strictly increasing")
        if r[0] < 0 or r[-1] >= 1:
            raise ValueError("table radii must lie in [0, 1)")
        bad = np.flatnonzero(~np.isfinite(v) | (v < 0))
        if bad.size:
            raise ValueError(f"table weight has invalid (negative or non-finite) sample at row {bad[0]}")
        if not np.any(v > 0):
            raise ValueError("table weight is identically zero")
        return cls("table", {"r": r, "values": v}, name=name or "table")

    @classmethod
    def custom(cls, func: Callable, name: str = "custom") -> "RadialWeight":
        """Weight given by a vectorized callable ``func(r)``."""
        return cls("custom", {}, func=func, name=name)

    # -- evaluation -------------------------------------------------------

    @property
    def alpha(self) -> float | None:
        return self.params.get("alpha") if self.kind == "standard" else None

    def __call__(self, r):
        """``omega(r)``; accepts scalars or arrays of radii in ``[0, 1)``."""
        r = np.asarray(r, dtype=float)
        if self.kind == "standard":
            a = self.params["alpha"]
            if a == 0.0:
                return np.ones_like(r)
            return ((1.0 - r) * (1.0 + r)) ** a
        if self.kind == "table":
            return np.interp(r, self._R, self._V)
        return np.asarray(self._func(r), dtype=float) * np.ones_like(r)

    def on_disk(self, z):
        """``omega(|z|)`` for complex ``z``."""
        return self(np.abs(z))

    def tail_gap(self, t):
        """``omega_hat(1 - t)`` for gaps ``t`` in ``(0, 1]``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "standard":
            a = self.params["alpha"]
            if a == 0.0:
                return t.copy()
            return (2.0 ** a) * t ** (a + 1.0) / (a + 1.0) * special.hyp2f1(-a, a + 1.0, a + 2.0, 0.5 * t)
        if self.kind == "table":
            return self._table_tail(1.0 - t, t)
        return _vectorize_quad(lambda tt: self._quad(1.0 - tt, 1.0, self._func), t)

    def first_moment_tail_gap(self, t):
        """``int_{1-t}^1 s omega(s) ds`` for gaps ``t``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "standard":
            a = self.params["alpha"]
            return (t * (2.0 - t)) ** (a + 1.0) / (2.0 * (a + 1.0))
        if self.kind == "table":
            return self._table_first_tail(1.0 - t)
        return _vectorize_quad(lambda tt: self._quad(1.0 - tt, 1.0, lambda s: s * self._func(s)), t)

    def moment(self, n: int) -> float:
        """``omega_n = int_0^1 r^n omega(r) dr`` (cached)."""
        n = int(n)
        if n < 0:
            raise ValueError("moment order must be >= 0")
        val = self._moments.get(n)
        if val is None:
            val = float(self._compute_moments(np.array([n]))[0])
            with self._lock:
                self._moments.setdefault(n, val)
        return val

    def moments(self, ns) -> np.ndarray:
        """Vectorized :meth:`moment`; fills the cache."""
        ns = np.asarray(ns, dtype=int)
        missing = sorted({int(k) for k in ns.ravel()} - self._moments.keys())
        if missing:
            vals = self._compute_moments(np.array(missing))
            with self._lock:
                for k, v in zip(missing, vals):
                    self._moments.setdefault(k, float(v))
        return np.array([self._moments[int(k)] for k in ns.ravel()]).reshape(ns.shape)

    def total_mass(self) -> float:
        """``omega(D) = int_D omega dA = 2 omega_1``."""
        return 2.0 * self.moment(1)

    def _compute_moments(self, ns: np.ndarray) -> np.ndarray:
        if self.kind == "standard":
            a = self.params["alpha"]
            return 0.5 * np.exp(special.betaln(0.5 * (ns + 1.0), a + 1.0))
        if self.kind == "table":
            return np.array([self._table_moment(int(k)) for k in ns])
        return np.array([self._quad(0.0, 1.0, lambda s, k=int(k): s ** k * self._func(s)) for k in ns])

    # -- table helpers ------------------------------------------------------

    def _prepare_table(self):
        r = self.params["r"]
        v = self.params["values"]
        R = r
        V = v
        if R[0] > 0:
            R = np.concatenate([[0.0], R])
            V = np.concatenate([[V[0]], V])
        R = np.concatenate([R, [1.0]])
        V = np.concatenate([V, [V[-1]]])
        self._R, self._V = R, V
        seg = 0.5 * np.diff(R) * (V[:-1] + V[1:])
        # suffix[k] = integral over [R_k, 1]
        self._suffix = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
        slope = np.diff(V) / np.diff(R)
        self._slope = slope
        x0, x1 = R[:-1], R[1:]
        fm = self._first_moment_piece(x0, x1, V[:-1], x0, slope)
        self._fsuffix = np.concatenate([np.cumsum(fm[::-1])[::-1], [0.0]])

    @staticmethod
    def _first_moment_piece(x, y, v0, r0, m):
        # int_x^y s (v0 + m (s - r0)) ds
        c0 = v0 - m * r0
        return c0 * (y ** 2 - x ** 2) / 2.0 + m * (y ** 3 - x ** 3) / 3.0

    def _segment(self, r):
        return np.clip(np.searchsorted(self._R, r, side="right") - 1, 0, len(self._R) - 2)

    def _table_tail(self, r, t):
        r = np.asarray(r, dtype=float)
        k = self._segment(r)
        right = self._R[k + 1]
        vr = np.interp(r, self._R, self._V)
        width = np.where(k + 1 == len(self._R) - 1, t, right - r)
        return 0.5 * width * (vr + self._V[k + 1]) + self._suffix[k + 1]

    def _table_first_tail(self, r):
        r = np.asarray(r, dtype=float)
        k = self._segment(r)
        piece = self._first_moment_piece(r, self._R[k + 1], self._V[k], self._R[k], self._slope[k])
        return piece + self._fsuffix[k + 1]

    def _table_moment(self, n: int) -> float:
        R, V, m = self._R, self._V, self._slope
        c0 = V[:-1] - m * R[:-1]
        x, y = R[:-1], R[1:]
        return float(np.sum(c0 * (y ** (n + 1) - x ** (n + 1)) / (n + 1)
                            + m * (y ** (n + 2) - x ** (n + 2)) / (n + 2)))

    # -- custom helpers -----------------------------------------------------

    @staticmethod
    def _quad(lo: float, hi: float, func: Callable) -> float:
        if hi <= lo:
            return 0.0
        val, err = integrate.quad(lambda s: float(func(np.asarray(s))), lo, hi,
                                  epsabs=0.0, epsrel=1e-10, limit=500)
        if not (err <= 1e-10 * abs(val) + 1e-300 or err <= 1e-8 * abs(val)):
            raise QuadratureError(f"1-D weight quadrature on [{lo}, {hi}] did not converge", achieved=err)
        return val

    # -- Carleson boxes -----------------------------------------------------

    def box_weight(self, z):
        """``omega(S(z))`` for complex (or real) ``z``, vectorized."""
        rho = np.abs(np.asarray(z))
        if np.any(rho >= 1.0):
            raise ValueError("Carleson box needs |z| < 1")
        gap = 1.0 - rho
        if self.kind == "custom":
            val = self._custom_profile()(gap)
        else:
            val = gap * self.first_moment_tail_gap(gap) / np.pi
        return np.where(rho == 0.0, self.total_mass(), val)

    def _custom_profile(self):
        if self._profile is None:
            gaps = np.geomspace(1.0, 2.0 ** -52, PROFILE_POINTS)[::-1]
            vals = gaps * self.first_moment_tail_gap(gaps) / np.pi
            ok = vals > _TINY
            interp = PchipInterpolator(np.log(gaps[ok]), np.log(vals[ok]), extrapolate=True)
            with self._lock:
                self._profile = lambda g: np.exp(interp(np.log(np.maximum(g, 2.0 ** -60))))
        return self._profile

    def __repr__(self) -> str:
        return f"RadialWeight({self.name})"


def _vectorize_quad(fn, t):
    flat = np.atleast_1d(t).ravel()
    out = np.array([fn(float(x)) for x in flat])
    return out.reshape(np.shape(t)) if np.ndim(t) else out[0]


# ---------------------------------------------------------------------------
# functional API


def omega_hat(w: RadialWeight, r):
    """Tail ``int_r^1 omega(s) ds``."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r >= 1)):
        raise ValueError("omega_hat needs r in [0, 1)")
    return w.tail_gap(1.0 - r)


def omega_moment(w: RadialWeight, n: int) -> float:
    return w.moment(n)


def omega_tilde(w: RadialWeight, r):
    """``omega_hat(r) / (1 - r)``."""
    r = np.asarray(r, dtype=float)
    t = 1.0 - r
    return w.tail_gap(t) / t


def carleson_box_weight(w: RadialWeight, z):
    """``omega(S(z))`` with the convention ``S(0) = D``."""
    return w.box_weight(z)


def default_doubling_grid(levels: int = 40) -> np.ndarray:
    return 1.0 - 2.0 ** -np.arange(1, levels + 1, dtype=float)


@dataclass
class DoublingReport:
    """Measured doubling constants of a radial weight on a radius grid."""

    upper_constant: float
    lower_pair: tuple[float, float] | None
    exponents: tuple[float, float]
    grid: list[float]
    verdict: dict[str, bool]
    dropped: int = 0
    c_check: dict[float, float] = field(default_factory=dict)
    upper_ratios: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "upper_constant": self.upper_constant,
            "lower_pair": list(self.lower_pair) if self.lower_pair else None,
            "exponents": list(self.exponents),
            "grid": list(self.grid),
            "verdict": dict(self.verdict),
            "dropped": self.dropped,
            "c_check": {f"{k:g}": v for k, v in self.c_check.items()},
        }


def doubling_report(w: RadialWeight, grid=None, theta_candidates=(1.5, 2.0, 4.0, 8.0),
                    margin: float = 0.05, min_separation: float = 0.01) -> DoublingReport:
    """Measure the upper/lower doubling constants and tail exponents of ``w``.

    Parameters
    ----------
    grid : sequence of radii, optional
        Sorted radii in ``[0, 1)``; defaults to ``1 - 2**-j``, ``j = 1..40``.
    theta_candidates : sequence of float
        Candidate dilation factors (all > 1) for the lower doubling condition.
    margin : float
        A lower constant counts only if it exceeds ``1 + margin``.
    """
    grid = default_doubling_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("doubling_report needs a non-empty grid")
    if np.any(np.diff(grid) < 0) or grid[0] < 0 or grid[-1] >= 1:
        raise ValueError("grid must be sorted within [0, 1)")
    thetas = [float(th) for th in theta_candidates]
    if any(th <= 1 for th in thetas):
        raise ValueError("theta candidates must be > 1")

    gap = 1.0 - grid
    tail = np.asarray(w.tail_gap(gap), dtype=float)
    half = np.asarray(w.tail_gap(0.5 * gap), dtype=float)
    ok = np.isfinite(tail) & np.isfinite(half) & (tail > _TINY) & (half > _TINY)
    shifted = {}
    for th in thetas:
        sv = np.asarray(w.tail_gap(gap / th), dtype=float)
        shifted[th] = sv
        ok &= np.isfinite(sv) & (sv > _TINY)
    dropped = int(np.count_nonzero(~ok))
    if dropped:
        log.warning("doubling_report: dropped %d grid points (tail underflow)", dropped)
    if not np.any(ok):
        raise ValueError("every grid point underflowed")
    g, tl, hf = grid[ok], tail[ok], half[ok]

    upper = tl / hf
    c_hat = float(np.max(upper))
    n_last = max(1, len(upper) // 4)
    head = upper[:-n_last] if len(upper) > n_last else upper
    in_dhat = bool(np.isfinite(c_hat) and np.max(upper[-n_last:]) <= 1.05 * np.max(head))

    c_check = {th: float(np.min(tl / shifted[th][ok])) for th in thetas}
    lower = None
    for th in sorted(thetas):
        if c_check[th] > 1.0 + margin:
            lower = (c_check[th], th)
            break

    exps = _tail_exponents(g, tl, min_separation)
    return DoublingReport(
        upper_constant=c_hat,
        lower_pair=lower,
        exponents=exps,
        grid=[float(x) for x in g],
        verdict={"in_Dhat": in_dhat, "in_Dcheck": lower is not None,
                 "in_D": in_dhat and lower is not None},
        dropped=dropped,
        c_check=c_check,
        upper_ratios=[float(x) for x in upper],
    )


def _tail_exponents(grid, tail, min_separation):
    """Bracket the power-law exponent of the tail by log-log least squares.

    Slopes are fitted on all grid pairs and separately on the inner and outer
    halves of the grid; the bracket is the min and max of the three slopes.
    """
    n = len(grid)
    i, j = np.triu_indices(n, k=1)
    keep = grid[j] - grid[i] >= min_separation
    i, j = i[keep], j[keep]
    if i.size < 2:
        return (float("nan"), float("nan"))
    x = np.log((1.0 - grid[i]) / (1.0 - grid[j]))
    y = np.log(tail[i] / tail[j])

    def slope(mask):
        if np.count_nonzero(mask) < 2:
            return None
        A = np.column_stack([x[mask], np.ones(np.count_nonzero(mask))])
        coef, *_ = np.linalg.lstsq(A, y[mask], rcond=None)
        return float(coef[0])

    mid = n // 2
    slopes = [s for s in (slope(np.ones_like(x, dtype=bool)),
                          slope((i < mid) & (j < mid)),
                          slope((i >= mid) & (j >= mid))) if s is not None]
    return (min(slopes), max(slopes))


# ---------------------------------------------------------------------------
# parsing


def load_weight_csv(path: str | Path) -> RadialWeight:
    """Load a two-column ``r, omega(r)`` CSV (optional header row)."""
    path = Path(path)
    rs, vs = [], []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                r, v = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if lineno == 1:
                    continue  # header
                raise ConfigError(f"{path}: row {lineno}: expected two numbers, got {row!r}")
            if not math.isfinite(v) or v < 0:
                raise ConfigError(f"{path}: row {lineno}: weight value {v} is negative or non-finite")
            if not 0.0 <= r < 1.0:
                raise ConfigError(f"{path}: row {lineno}: radius {r} outside [0, 1)")
            if rs and r <= rs[-1]:
                raise ConfigError(f"{path}: row {lineno}: radii must be strictly increasing")
            rs.append(r)
            vs.append(v)
    if len(rs) < 2:
        raise ConfigError(f"{path}: need at least two samples")
    return RadialWeight.table(rs, vs, name=f"csv:{path.name}")


def weight_from_spec(spec: str, base_dir: str | Path | None = None) -> RadialWeight:
    """Parse ``"standard:alpha=<float>"`` or ``"csv:<path>"``."""
    if not isinstance(spec, str):
        raise ConfigError(f"weight spec must be a string, got {spec!r}")
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "standard":
        key, _, val = rest.partition("=")
        if key.strip() != "alpha":
            raise ConfigError(f"bad standard weight spec {spec!r}; expected standard:alpha=<float>")
        try:
            return RadialWeight.standard(float(val))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if kind == "csv":
        p = Path(rest)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        return load_weight_csv(p)
    raise ConfigError(f"unknown weight spec {spec!r}")
