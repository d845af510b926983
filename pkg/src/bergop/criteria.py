"""Computable characterizations for ``D^n_{phi,u}: A^p_omega -> A^q_nu``.

* order boundedness: finiteness of
  ``int |u|^q nu / ((1-|phi|^2)^{nq} omega(S(phi))^{q/p}) dA``;
* boundedness: ``sup_a B(a) < inf`` where
  ``B(a) = int (1-|a|)^{delta q} |u|^q nu / (|1 - conj(a) phi|^{(delta+n) q} omega(S(a))^{q/p}) dA``;
* the Carleson quantity ``mu(Delta(z, r)) / (omega(S(z))^{q/p} (1-|z|)^{nq})``
  of the pullback measure and its vanishing form;
* the essential norm, comparable to ``limsup_{|a|->1} B(a)``;
* the weakly-null probe ``||D f_{a_k}||`` along test functions.

Every "finite vs infinite" decision is numerical and may come back
``undecided``; it is reported as such rather than forced.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .errors import PreconditionError, UnsupportedRegimeError
from .functions import DeltaChoice, bergman_norm, make_test_function
from .geometry import Region
from .operators import (OperatorSymbol, PullbackMeasure, image_norm_outcome,
                        pullback_region_mass_outcome)
from .quadrature import IntegralOutcome, QuadratureSpec, integrate_disk
from .weights import RadialWeight

HOLDS, FAILS, UNDECIDED = "holds", "fails", "undecided"
DECAY_THRESHOLD = 1e-6
GROWTH_STEP = 1.1


@dataclass
class CriterionResult:
    kind: str
    value: float
    per_point: list = field(default_factory=list)
    verdict: str = UNDECIDED
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": _json_float(self.value),
            "verdict": self.verdict,
            "per_point": [[_json_point(p), _json_float(v)] for p, v in self.per_point],
            "diagnostics": self.diagnostics,
        }


def _json_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _json_point(p):
    p = complex(p)
    return [p.real, p.imag]


def pmap(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Ordered map, threaded when ``workers > 1``."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _delta_value(delta) -> float:
    return delta.delta if isinstance(delta, DeltaChoice) else float(delta)


def _check_exponents(p: float, q: float, need_banach: bool = False):
    if not (p > 0 and q > 0):
        raise ValueError("p and q must be positive")
    if p > q:
        raise UnsupportedRegimeError(f"p = {p} > q = {q}: characterization assumes p <= q")
    if need_banach and p < 1:
        raise UnsupportedRegimeError(f"p = {p} < 1: essential-norm estimate assumes 1 <= p")


def _verdict_from(outcome: IntegralOutcome) -> str:
    if outcome.converged:
        return HOLDS
    if outcome.divergent:
        return FAILS
    return UNDECIDED


def radial_sups(points: Sequence[complex], values: Sequence[float], decimals: int = 12):
    """Group values by ``|point|`` and return (radii, per-radius sup), radii ascending."""
    radii = np.round(np.abs(np.asarray(points, dtype=complex)), decimals)
    vals = np.asarray(values, dtype=float)
    uniq = np.unique(radii)
    sups = np.array([np.max(vals[radii == r]) for r in uniq])
    return uniq, sups


def growth_trend(seq: Sequence[float], run: int = 4, step: float = GROWTH_STEP) -> bool:
    """True if the last ``run`` entries increase by a factor ``>= step`` each time."""
    s = np.asarray(seq, dtype=float)
    if s.size < run:
        return False
    last = s[-run:]
    if np.any(last[:-1] <= 0):
        return False
    return bool(np.all(last[1:] / last[:-1] >= step))


def decays(seq: Sequence[float], threshold: float = DECAY_THRESHOLD, run: int = 4) -> bool:
    """Tail classification shared by the essential-norm and probe sequences."""
    s = np.asarray(seq, dtype=float)
    if s.size == 0:
        return False
    ref = np.max(s)
    if ref == 0:
        return True
    small = s[-1] <= threshold * (s[0] if s[0] > 0 else ref)
    mono = np.all(np.diff(s[-run:]) <= 0) if s.size >= 2 else True
    return bool(small and mono)


# ---------------------------------------------------------------------------
# order boundedness


def order_majorant(op: OperatorSymbol, w: RadialWeight, p: float, z):
    """``h(z) = |u(z)| / ((1 - |phi(z)|^2)^n omega(S(phi(z)))^{1/p})``."""
    z = np.asarray(z, dtype=complex)
    phi = op.phi(z)
    m = np.abs(phi)
    return np.abs(op.u(z)) / (((1.0 - m) * (1.0 + m)) ** op.n * w.box_weight(phi) ** (1.0 / p))


def order_bounded_criterion(op: OperatorSymbol, w: RadialWeight, p: float, nu: RadialWeight,
                            q: float, spec: QuadratureSpec | None = None) -> CriterionResult:
    """Finiteness of ``int h^q nu dA`` with ``h`` the order majorant."""
    if not (p > 0 and q > 0):
        raise ValueError("p and q must be positive")

    def density(z):
        return order_majorant(op, w, p, z) ** q * nu.on_disk(z)

    out = integrate_disk(density, spec)
    verdict = _verdict_from(out)
    value = math.inf if out.divergent else float(out.value)
    return CriterionResult("order_bounded", value, [], verdict, {"quadrature": out.to_dict()})


# ---------------------------------------------------------------------------
# kernel integrals B(a)


def kernel_integral(op: OperatorSymbol, w: RadialWeight, p: float, nu: RadialWeight, q: float,
                    delta: float, a: complex, spec: QuadratureSpec | None = None) -> IntegralOutcome:
    """``B(a)`` as an :class:`IntegralOutcome` (value already includes the a-factors)."""
    a = complex(a)
    d = float(delta)
    s = (d + op.n) * q
    pref = (1.0 - abs(a)) ** (d * q) / float(w.box_weight(a)) ** (q / p)

    def density(z):
        base = np.abs(op.u(z)) ** q * nu.on_disk(z)
        # prefactor inside the density keeps partials O(B) against the divergence cap
        return pref * base * K.kernel_power(a, op.phi(z), s)

    focus = op.preimage_focus([(a, 1.0 - abs(a))]) if a != 0 else []
    return integrate_disk(density, spec, focus=focus)


def boundedness_criterion(op: OperatorSymbol, w: RadialWeight, p: float, nu: RadialWeight, q: float,
                          delta, a_grid: Sequence[complex], spec: QuadratureSpec | None = None,
                          workers: int = 1) -> CriterionResult:
    """``sup_a B(a)`` over ``a_grid`` and a growth-trend verdict."""
    _check_exponents(p, q)
    d = _delta_value(delta)
    pts = [complex(a) for a in a_grid]
    if not pts:
        raise ValueError("a_grid is empty")
    outs = pmap(lambda a: kernel_integral(op, w, p, nu, q, d, a, spec), pts, workers)
    vals = [math.inf if o.divergent else float(o.value) for o in outs]
    radii, sups = radial_sups(pts, vals)
    if any(o.divergent for o in outs) or growth_trend(sups):
        verdict = FAILS
    elif all(o.converged for o in outs):
        verdict = HOLDS
    else:
        verdict = UNDECIDED
    diag = {
        "delta": d,
        "radii": radii.tolist(),
        "radial_sup": [_json_float(x) for x in sups],
        "verdicts": [o.verdict for o in outs],
    }
    return CriterionResult("bounded", max(vals), list(zip(pts, vals)), verdict, diag)


# ---------------------------------------------------------------------------
# Carleson quantity


def carleson_point(pm: PullbackMeasure, w: RadialWeight, p: float, r: float, z: complex,
                   spec: QuadratureSpec | None = None) -> tuple[float, IntegralOutcome]:
    z = complex(z)
    out = pullback_region_mass_outcome(pm, Region.pseudo_disk(z, r), spec)
    q, n = pm.q, pm.symbol.n
    den = float(w.box_weight(z)) ** (q / p) * (1.0 - abs(z)) ** (n * q)
    return float(out.value) / den, out


def region_spec(spec: QuadratureSpec | None) -> QuadratureSpec:
    """Indicator integrands cannot reach smooth-integrand tolerances."""
    spec = spec or QuadratureSpec()
    return spec.with_overrides(rel_error_target=max(spec.rel_error_target, 1e-4))


def carleson_criterion(op: OperatorSymbol, w: RadialWeight, p: float, nu: RadialWeight, q: float,
                       r: float, z_grid: Sequence[complex], spec: QuadratureSpec | None = None,
                       workers: int = 1) -> CriterionResult:
    """Carleson quantity of the pullback measure over ``z_grid`` with its vanishing tail."""
    _check_exponents(p, q)
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    pm = PullbackMeasure(op, nu, q, spec)
    rspec = region_spec(spec)
    pts = [complex(z) for z in z_grid]
    res = pmap(lambda z: carleson_point(pm, w, p, r, z, rspec), pts, workers)
    vals = [v for v, _ in res]
    radii, sups = radial_sups(pts, vals)
    # sup over |z| >= r_j
    tail = np.maximum.accumulate(sups[::-1])[::-1]
    vanishing = bool(tail[-1] <= DECAY_THRESHOLD * max(tail[0], 1e-300) or tail[-1] == 0.0)
    verdict = FAILS if growth_trend(sups) else HOLDS
    diag = {
        "r": r,
        "radii": radii.tolist(),
        "tail_sup": tail.tolist(),
        "vanishing": vanishing,
        "carleson_vanishing_verdict": HOLDS if vanishing else FAILS,
        "mass_verdicts": [o.verdict for _, o in res],
    }
    return CriterionResult("carleson", float(np.max(vals)), list(zip(pts, vals)), verdict, diag)


@dataclass
class EquivalenceGap:
    lo: float
    hi: float
    skipped: int
    ratios: list

    @property
    def bracket(self) -> tuple[float, float]:
        return (self.lo, self.hi)


def equivalence_gap(op: OperatorSymbol, w: RadialWeight, p: float, nu: RadialWeight, q: float,
                    r: float, delta, grid: Sequence[complex], spec: QuadratureSpec | None = None,
                    workers: int = 1) -> EquivalenceGap:
    """Bracket of (Carleson quantity) / B(z) over ``grid``.

    Points where both quantities vanish are skipped and counted.
    """
    car = carleson_criterion(op, w, p, nu, q, r, grid, spec, workers)
    bnd = boundedness_criterion(op, w, p, nu, q, delta, grid, spec, workers)
    ratios = []
    skipped = 0
    for (z, c), (_, b) in zip(car.per_point, bnd.per_point):
        if c == 0 and b == 0:
            skipped += 1
            continue
        ratios.append((z, c / b if b > 0 else math.inf))
    if not ratios:
        return EquivalenceGap(math.nan, math.nan, skipped, [])
    rv = [x for _, x in ratios]
    return EquivalenceGap(min(rv), max(rv), skipped, ratios)


# ---------------------------------------------------------------------------
# essential norm and weakly-null probe


def default_tail_radii(levels: int = 14) -> np.ndarray:
    return 1.0 - 2.0 ** -np.arange(1, levels + 1, dtype=float)


def _circle(radius: float, angles: int) -> list[complex]:
    return [complex(radius * np.exp(2j * np.pi * k / angles)) for k in range(angles)]


def decay_exponent(radii: Sequence[float], values: Sequence[float]) -> float:
    """Slope of ``log E`` against ``log(1 - r)`` over the outer half of the radii."""
    g = 1.0 - np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    half = len(g) // 2
    g, v = g[half:], v[half:]
    ok = v > 0
    if np.count_nonzero(ok) < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(g[ok]), np.log(v[ok]), 1)
    return float(slope)


def essential_norm_estimate(op: OperatorSymbol, w: RadialWeight, p: float, nu: RadialWeight, q: float,
                            delta, tail_radii: Sequence[float] | None = None,
                            spec: QuadratureSpec | None = None, angles: int = 16,
                            workers: int = 1, bounded: CriterionResult | None = None) -> CriterionResult:
    """Tail sequence ``E_j = sup_{|a| = r_j} B(a)`` and its decay.

    When the kernel integral is rotation invariant in ``a`` (``phi`` commutes
    with rotations up to a power and ``|u|`` is radial) one angle suffices.
    """
    _check_exponents(p, q, need_banach=True)
    if bounded is not None and bounded.verdict == FAILS:
        raise PreconditionError("operator is not bounded; essential-norm estimate needs boundedness")
    radii = default_tail_radii() if tail_radii is None else np.asarray(tail_radii, dtype=float)
    if np.any(np.diff(radii) <= 0) or radii[0] < 0 or radii[-1] >= 1:
        raise ValueError("tail_radii must increase within [0, 1)")
    d = _delta_value(delta)
    n_ang = 1 if op.radial_kernel else int(angles)
    pts = [a for rr in radii for a in _circle(float(rr), n_ang)]
    outs = pmap(lambda a: kernel_integral(op, w, p, nu, q, d, a, spec), pts, workers)
    if any(o.divergent for o in outs):
        raise PreconditionError("a kernel integral diverged: operator is not bounded")
    vals = np.array([float(o.value) for o in outs]).reshape(len(radii), n_ang)
    E = vals.max(axis=1)
    if growth_trend(E):
        raise PreconditionError("kernel integrals grow towards the boundary: operator is not bounded")
    compact = decays(E)
    expo = decay_exponent(radii, E) if np.all(E > 0) else math.nan
    undecided = not all(o.converged for o in outs)
    verdict = UNDECIDED if undecided and not compact else (HOLDS if compact else FAILS)
    diag = {
        "delta": d,
        "angles": n_ang,
        "tail_radii": radii.tolist(),
        "E": E.tolist(),
        "decay_exponent": _json_float(expo),
        "classification": "compact" if compact else "not_compact",
        "verdicts": [o.verdict for o in outs],
    }
    return CriterionResult("essential_norm", float(E[-1]), list(zip(radii.tolist(), E.tolist())),
                           verdict, diag)


def compact_probe(op: OperatorSymbol, w: RadialWeight, p: float, nu: RadialWeight, q: float,
                  delta, a_sequence: Sequence[complex], spec: QuadratureSpec | None = None,
                  workers: int = 1, check_family: bool = True,
                  family_bound: float = 20.0) -> CriterionResult:
    """Norms ``||D f_{a_k}||_{A^q_nu}`` along test functions with ``a_k -> boundary``."""
    d = _delta_value(delta)
    pts = [complex(a) for a in a_sequence]
    fams = [make_test_function(a, d, w, p) for a in pts]
    diag: dict = {"delta": d}
    if check_family:
        fnorms = pmap(lambda f: bergman_norm(f, w, p, spec), fams, workers)
        ratio = max(fnorms) / min(fnorms)
        diag["family_norms"] = fnorms
        diag["family_ratio"] = ratio
        if ratio > family_bound:
            raise PreconditionError(f"test functions not uniformly bounded (max/min = {ratio:.3g})")
    outs = pmap(lambda f: image_norm_outcome(op, f, nu, q, spec), fams, workers)
    norms = [math.inf if o.divergent else float(o.value) ** (1.0 / q) for o in outs]
    powq = [x ** q for x in norms]
    compact = decays(powq)
    diag.update({
        "norms_q": powq,
        "classification": "compact" if compact else "not_compact",
        "verdicts": [o.verdict for o in outs],
    })
    verdict = HOLDS if compact else FAILS
    return CriterionResult("compact_probe", norms[-1], list(zip(pts, norms)), verdict, diag)
