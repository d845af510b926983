import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergop.corpus import CORPUS
from bergop.criteria import (FAILS, HOLDS, boundedness_criterion, carleson_criterion, compact_probe,
                             decay_exponent, decays, default_tail_radii, equivalence_gap,
                             essential_norm_estimate, growth_trend, kernel_integral, order_bounded_criterion,
                             order_majorant)
from bergop.errors import PreconditionError, UnsupportedRegimeError
from bergop.functions import bergman_norm, make_test_function
from bergop.operators import HoloMap, OperatorSymbol, apply
from bergop.weights import RadialWeight

A_GRID = [0.0, 0.5, 0.9, 0.99]


def test_growth_trend_and_decay_helpers():
    assert growth_trend([1, 2, 4, 8, 16])
    assert not growth_trend([1, 1.05, 1.1, 1.12, 1.13])
    assert not growth_trend([1, 2])
    assert decays([1.0, 1e-2, 1e-4, 1e-6, 1e-8])
    assert not decays([1.0, 0.5, 0.5, 0.5, 0.5])
    r = default_tail_radii(10)
    assert decay_exponent(r, (1 - r) ** 2.5) == pytest.approx(2.5, rel=1e-10)


def test_order_bounded_constant_symbol_closed_form(w0):
    c = 0.3
    res = order_bounded_criterion(OperatorSymbol.parse(f"constant:{c}"), w0, 2, w0, 2)
    assert res.verdict == HOLDS
    assert res.value == pytest.approx(w0.total_mass() / float(w0.box_weight(c)), rel=1e-6)
    # u(z) = z, n = 1: int |z|^2 dA = 1/2
    res = order_bounded_criterion(OperatorSymbol.parse(f"constant:{c}", "taylor:0,1", 1), w0, 2, w0, 2)
    expected = 0.5 / ((1 - c * c) ** 2 * float(w0.box_weight(c)))
    assert res.value == pytest.approx(expected, rel=1e-6)


def test_order_bounded_identity_diverges(w0):
    res = order_bounded_criterion(OperatorSymbol.parse("identity"), w0, 2, w0, 2)
    assert res.verdict == FAILS
    assert math.isinf(res.value)
    partials = res.diagnostics["quadrature"]["partial_values"]
    assert partials[-1] > 1e6 * partials[0]
    assert res.to_dict()["value"] == "inf"


@given(st.floats(0.2, 3.0), st.floats(0.0, 2 * math.pi))
@settings(max_examples=8)
def test_order_bounded_scales_with_u(c, theta):
    w = RadialWeight.standard(1.0)
    base = OperatorSymbol.parse("scaling:0.5")
    scaled = OperatorSymbol(base.phi, HoloMap.constant(c * np.exp(1j * theta)), 0)
    q = 1.5
    r0 = order_bounded_criterion(base, w, 2, w, q)
    r1 = order_bounded_criterion(scaled, w, 2, w, q)
    assert r1.value == pytest.approx(c ** q * r0.value, rel=1e-9)


@given(st.integers(0, 30), st.floats(0.0, 0.95), st.floats(0.0, 2 * math.pi), st.integers(0, 1))
@settings(max_examples=20)
def test_majorant_dominates_unit_ball(k, rad, theta, n):
    w = RadialWeight.standard(0.0)
    op = OperatorSymbol.parse("taylor:0.1,0.5,0.2", "taylor:1,0.5", n)
    f = make_test_function(0.9 * np.exp(1j * k), 3.0, w, 2.0)
    # the pointwise bound holds up to a constant depending only on (w, p, n)
    z = rad * np.exp(1j * theta)
    ratio = abs(apply(op, f, z)[()]) / (bergman_norm(f, w, 2.0) * order_majorant(op, w, 2.0, z)[()])
    assert ratio < 10.0


def test_order_bounded_implies_bounded_on_corpus(w0):
    for inst in CORPUS:
        op = inst.symbol()
        ob = order_bounded_criterion(op, w0, 2, w0, 2)
        if ob.verdict == HOLDS:
            b = boundedness_criterion(op, w0, 2, w0, 2, 3, A_GRID)
            assert b.verdict == HOLDS, inst.name


def test_boundedness_constant_symbol_closed_form(w0):
    c = 0.3
    op = OperatorSymbol.parse(f"constant:{c}")
    res = boundedness_criterion(op, w0, 2, w0, 2, 3, A_GRID)
    assert res.verdict == HOLDS
    for a, v in res.per_point:
        exp = (1 - abs(a)) ** 6 / abs(1 - np.conj(a) * c) ** 6 / float(w0.box_weight(a))
        assert v == pytest.approx(exp, rel=1e-6)


def test_boundedness_scales_with_u(w0):
    op = OperatorSymbol.parse("constant:0.3")
    doubled = OperatorSymbol(op.phi, HoloMap.constant(2.0), 0)
    r0 = boundedness_criterion(op, w0, 2, w0, 2, 3, A_GRID)
    r1 = boundedness_criterion(doubled, w0, 2, w0, 2, 3, A_GRID)
    assert r1.value == pytest.approx(4.0 * r0.value, rel=1e-9)


def test_boundedness_rejects_p_above_q(w0):
    with pytest.raises(UnsupportedRegimeError):
        boundedness_criterion(OperatorSymbol.parse("identity"), w0, 3, w0, 2, 3, A_GRID)


def test_identity_derivative_is_unbounded(w0):
    res = boundedness_criterion(OperatorSymbol.parse("identity", n=1), w0, 2, w0, 2, 3,
                                [0.0, 0.5, 0.75, 0.9, 0.95, 0.99])
    assert res.verdict == FAILS


def test_kernel_integral_identity_matches_hypergeometric(w0):
    mp = pytest.importorskip("mpmath")
    op = OperatorSymbol.parse("identity")
    for a in (0.5, 1 - 2.0 ** -10, 1 - 2.0 ** -14):
        out = kernel_integral(op, w0, 2, w0, 2, 3.0, a)
        # int |1 - a z|^{-6} dA = 2F1(3, 3; 2; a^2)
        exact = (1 - a) ** 6 * float(mp.hyp2f1(3, 3, 2, a * a)) / float(w0.box_weight(a))
        assert out.value == pytest.approx(exact, rel=1e-8)


def test_carleson_scaling_vanishes(w0):
    op = OperatorSymbol.parse("scaling:0.5")
    grid = [0.0, 0.25, 0.5, 0.75, 0.9, 0.95]
    res = carleson_criterion(op, w0, 2, w0, 2, 0.5, grid)
    assert res.verdict == HOLDS
    assert res.diagnostics["vanishing"]
    assert res.per_point[-1][1] == 0.0


def test_carleson_identity_bounded_not_vanishing(w0):
    grid = [0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.995, 0.999]
    res = carleson_criterion(OperatorSymbol.parse("identity"), w0, 2, w0, 2, 0.5, grid)
    assert res.verdict == HOLDS
    assert not res.diagnostics["vanishing"]
    outer = [v for z, v in res.per_point if abs(z) >= 0.5]
    assert max(outer) / min(outer) < 4


def test_equivalence_gap_constant_symbol_never_skips(w0):
    # the kernel integral is strictly positive, so no point is skipped
    gap = equivalence_gap(OperatorSymbol.parse("constant:0.0"), w0, 2, w0, 2, 0.5, 3, [0.5, 0.9])
    assert gap.skipped == 0
    assert gap.lo == 0.0


def test_equivalence_gap_identity_bracket(w0):
    gap = equivalence_gap(OperatorSymbol.parse("identity"), w0, 2, w0, 2, 0.5, 3, [0.0, 0.5, 0.9, 0.99])
    lo, hi = gap.bracket
    assert 0 < lo <= hi < math.inf


def test_essential_norm_scaling_decays(w0):
    res = essential_norm_estimate(OperatorSymbol.parse("scaling:0.5"), w0, 2, w0, 2, 3)
    assert res.diagnostics["classification"] == "compact"
    assert res.diagnostics["angles"] == 1
    assert res.diagnostics["decay_exponent"] == pytest.approx(4.0, rel=0.05)


def test_essential_norm_identity_plateau(w0):
    res = essential_norm_estimate(OperatorSymbol.parse("identity"), w0, 2, w0, 2, 3)
    assert res.diagnostics["classification"] == "not_compact"
    E = np.array(res.diagnostics["E"])
    assert E[-1] == pytest.approx(3 * math.pi / 32, rel=1e-3)


def test_essential_norm_requires_boundedness(w0):
    op = OperatorSymbol.parse("identity", n=1)
    bnd = boundedness_criterion(op, w0, 2, w0, 2, 3, [0.0, 0.5, 0.75, 0.9, 0.95, 0.99])
    with pytest.raises(PreconditionError):
        essential_norm_estimate(op, w0, 2, w0, 2, 3, bounded=bnd)
    with pytest.raises(PreconditionError):
        essential_norm_estimate(op, w0, 2, w0, 2, 3)


def test_essential_norm_requires_banach_range(w0):
    with pytest.raises(UnsupportedRegimeError):
        essential_norm_estimate(OperatorSymbol.parse("scaling:0.5"), w0, 0.5, w0, 1, 3)


def test_compact_probe_constant_symbol_closed_form(w0):
    c = 0.3
    seq = [0.5, 0.9, 0.99, 0.999]
    res = compact_probe(OperatorSymbol.parse(f"constant:{c}"), w0, 2, w0, 2, 3, seq)
    for a, v in res.per_point:
        exact = (1 - abs(a)) ** 6 / abs(1 - a * c) ** 6 / float(w0.box_weight(a))
        assert v ** 2 == pytest.approx(exact, rel=1e-6)
    assert res.diagnostics["classification"] == "compact"


def test_compact_probe_identity_not_compact(w0):
    res = compact_probe(OperatorSymbol.parse("identity"), w0, 2, w0, 2, 3, [0.5, 0.9, 0.99, 0.999])
    assert res.diagnostics["classification"] == "not_compact"


def test_compact_probe_rejects_non_uniform_family(w0):
    with pytest.raises(PreconditionError):
        compact_probe(OperatorSymbol.parse("identity"), w0, 2, w0, 2, 0.5, [0.5, 0.9, 0.99, 0.999, 0.9999])
