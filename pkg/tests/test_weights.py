import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from bergop.errors import ConfigError
from bergop.weights import (RadialWeight, carleson_box_weight, doubling_report, load_weight_csv,
                            omega_hat, omega_moment, omega_tilde, weight_from_spec)


def tail_closed_form(alpha, r):
    val, _ = integrate.quad(lambda s: (1 - s * s) ** alpha, r, 1, epsabs=0, epsrel=1e-13)
    return val


def test_omega_hat_examples(w0, w1):
    assert omega_hat(w0, 0.3) == pytest.approx(0.7, rel=1e-15)
    assert omega_hat(w1, 0.5) == pytest.approx((2 - 3 * 0.5 + 0.5 ** 3) / 3, rel=1e-12)
    assert omega_hat(w1, 1 - 1e-12) < 1e-20


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0, 0.5])
def test_omega_hat_matches_quadrature(alpha):
    w = RadialWeight.standard(alpha)
    for r in [0.0, 0.1, 0.5, 0.9, 0.99]:
        assert omega_hat(w, r) == pytest.approx(tail_closed_form(alpha, r), rel=1e-10)


def test_moments(w0, w1):
    assert omega_moment(w0, 3) == pytest.approx(0.25, rel=1e-14)
    assert omega_moment(w1, 1) == pytest.approx(0.25, rel=1e-14)
    assert omega_moment(w0, 0) == pytest.approx(1.0, rel=1e-14)
    ms = w1.moments(np.arange(50))
    assert np.all(np.diff(ms) < 0)
    assert ms[7] == pytest.approx(0.5 * special.beta(4.0, 2.0), rel=1e-13)


def test_omega_tilde(w0, w1):
    assert omega_tilde(w0, 0.5) == pytest.approx(1.0)
    assert omega_tilde(w1, 0.0) == pytest.approx(2 / 3)
    assert omega_tilde(w0, 0.9) == pytest.approx(1.0)


def test_box_weight_examples(w0):
    assert carleson_box_weight(w0, 0) == pytest.approx(1.0)
    assert carleson_box_weight(w0, 0.5) == pytest.approx(3 / (16 * math.pi), rel=1e-14)
    assert carleson_box_weight(w0, 0.5j) == pytest.approx(3 / (16 * math.pi), rel=1e-14)


def test_box_weight_boundary_slope(w0):
    g = 2.0 ** -np.arange(10, 30)
    bw = w0.box_weight(1 - g)
    slope = np.polyfit(np.log(g), np.log(bw), 1)[0]
    assert slope == pytest.approx(2.0, rel=0.05)


def test_box_weight_rejects_outside(w0):
    with pytest.raises(ValueError):
        w0.box_weight(1.0)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
def test_box_to_tail_ratio_bracket(alpha):
    # the ratio is (1/pi) * (mean of s over the tail mass): below 1/pi, and
    # near the origin as small as int s omega / (pi int omega)
    w = RadialWeight.standard(alpha)
    r = np.linspace(0.01, 0.999, 400)
    ratio = w.box_weight(r) / (w.tail_gap(1 - r) * (1 - r))
    floor = w.moment(1) / (math.pi * w.moment(0))
    assert ratio.min() >= floor * 0.99
    assert ratio.max() <= 1 / math.pi
    assert ratio.max() / ratio.min() <= 4


def test_doubling_alpha0_exact(w0):
    rep = doubling_report(w0)
    assert rep.upper_constant == 2.0
    assert all(x == 2.0 for x in rep.upper_ratios)
    assert rep.c_check[2.0] == pytest.approx(2.0, rel=1e-14)
    assert rep.verdict == {"in_Dhat": True, "in_Dcheck": True, "in_D": True}
    assert rep.lower_pair == (pytest.approx(1.5), 1.5)


def test_doubling_alpha1_exponents(w1):
    rep = doubling_report(w1)
    lo, hi = rep.exponents
    assert 0 < lo <= hi
    assert lo == pytest.approx(2.0, rel=0.1) and hi == pytest.approx(2.0, rel=0.1)


def test_doubling_errors(w0):
    with pytest.raises(ValueError):
        doubling_report(w0, grid=[])
    with pytest.raises(ValueError):
        doubling_report(w0, theta_candidates=[1.0])


def test_doubling_drops_underflow():
    w = RadialWeight.standard(40.0)
    rep = doubling_report(w)
    assert rep.dropped > 0
    assert len(rep.grid) + rep.dropped == 40


def test_non_doubling_weight_detected():
    # exponentially decaying tail: omega_hat(r)/omega_hat((1+r)/2) is unbounded
    w = RadialWeight.custom(lambda r: np.exp(-1.0 / (1.0 - np.asarray(r))), name="rapid")
    rep = doubling_report(w, grid=1 - 2.0 ** -np.arange(1, 7))
    assert not rep.verdict["in_Dhat"]


def test_table_weight_matches_standard():
    r = np.linspace(0, 0.999, 2000)
    tw = RadialWeight.table(r, 1 - r * r)
    w1 = RadialWeight.standard(1.0)
    assert tw.tail_gap(0.5) == pytest.approx(float(w1.tail_gap(0.5)), rel=1e-5)
    # constant continuation past the last sample costs ~1e-6 absolute
    assert tw.moment(3) == pytest.approx(w1.moment(3), rel=5e-5)
    assert tw.box_weight(0.5) == pytest.approx(float(w1.box_weight(0.5)), rel=1e-5)


def test_table_weight_rejects_negative():
    with pytest.raises(ValueError, match="row 1"):
        RadialWeight.table([0.0, 0.5, 0.9], [1.0, -1.0, 1.0])


def test_csv_loader(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("r,omega\n0.0,1.0\n0.5,1.0\n0.9,1.0\n")
    w = load_weight_csv(p)
    assert w.tail_gap(0.5) == pytest.approx(0.5)
    bad = tmp_path / "bad.csv"
    bad.write_text("r,omega\n0.0,1.0\n0.5,-2.0\n")
    with pytest.raises(ConfigError, match="row 3"):
        load_weight_csv(bad)
    assert weight_from_spec("csv:w.csv", tmp_path).kind == "table"


def test_weight_from_spec():
    assert weight_from_spec("standard:alpha=1.5").alpha == 1.5
    for bad in ["standard:beta=1", "gauss:1", "standard:alpha=-2"]:
        with pytest.raises(ConfigError):
            weight_from_spec(bad)


def test_custom_weight_tail_and_box():
    w = RadialWeight.custom(lambda r: (1 - np.asarray(r) ** 2), name="std1")
    ref = RadialWeight.standard(1.0)
    for r in [0.0, 0.5, 0.99]:
        assert w.tail_gap(1 - r) == pytest.approx(float(ref.tail_gap(1 - r)), rel=1e-9)
    for z in [0.1, 0.5, 0.9, 0.999]:
        assert w.box_weight(z) == pytest.approx(float(ref.box_weight(z)), rel=1e-6)


@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999), st.sampled_from([0.0, 1.0, 2.0, 3.5]))
def test_tail_monotone(r, t, alpha):
    w = RadialWeight.standard(alpha)
    lo, hi = min(r, t), max(r, t)
    assert omega_hat(w, lo) >= omega_hat(w, hi)


def test_moment_cache_threadsafe():
    from concurrent.futures import ThreadPoolExecutor
    w = RadialWeight.standard(0.7)
    with ThreadPoolExecutor(4) as ex:
        vals = list(ex.map(lambda n: w.moment(n % 17), range(200)))
    assert vals[:17] == [w.moment(n) for n in range(17)]
