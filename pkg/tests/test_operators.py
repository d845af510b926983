import math

import numpy as np
import pytest

from bergop.corpus import random_pairs
from bergop.errors import ConfigError, DivergentIntegralError, SelfMapError, UnsupportedRegimeError
from bergop.functions import Taylor, bergman_norm, make_test_function
from bergop.geometry import Region
from bergop.operators import (HoloMap, OperatorSymbol, PullbackMeasure, apply, image_norm,
                              pullback_integrate, pullback_region_mass)
from bergop.weights import RadialWeight


def test_apply_examples():
    op = OperatorSymbol.parse("power:2", "taylor:0,1", 1)
    assert apply(op, Taylor([0, 0, 0, 1]), 0.5)[()] == pytest.approx(0.09375)
    ident = OperatorSymbol.parse("identity")
    f = Taylor([1, -2j, 0.5])
    z = np.array([0.3, -0.7j])
    assert np.allclose(apply(ident, f, z), f(z))
    assert np.all(apply(OperatorSymbol.parse("identity", n=2), Taylor([1, 5]), z) == 0)


def test_self_map_certificate():
    with pytest.raises(SelfMapError):
        OperatorSymbol.parse("taylor:0.5,0.6")
    with pytest.raises(SelfMapError):
        OperatorSymbol.parse("scaling:1.01")
    op = OperatorSymbol.parse("blaschke:0.5")
    assert op.certificate < 1


def test_apply_outside_disk_raises():
    op = OperatorSymbol.parse("scaling:0.5")
    with pytest.raises(SelfMapError):
        apply(op, Taylor([1]), np.array([0.1, 2.5]))


def test_map_parsing_round_trip():
    for s in ["scaling:0.5", "constant:0.3", "power:2", "blaschke:0.5", "constant:0.1+0.2j"]:
        m = HoloMap.parse(s)
        back = HoloMap.parse(m.spec_string())
        assert (back.kind, back.param) == (m.kind, m.param)
    assert HoloMap.parse([0.1, 0.5]).kind == "taylor"
    assert HoloMap.parse("identity").spec_string() == "scaling:1"
    for bad in ["spiral:1", "power:x", {"a": 1}]:
        with pytest.raises(ConfigError):
            HoloMap.parse(bad)


def test_preimages_and_derivative():
    for spec in ["scaling:0.5", "power:3", "blaschke:0.3+0.2j", "taylor:0.1,0.5,0.2"]:
        m = HoloMap.parse(spec)
        w = complex(m(np.array([0.2 - 0.1j]))[0])
        pre = m.preimages(w)
        assert any(abs(p - (0.2 - 0.1j)) < 1e-10 for p in pre)
        h = 1e-6
        z = np.array([0.3 + 0.2j])
        num = (m(z + h) - m(z - h)) / (2 * h)
        assert np.allclose(m.derivative(z), num, rtol=1e-7)


def test_image_norm_examples(w0):
    f = Taylor([0.5, 1, -1])
    ident = OperatorSymbol.parse("identity")
    assert image_norm(ident, f, w0, 2) == pytest.approx(bergman_norm(f, w0, 2), rel=1e-10)
    zero = OperatorSymbol.parse("constant:0")
    assert image_norm(zero, f, w0, 3) == pytest.approx(0.5, rel=1e-10)
    d1 = OperatorSymbol.parse("identity", n=1)
    assert image_norm(d1, Taylor([0, 0, 1]), w0, 2) == pytest.approx(math.sqrt(2), rel=1e-10)


def test_image_norm_unbounded_raises(w0):
    # derivative of a test function with a too small exponent leaves A^2
    op = OperatorSymbol.parse("identity", n=1)
    f = make_test_function(0.999, 0.2, w0, 2)
    out_ok = image_norm(op, f, w0, 2)  # finite for fixed a
    assert out_ok > 0
    with pytest.raises(DivergentIntegralError):
        PullbackMeasure(OperatorSymbol.parse("identity", "constant:1"),
                        RadialWeight.custom(lambda r: (1 - np.asarray(r)) ** -1.5), 1.0)


def test_pullback_examples(w0):
    pm = PullbackMeasure(OperatorSymbol.parse("identity"), w0, 2)
    assert pullback_integrate(pm, lambda w: np.ones(w.shape)).value == pytest.approx(1.0)
    pm2 = PullbackMeasure(OperatorSymbol.parse("power:2"), w0, 2)
    assert pullback_integrate(pm2, lambda w: np.abs(w) ** 2).value == pytest.approx(1 / 3, rel=1e-9)


def test_region_mass_examples(w0):
    pm = PullbackMeasure(OperatorSymbol.parse("identity"), w0, 3)
    assert pullback_region_mass(pm, Region.full_disk()) == pytest.approx(1.0)
    assert pullback_region_mass(pm, Region.pseudo_disk(0, 0.5)) == pytest.approx(0.25, rel=1e-9)
    const = PullbackMeasure(OperatorSymbol.parse("constant:0.3"), w0, 2)
    assert pullback_region_mass(const, Region.pseudo_disk(0.9, 0.5)) == 0.0
    assert pullback_region_mass(const, Region.pseudo_disk(0.3, 0.1)) == pytest.approx(1.0)


def test_region_mass_additive_and_monotone(w0):
    pm = PullbackMeasure(OperatorSymbol.parse("scaling:0.8"), w0, 2)
    sq = pullback_region_mass(pm, Region.carleson_square(0.5))
    inner = pullback_region_mass(pm, Region.pseudo_disk(0.7, 0.2))
    whole = pm.total_mass
    ann = pullback_region_mass(pm, Region.annulus_complement(0.5))
    disk = pullback_region_mass(pm, Region.pseudo_disk(0, 0.5))
    assert disk + ann == pytest.approx(whole, rel=1e-4)
    assert inner <= sq + 1e-6
    # mu(D_r) for phi = 0.8 z is the area of |z| < r / 0.8
    assert disk == pytest.approx((0.5 / 0.8) ** 2, rel=1e-4)


def test_target_side_matches_source_side():
    for op, f, nu, q in random_pairs(7, 6):
        pm = PullbackMeasure(op, nu, q)
        g = lambda w, f=f, n=op.n, q=q: np.abs(f.derivative(n, w)) ** q  # noqa: E731
        src = pullback_integrate(pm, g, focus=f.focus())
        auto = pullback_integrate(pm, g, focus=f.focus(), side="auto")
        assert auto.value == pytest.approx(src.value, rel=1e-5)


def test_target_side_unavailable():
    pm = PullbackMeasure(OperatorSymbol.parse("power:2"), RadialWeight.standard(0), 2)
    with pytest.raises(UnsupportedRegimeError):
        pullback_integrate(pm, lambda w: np.ones(w.shape), side="target")


def test_radial_kernel_flag():
    assert OperatorSymbol.parse("scaling:0.5").radial_kernel
    assert OperatorSymbol.parse("power:2", "taylor:0,1").radial_kernel
    assert not OperatorSymbol.parse("blaschke:0.5").radial_kernel
    assert not OperatorSymbol.parse("scaling:0.5", "taylor:1,0.5").radial_kernel
