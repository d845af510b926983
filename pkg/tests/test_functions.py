import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from bergop.functions import (DeltaChoice, MonomialNormalized, Taylor, TestFunction, bergman_norm,
                              bergman_norm_moments, choose_delta, eval_derivative, growth_ratio,
                              make_test_function, monomial_norm)
from bergop.weights import RadialWeight, doubling_report


def test_taylor_derivatives():
    assert eval_derivative(Taylor([0, 0, 0, 1]), 1, 0.5) == pytest.approx(0.75)
    f = Taylor([1, 2, 3])
    assert np.allclose(eval_derivative(f, 2, np.array([0.1, -0.3j, 0.7])), 6.0)
    assert eval_derivative(f, 3, 0.2) == 0


def test_taylor_validation():
    with pytest.raises(ValueError):
        Taylor([])
    with pytest.raises(ValueError):
        Taylor([1, np.inf])
    with pytest.raises(ValueError):
        Taylor([1, 2]).derivative(-1, 0.1)


def test_test_function_value_at_a(w0):
    a = 0.6 * np.exp(0.3j)
    f = make_test_function(a, 3.0, w0, 2.0)
    expected = (1 + abs(a)) ** -3 * float(w0.box_weight(a)) ** -0.5
    assert abs(f(a)) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_test_function_derivative_vs_finite_difference(w1, n):
    f = make_test_function(0.7 - 0.2j, 2.5, w1, 2.0)
    h = 1e-5
    z = np.array([0.3 + 0.1j, -0.5j, 0.85])
    if n == 0:
        return
    num = (f.derivative(n - 1, z + h) - f.derivative(n - 1, z - h)) / (2 * h)
    assert np.allclose(f.derivative(n, z), num, rtol=1e-6)


def test_test_function_taylor_coefficients(w0):
    f = make_test_function(0.5 + 0.3j, 2.5, w0, 2.0)
    c = f.taylor_coefficients(200)
    z = np.array([0.2, -0.4j, 0.5 * np.exp(1j)])
    assert np.allclose(Taylor(c)(z), f(z), rtol=1e-12)


def test_test_function_validation(w0):
    with pytest.raises(ValueError):
        make_test_function(0.5, 0.0, w0, 2.0)
    with pytest.raises(ValueError):
        TestFunction(1.0, 2.0, w0, 2.0)


def test_norm_examples(w0):
    assert bergman_norm(Taylor([1.0]), w0, 2) == pytest.approx(1.0, rel=1e-12)
    assert bergman_norm(Taylor([0, 1.0]), w0, 2) == pytest.approx(1 / math.sqrt(2), rel=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
@pytest.mark.parametrize("k", [0, 3, 7])
def test_monomial_norm_beta(alpha, k):
    w = RadialWeight.standard(alpha)
    # 2 int r^(2k+1) (1 - r^2)^alpha dr = int t^k (1 - t)^alpha dt
    ref = math.sqrt(special.beta(k + 1, alpha + 1))
    assert monomial_norm(k, w, 2) == pytest.approx(ref, rel=1e-9)
    assert bergman_norm(Taylor(np.eye(k + 1)[k]), w, 2) == pytest.approx(ref, rel=1e-8)


def test_normalized_monomial_has_unit_norm(w1):
    m = MonomialNormalized(4, w1, 3.0)
    assert bergman_norm(m, w1, 3.0) == pytest.approx(1.0, rel=1e-8)


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=12))
def test_moment_norm_matches_quadrature(coeffs):
    f = Taylor(coeffs)
    w = RadialWeight.standard(1.0)
    mom = bergman_norm_moments(f, w)
    if mom < 1e-6:
        return
    assert bergman_norm(f, w, 2) == pytest.approx(mom, rel=1e-6)


def test_test_function_at_origin_has_unit_norm(w1):
    f = make_test_function(0, 3.0, w1, 2.0)
    assert bergman_norm(f, w1, 2) == pytest.approx(1.0, rel=1e-10)


def test_choose_delta():
    rep0 = doubling_report(RadialWeight.standard(0.0))
    d0 = choose_delta(None, 2.0, rep0)
    assert d0.basis == "heuristic" and d0.delta == pytest.approx(2.0, rel=1e-3)
    rep2 = doubling_report(RadialWeight.standard(2.0))
    assert choose_delta(None, 1.0, rep2).delta == pytest.approx(8.0, rel=0.02)
    assert choose_delta(None, 2.0, rep0, override=5) == DeltaChoice(5.0, "user")
    with pytest.raises(ValueError):
        DeltaChoice(-1.0, "user")


def test_growth_ratio_examples(w0):
    grid = [r * np.exp(1j * t) for r in np.linspace(0, 0.99, 20) for t in (0, 2)]
    one = Taylor([1.0])
    assert growth_ratio(one, w0, 2, 0, grid) == pytest.approx(1.0)
    assert growth_ratio(one, w0, 2, 1, grid) == 0.0
    with pytest.raises(ValueError):
        growth_ratio(Taylor([0.0]), w0, 2, 0, grid, norm=0.0)


@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_growth_ratio_scale_invariant(c):
    w = RadialWeight.standard(1.0)
    f = Taylor([1, -2, 0.5, 3])
    grid = np.linspace(0, 0.95, 30) * np.exp(0.4j)
    a = growth_ratio(f, w, 2, 1, grid, norm=bergman_norm_moments(f, w))
    g = f.scaled(c)
    b = growth_ratio(g, w, 2, 1, grid, norm=bergman_norm_moments(g, w))
    assert b == pytest.approx(a, rel=1e-10)


def test_squared_variant_differs_by_bounded_factor(w0):
    a = 0.9
    f = make_test_function(a, 3.0, w0, 2.0)
    g = make_test_function(a, 3.0, w0, 2.0, squared=True)
    ratio = bergman_norm(g, w0, 2) / bergman_norm(f, w0, 2)
    assert 1.0 <= ratio <= 2.0 ** 3
    assert ratio == pytest.approx((1 + a) ** 3, rel=1e-10)
