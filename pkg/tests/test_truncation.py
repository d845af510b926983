import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergop.corpus import random_polynomial
from bergop.errors import UnsupportedRegimeError
from bergop.functions import Taylor, make_test_function
from bergop.truncation import (expand, fejer_extra, kernel_coefficients, kernel_partial_sum, kernel_tail,
                               remainder_sup_check, reproducing_check, smallest_m, truncate,
                               truncation_norm_ratio)
from bergop.weights import RadialWeight


def test_fejer_head_example():
    pair = truncate(Taylor([1, 1, 1, 1]), 3, "fejer")
    assert np.allclose(pair.head.coeffs[:3], [1, 2 / 3, 1 / 3])
    np.testing.assert_allclose((pair.head + pair.tail).coeffs[:4], [1, 1, 1, 1])


def test_sharp_split_is_exact():
    f = Taylor([1, 2, 3, 4, 5])
    pair = truncate(f, 2)
    assert np.allclose(pair.head.coeffs[:2], [1, 2])
    assert np.allclose(pair.tail.coeffs[:2], 0)
    z = np.array([0.3 + 0.1j, -0.5])
    np.testing.assert_allclose(pair.head(z) + pair.tail(z), f(z))


def test_truncate_needs_taylor(w0):
    f = make_test_function(0.5, 3.0, w0, 2.0)
    with pytest.raises(UnsupportedRegimeError):
        truncate(f, 4)
    g, dropped = expand(f, 64)
    assert dropped < 1e-10
    assert truncate(g, 4).head.coeffs.size <= 65


@given(st.integers(0, 10_000), st.integers(1, 60), st.sampled_from([0.0, 1.0, 2.0]))
@settings(max_examples=40)
def test_sharp_truncation_never_increases_norm_at_p2(seed, m, alpha):
    w = RadialWeight.standard(alpha)
    f = random_polynomial(np.random.default_rng(seed), 40)
    assert truncation_norm_ratio(f, w, 2.0, m) <= 1.0


def test_fejer_ratio_bounded_at_p1(w0):
    f = random_polynomial(np.random.default_rng(3), 12)
    assert truncation_norm_ratio(f, w0, 1.0, 6, "fejer") < 3.0
    with pytest.raises(UnsupportedRegimeError):
        truncation_norm_ratio(f, w0, 1.0, 6, "sharp")


def test_kernel_coefficients_and_sum(w0):
    np.testing.assert_allclose(kernel_coefficients(w0, 3), [1, 2, 3, 4])
    assert abs(kernel_partial_sum(w0, 0.5, 0.5, 400) - 16 / 9) < 1e-12
    assert kernel_tail(w0, 0.5, 0) == pytest.approx(4.0, rel=1e-14)
    # sum_{k>=m} (k+1) r^k in closed form
    r, m = 0.5, 10
    exact = r ** m * (m + 1 - m * r) / (1 - r) ** 2
    assert kernel_tail(w0, r, m) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("alpha, expected", [(0.0, 3566), (1.0, 4425), (2.0, 5243)])
def test_smallest_m_regression(alpha, expected):
    w = RadialWeight.standard(alpha)
    m = smallest_m(w, 0.99, 1e-10)
    assert m == expected
    assert kernel_tail(w, 0.99, m) < 1e-10 <= kernel_tail(w, 0.99, m - 1)


def test_fejer_extra(w0):
    assert fejer_extra(w0, 0.5, 1) == 0.0
    assert fejer_extra(w0, 0.5, 2) == pytest.approx(0.5 * 2)


def test_remainder_bounded_by_kernel_tail(w0):
    f = random_polynomial(np.random.default_rng(7), 40)
    for m in (5, 20, 40):
        chk = remainder_sup_check(f, w0, 2.0, m, 0.5)
        # Cauchy-Schwarz constant at p = 2
        assert chk.measured <= math.sqrt(w0.total_mass()) * chk.tail_bound * (1 + 1e-12)
    assert remainder_sup_check(f, w0, 2.0, 41, 0.5).measured == 0.0


def test_reproducing_check(w0):
    f = Taylor([1, -0.5j, 0.25])
    res = reproducing_check(w0, f, 0.4 + 0.2j, 10, quadrature=True)
    assert res.residual < 1e-14
    assert abs(res.quadrature_pairing - f(np.array([0.4 + 0.2j]))[0]) < 1e-8
    assert reproducing_check(w0, Taylor([0, 1]), 0.3, 0).residual == pytest.approx(0.3)
