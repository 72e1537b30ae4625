import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adsgeo import jets as J
from adsgeo.jets import Jet
from adsgeo.series import SeriesDomainError, TruncatedSeries, cauchy_coefficients, taylor_series

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


def _xy(x, y, order=3):
    return Jet.variable(x, 0, 2, order), Jet.variable(y, 1, 2, order)


def test_product_rule_against_closed_form():
    x, y = _xy(0.4, -0.3)
    f = J.sin(x) * J.exp(y)
    a, b = 0.4, -0.3
    assert np.isclose(f.val, math.sin(a) * math.exp(b), rtol=1e-15)
    assert np.allclose(f.ders[0], [math.cos(a) * math.exp(b), math.sin(a) * math.exp(b)], rtol=1e-14)
    hess = np.array([[-math.sin(a), math.cos(a)], [math.cos(a), math.sin(a)]]) * math.exp(b)
    assert np.allclose(f.ders[1], hess, rtol=1e-14)
    assert np.isclose(f.ders[2][0, 0, 0], -math.cos(a) * math.exp(b), rtol=1e-14)


@given(finite, finite)
@settings(max_examples=60, deadline=None)
def test_mixed_partials_commute(a, b):
    x, y = _xy(a, b)
    f = J.cos(x * y) * (x + 2.0) ** 3 / (1.0 + y * y)
    H, T = f.ders[1], f.ders[2]
    assert np.allclose(H, H.T, atol=1e-10)
    for perm in ((1, 0, 2), (0, 2, 1), (2, 1, 0)):
        assert np.allclose(T, np.transpose(T, perm), atol=1e-9)


@given(st.floats(min_value=0.2, max_value=3.0))
@settings(max_examples=40, deadline=None)
def test_chain_rule_matches_finite_difference(a):
    g = lambda t: J.log(J.sqrt(t) + J.sinh(t))
    jet = g(Jet.variable(a, 0, 1, 2))
    h = 1e-5
    fd1 = (g(a + h) - g(a - h)) / (2 * h)
    # second differences need a larger step to keep roundoff below truncation error
    h2 = 1e-3
    fd2 = (g(a + h2) - 2 * g(a) + g(a - h2)) / h2**2
    assert np.isclose(jet.ders[0][0], fd1, rtol=1e-8)
    assert np.isclose(jet.ders[1][0, 0], fd2, rtol=1e-4, atol=1e-6)


def test_matrix_inverse_and_det_jets():
    x, y = _xy(0.7, 0.2)
    A = J.matrix([[1.0 + x * x, y], [y, 2.0 + J.sin(x)]])
    I = J.matmul(A, J.inverse(A))
    assert np.allclose(I.val, np.eye(2), atol=1e-14)
    for d in I.ders:
        assert np.abs(d).max() < 1e-12
    # Jacobi's formula: d det = det tr(A^-1 dA)
    det = J.det(A)
    Ainv = np.linalg.inv(A.val)
    expect = det.val * np.einsum("ij,jik->k", Ainv, A.ders[0])
    assert np.allclose(det.ders[0], expect, rtol=1e-13)


coeffs = st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=6, max_size=6)


def _unit(cs):
    cs = list(cs)
    cs[0] = 1.0 + abs(cs[0])
    return TruncatedSeries(cs, 5)


@given(coeffs, coeffs, coeffs)
@settings(max_examples=60, deadline=None)
def test_series_ring_axioms(a, b, c):
    A, B, C = (TruncatedSeries(v, 5) for v in (a, b, c))
    assert ((A * B) * C).max_abs_diff(A * (B * C)) < 1e-12
    assert (A * (B + C)).max_abs_diff(A * B + A * C) < 1e-12
    assert (A * B).max_abs_diff(B * A) < 1e-14


@given(coeffs)
@settings(max_examples=60, deadline=None)
def test_series_inverse_and_sqrt(a):
    A = _unit(a)
    assert (A * A.invert()).max_abs_diff(TruncatedSeries([1.0], 5)) < 1e-10
    assert (A.sqrt() * A.sqrt()).max_abs_diff(A) < 1e-10


@given(coeffs)
@settings(max_examples=60, deadline=None)
def test_reversion_is_compositional_inverse(a):
    cs = list(a)
    cs[0] = 0.0
    cs[1] = 1.0 + abs(cs[1])
    A = TruncatedSeries(cs, 5)
    R = A.reversion()
    x = TruncatedSeries.variable(5)
    assert A.compose(R).max_abs_diff(x) < 1e-9
    assert R.compose(A).max_abs_diff(x) < 1e-9


def test_exp_differentiate_integrate():
    x = TruncatedSeries.variable(8)
    e = x.exp()
    ref = [1 / math.factorial(k) for k in range(9)]
    assert np.allclose(e.coeffs, ref, atol=1e-15)
    assert e.differentiate().max_abs_diff(e.truncate(7)) < 1e-15
    assert e.differentiate().integrate(1.0).max_abs_diff(e) < 1e-15


def test_divide_power_rejects_nonzero_low_terms():
    s = TruncatedSeries([0.0, 0.0, 2.0, 1.0], 3)
    assert np.allclose(s.divide_power(2).coeffs[:2], [2.0, 1.0])
    with pytest.raises(SeriesDomainError):
        TruncatedSeries([1e-3, 1.0], 1).divide_power(1)


def test_cauchy_coefficients_of_known_functions():
    c = cauchy_coefficients(lambda z: 1 / (1 - z), 0, 10, radius=0.5)
    assert np.allclose(c.real, 1.0, atol=1e-13)
    # Laurent part: z^-2 + 3 + z
    c = cauchy_coefficients(lambda z: z**-2 + 3 + z, -3, 2, radius=0.5)
    assert np.allclose(c.real, [0, 1, 0, 3, 1, 0], atol=1e-13)
    t = taylor_series(np.cos, 6)
    assert np.allclose(t.coeffs, [1, 0, -0.5, 0, 1 / 24, 0, -1 / 720], atol=1e-13)
