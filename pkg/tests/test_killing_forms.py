import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from adsgeo import catalog
from adsgeo import killing_forms as K
from adsgeo.tensor_core import VectorField


@pytest.fixture(scope="module")
def cat():
    return K.killing_catalog(3, 0.3)


@pytest.fixture(scope="module")
def pts():
    return catalog.ads(3).chart.sample(np.random.default_rng(42), 10)


def _fd_twist(data, p, h=1e-6):
    """theta = omega ^ d omega from finite differences of omega = g(X, .)."""
    g = O.as_matrix(data.g)
    X = np.asarray(data.X.jet(p, data.g.dim, 0).val, float)
    om = lambda x: g(x) @ X
    D = len(p)
    dom = np.zeros((D, D))
    for b in range(D):
        e = np.zeros(D)
        e[b] = h
        dom[b] = (om(p + e) - om(p - e)) / (2 * h)
    F = dom - dom.T
    w = om(p)
    return np.einsum("a,bc->abc", w, F) + np.einsum("b,ca->abc", w, F) + np.einsum("c,ab->abc", w, F)


def test_killing_catalog_residuals(cat, pts):
    for data in cat.values():
        assert np.abs(K.killing_residual(data, pts)).max() < 1e-9


def test_non_killing_control():
    p = np.array([0.0, 1.0, 1.1, 0.7])
    assert np.abs(K.killing_residual(K.radial_dilation(3), p)).max() > 0.1


def test_static_field_has_zero_twist(cat, pts):
    assert np.abs(K.twist(cat["dt"], pts)).max() < 1e-9


def test_helical_twist_matches_finite_difference(cat):
    p = np.array([0.0, 1.0, math.pi / 3, 0.0])
    data = cat["helical"]
    theta = K.twist(data, p)
    assert np.abs(theta).max() > 1e-3
    assert np.allclose(theta, _fd_twist(data, p), atol=1e-8)
    # V = -g(X, X) = (1 + r^2) - lam^2 r^2 sin^2(theta)
    assert np.isclose(K.lapse(data, p), 2.0 - 0.09 * 0.75, rtol=1e-14)


def test_twist_identities_on_helical_field(cat, pts):
    hel = cat["helical"]
    theta = K.twist(hel, pts)
    assert np.all(np.abs(theta).max(axis=(-3, -2, -1)) > 1e-6)
    assert np.abs(K.lichnerowicz_residual(hel, pts)).max() < 1e-8
    assert np.abs(K.twist_flux_identity(hel, pts)).max() < 1e-7
    assert np.abs(K.dual_twist_closure(hel, pts)).max() < 1e-7
    assert np.abs(K.twist_omega_wedge(hel, pts)).max() < 1e-9


def test_lichnerowicz_holds_for_every_catalog_field(cat, pts):
    for data in cat.values():
        assert np.abs(K.lichnerowicz_residual(data, pts)).max() < 1e-8


def test_dual_closure_fails_off_shell():
    p = np.array([0.0, 1.0, 1.1, 0.7])
    X = K.killing_catalog(3, 0.3)["helical"].X
    deformed = K.StationaryData(K.deformed_ads(3), X)
    assert np.abs(K.dual_twist_closure(deformed, p, check_einstein=False)).max() > 1e-3
    with pytest.raises(K.NotEinsteinError):
        K.dual_twist_closure(deformed, p)


def test_lapse_guard():
    g = catalog.ads(3)
    null = VectorField(lambda x: [x[1] * 0.0, x[1] * 0.0, x[1] * 0.0, x[1] * 0.0], "zero")
    with pytest.raises(K.LapseVanishesError):
        K.twist_flux_identity(K.StationaryData(g, null), np.array([0.0, 1.0, 1.1, 0.7]))


def test_helical_parameter_range():
    with pytest.raises(ValueError):
        K.killing_catalog(3, 1.2)


@pytest.mark.parametrize("eps", [0.1, 0.05, 0.025])
def test_static_flux_vanishes(eps):
    data = K.killing_catalog(3, 0.3, fg=True)["dt"]
    rep = K.flux_integral(data, eps)
    assert abs(rep.flux) < 1e-10
    assert rep.converged
    assert set(rep.to_dict()) == {"epsilon", "flux", "quadrature_nodes", "refined_flux", "converged", "decay_fit"}


def test_sphere_quadrature_integrates_area():
    for m, area in ((2, 4 * math.pi), (3, 2 * math.pi**2)):
        nodes, w = K._sphere_nodes(m, 12)
        # volume element of the iterated-angle chart
        dens = np.ones(len(nodes))
        for i in range(m - 1):
            dens *= np.sin(nodes[:, i]) ** (m - 1 - i)
        assert np.isclose(np.dot(w, dens), area, rtol=1e-12)


@given(st.floats(min_value=0.5, max_value=3.0), st.floats(min_value=0.1, max_value=5.0))
@settings(max_examples=30, deadline=None)
def test_power_law_slope_recovers_exponent(k, c):
    xs = np.array([0.1, 0.05, 0.025, 0.0125])
    assert math.isclose(K.power_law_slope(xs, c * xs**k), k, rel_tol=1e-10)
    assert K.power_law_slope(xs, np.zeros(4)) is None
