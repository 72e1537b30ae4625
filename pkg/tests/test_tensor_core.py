import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from adsgeo import catalog
from adsgeo import jets as J
from adsgeo.conventions import cosmological_constant
from adsgeo.tensor_core import (
    LORENTZIAN,
    RIEMANNIAN,
    Chart,
    ChartDomainError,
    DegenerateMetricError,
    FormField,
    LocalGeometry,
    MetricField,
    ScalarField,
    SignatureError,
    d_jet,
    einstein_divergence,
    einstein_residual,
    exterior_derivative,
    hodge_star,
    laplacian,
)


def _tilted_metric():
    """A non-diagonal Riemannian 3-metric for the finite-difference oracle."""
    chart = Chart("box", 3, (-1.0,) * 3, (1.0,) * 3)

    def fn(x):
        a, b, c = x
        return [
            [2.0 + J.sin(a) * b, 0.3 * c, 0.1 * a * b],
            [0.3 * c, 1.5 + a * a, 0.2 * J.cos(c)],
            [0.1 * a * b, 0.2 * J.cos(c), 1.0 + J.exp(0.2 * b)],
        ]

    return MetricField(3, RIEMANNIAN, fn, chart, "tilted")


@pytest.mark.parametrize(
    "metric, point",
    [
        (catalog.round_sphere(2), [1.0, 0.4]),
        (catalog.ads(3), [0.3, 1.2, 1.1, 0.7]),
        (catalog.schwarzschild_ads(3, 1.0), [0.3, 1.5, 1.1, 0.7]),
        (catalog.schwarzschild_ads(4, 0.5), [0.1, 1.4, 1.0, 1.3, 0.5]),
        (_tilted_metric(), [0.2, -0.3, 0.5]),
    ],
    ids=["sphere", "ads3", "sads3", "sads4", "tilted"],
)
def test_curvature_matches_finite_difference_oracle(metric, point):
    p = np.array(point)
    geo = LocalGeometry(metric, p)
    g = O.as_matrix(metric)
    gamma_fd = O.fd_christoffel(g, p)
    assert np.allclose(geo.gamma.val, gamma_fd, rtol=1e-4, atol=1e-8)
    R = geo.riemann.val
    R_fd = O.fd_riemann(g, p)
    assert np.abs(R - R_fd).max() <= 1e-4 * max(1.0, np.abs(R_fd).max())


def test_round_sphere_has_unit_sectional_curvature():
    for m in (2, 3, 4):
        g = catalog.round_sphere(m)
        pts = g.chart.sample(np.random.default_rng(1), 5)
        geo = LocalGeometry(g, pts)
        Rl = geo.riemann_lower.val
        ref = np.stack([O.constant_curvature_riemann_lower(gm, 1.0) for gm in geo.g.val])
        assert np.abs(Rl - ref).max() < 1e-12
        assert np.allclose(geo.scalar.val, m * (m - 1), atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_hyperbolic_slices_have_curvature_minus_one(n):
    for g in (catalog.hyperbolic_polar(n), catalog.hyperbolic_radial(n)):
        pts = g.chart.sample(np.random.default_rng(n), 4)
        geo = LocalGeometry(g, pts)
        ref = np.stack([O.constant_curvature_riemann_lower(gm, -1.0) for gm in geo.g.val])
        assert np.abs(geo.riemann_lower.val - ref).max() < 1e-10


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("which", ["ads", "sads"])
def test_vacuum_catalog(n, which):
    g = catalog.ads(n) if which == "ads" else catalog.schwarzschild_ads(n, 1.0)
    pts = g.chart.sample(np.random.default_rng(42), 10)
    lam = cosmological_constant(n)
    assert np.abs(einstein_residual(g, lam, pts)).max() < 1e-8
    # Ric = -n g
    geo = LocalGeometry(g, pts, order=2)
    assert np.abs(geo.ricci.val + n * geo.g.val).max() < 1e-8


def test_ads_is_maximally_symmetric_with_minus_one():
    g = catalog.ads(3)
    pts = g.chart.sample(np.random.default_rng(3), 5)
    geo = LocalGeometry(g, pts)
    ref = np.stack([O.constant_curvature_riemann_lower(gm, -1.0) for gm in geo.g.val])
    assert np.abs(geo.riemann_lower.val - ref).max() < 1e-10


def test_contracted_bianchi_and_wrong_lambda():
    g = catalog.schwarzschild_ads(3, 2.0)
    pts = g.chart.sample(np.random.default_rng(5), 4)
    assert np.abs(einstein_divergence(g, pts)).max() < 1e-6
    # control: a wrong cosmological constant is detected
    assert np.abs(einstein_residual(g, -1.0, pts)).max() > 1.0


@given(st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=25, deadline=None)
def test_scaling_covariance(c):
    base = catalog.schwarzschild_ads(3, 1.0)
    scaled = MetricField(4, LORENTZIAN, lambda x: base.fn(x) * c, base.chart, "scaled")
    p = np.array([0.1, 1.7, 1.2, 2.0])
    a, b = LocalGeometry(base, p), LocalGeometry(scaled, p)
    assert np.allclose(b.gamma.val, a.gamma.val, atol=1e-12)
    assert np.allclose(b.ricci.val, a.ricci.val, atol=1e-11)
    assert np.isclose(b.scalar.val, a.scalar.val / c, rtol=1e-11)


def _one_form(dim):
    return FormField(1, dim, lambda x: {(i,): J.sin(x[i] + 0.3 * i) * x[(i + 1) % dim] for i in range(dim)})


def _two_form(dim):
    def fn(x):
        return {(i, j): x[i] * x[j] + J.cos(x[(i + j) % dim]) for i in range(dim) for j in range(i + 1, dim)}

    return FormField(2, dim, fn)


@given(st.integers(min_value=0, max_value=1000))
@settings(max_examples=20, deadline=None)
def test_double_hodge_sign(seed):
    rng = np.random.default_rng(seed)
    # Lorentzian signature contributes an extra minus sign
    for g, s in ((catalog.ads(3), -1), (catalog.hyperbolic_radial(3), 1)):
        D = g.dim
        p = g.chart.sample(rng, 1)[0]
        geo = LocalGeometry(g, p, order=0)
        for alpha in (_one_form(D), _two_form(D)):
            k = alpha.degree
            a = alpha.jet(p, 0)
            twice = geo.hodge(geo.hodge(a)).val
            assert np.allclose(twice, s * (-1) ** (k * (D - k)) * a.val, atol=1e-10)
    # pointwise API agrees with the jet route
    g = catalog.ads(3)
    p = np.array([0.1, 1.3, 1.0, 2.0])
    alpha = _two_form(4)
    assert np.allclose(hodge_star(g, alpha, p), LocalGeometry(g, p, order=0).hodge(alpha.jet(p, 0)).val)


def test_d_squared_vanishes():
    p = np.array([0.2, 0.5, -0.4, 1.1])
    for alpha in (_one_form(4), _two_form(4)):
        dd = d_jet(d_jet(alpha.jet(p, 2)))
        assert np.abs(dd.val).max() < 1e-12
        assert np.abs(exterior_derivative(alpha, p)).max() > 0.1


def test_laplacian_of_coordinate_on_hyperbolic_space():
    # on dr^2/(1+r^2) + r^2 dsigma: Delta r = (1+r^2)(n-1)/r + r
    n = 3
    g = catalog.hyperbolic_radial(n)
    r = np.array([0.5, 1.0, 2.0])
    pts = np.column_stack([r, np.full(3, 1.1), np.full(3, 0.7)])
    lap = laplacian(g, ScalarField(lambda x: x[0]), pts)
    assert np.allclose(lap, (1 + r * r) * (n - 1) / r + r, rtol=1e-13)


def test_errors_are_raised_not_swallowed():
    chart = Chart("box", 2, (-1.0, -1.0), (1.0, 1.0))
    flat_lor = MetricField(2, RIEMANNIAN, lambda x: catalog._diag([-1.0, 1.0], x[0]), chart)
    with pytest.raises(SignatureError):
        LocalGeometry(flat_lor, [0.0, 0.0])
    degenerate = MetricField(2, RIEMANNIAN, lambda x: catalog._diag([x[0], 1.0], x[0]), chart)
    with pytest.raises(DegenerateMetricError):
        LocalGeometry(degenerate, [0.0, 0.5])
    with pytest.raises(ChartDomainError):
        catalog.ads(3).chart.point(0.0, 10.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        LocalGeometry(catalog.ads(3), [0.0, 1.0, 1.0])
