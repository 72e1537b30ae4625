"""Built-in metrics and their charts.

Angles on S^{m} are iterated polar angles ``theta_1 .. theta_{m-1}`` in
(0, pi) followed by an azimuth in (0, 2 pi).  Admissibility boxes keep
sample points away from r = 0, the poles, and horizons.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from . import jets as J
from .tensor_core import LORENTZIAN, RIEMANNIAN, Chart, MetricField

POLE_MARGIN = 0.3


def angle_box(m: int) -> tuple[tuple, tuple]:
    """Bounds for the m angles of S^m."""
    if m == 0:
        return (), ()
    lo = (POLE_MARGIN,) * (m - 1) + (0.0,)
    hi = (math.pi - POLE_MARGIN,) * (m - 1) + (2 * math.pi,)
    return lo, hi


def sphere_factors(angles) -> list:
    """Diagonal entries of the unit round metric in iterated polar angles."""
    out = [1.0]
    acc = None
    for th in angles[:-1]:
        s2 = J.sin(th) ** 2
        acc = s2 if acc is None else acc * s2
        out.append(acc)
    return out[: len(angles)]


def _diag(entries, like) -> J.Jet:
    return J.diag([e if isinstance(e, J.Jet) else like * 0.0 + e for e in entries])


def euclidean(dim: int) -> MetricField:
    chart = Chart("cartesian", dim, (-3.0,) * dim, (3.0,) * dim)
    return MetricField(dim, RIEMANNIAN, lambda x: _diag([1.0] * dim, x[0]), chart, f"euclidean-{dim}")


def round_sphere(m: int = 2) -> MetricField:
    lo, hi = angle_box(m)
    chart = Chart("sphere-angles", m, lo, hi)
    return MetricField(m, RIEMANNIAN, lambda x: _diag(sphere_factors(x), x[0]), chart, f"round-S{m}")


def hyperbolic_polar(n: int) -> MetricField:
    """ds^2 + sinh(s)^2 dsigma_0 on H^n (geodesic polar coordinates)."""
    lo, hi = angle_box(n - 1)
    chart = Chart("geodesic-polar", n, (0.1,) + lo, (3.0,) + hi)

    def fn(x):
        w = J.sinh(x[0]) ** 2
        return _diag([1.0] + [w * f for f in sphere_factors(x[1:])], x[0])

    return MetricField(n, RIEMANNIAN, fn, chart, f"hyperbolic-polar-{n}")


def hyperbolic_radial(n: int) -> MetricField:
    """g_H = dr^2 / (1 + r^2) + r^2 dsigma_0."""
    lo, hi = angle_box(n - 1)
    chart = Chart("radial-slice", n, (0.1,) + lo, (5.0,) + hi)

    def fn(x):
        r = x[0]
        return _diag([1.0 / (1 + r * r)] + [r * r * f for f in sphere_factors(x[1:])], x[0])

    return MetricField(n, RIEMANNIAN, fn, chart, f"hyperbolic-radial-{n}")


def static_metric(n: int, V, f, r_lo: float, r_hi: float, name: str) -> MetricField:
    """-V dt^2 + dr^2 / f + r^2 dsigma_0 in coordinates (t, r, angles)."""
    lo, hi = angle_box(n - 1)
    chart = Chart("global-AdS", n + 1, (-2.0, r_lo) + lo, (2.0, r_hi) + hi)

    def fn(x):
        r = x[1]
        return _diag([-V(r), 1.0 / f(r)] + [r * r * s for s in sphere_factors(x[2:])], x[0])

    return MetricField(n + 1, LORENTZIAN, fn, chart, name)


def ads(n: int) -> MetricField:
    prof = lambda r: 1 + r * r
    return static_metric(n, prof, prof, 0.2, 5.0, f"ads-{n}")


def schwarzschild_ads_horizon(n: int, M: float) -> float:
    """Largest positive root of 1 + r^2 - M / r^(n-2) (0 when M <= 0)."""
    if M <= 0:
        return 0.0
    F = lambda r: 1 + r * r - M / r ** (n - 2)
    hi = 1.0
    while F(hi) <= 0:
        hi *= 2
    return brentq(F, 1e-12, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def schwarzschild_ads(n: int, M: float) -> MetricField:
    prof = lambda r: 1 + r * r - M / r ** (n - 2)
    rh = schwarzschild_ads_horizon(n, M)
    return static_metric(n, prof, prof, rh + 0.2, rh + 6.0, f"schwarzschild-ads-{n}-M{M:g}")


def ads_fg(n: int) -> MetricField:
    """AdS in FG gauge: s^-2 (ds^2 - (1 + s^2/4)^2 dt^2 + (1 - s^2/4)^2 dsigma_0)."""
    lo, hi = angle_box(n - 1)
    chart = Chart("FG-gauge", n + 1, (0.0, -2.0) + lo, (1.5, 2.0) + hi)

    def fn(x):
        s = x[0]
        w = 1.0 / (s * s)
        A2 = (1 + s * s / 4) ** 2
        B2 = (1 - s * s / 4) ** 2
        return _diag([w, -w * A2] + [w * B2 * f for f in sphere_factors(x[2:])], x[0])

    return MetricField(n + 1, LORENTZIAN, fn, chart, f"ads-fg-{n}")
