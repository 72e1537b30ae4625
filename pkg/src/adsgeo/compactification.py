"""Conformal compactification of a static slice by u = 1/(sqrt V + 1).

``gbar = u^2 h`` is a compact metric with the round sphere as boundary.  The
checks here compare its scalar curvature with the mass aspect W, evaluate the
Bochner-type identity for W, and measure the boundary spheres s = eps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import catalog
from . import jets as J
from .fg_series import radial_fg_gauge
from .jets import contract
from .killing_forms import power_law_slope
from .static_system import SHOOTING, NonPositiveLapseError, StaticTriple, _points, _SliceLocal
from .tensor_core import RIEMANNIAN, Chart, LocalGeometry, MetricField

DEFAULT_EPS = (1e-1, 1e-2, 1e-3)


@dataclass(frozen=True)
class CompactifiedSlice:
    base: StaticTriple

    def u(self, r):
        return 1.0 / (J.sqrt(self.base.V(r)) + 1.0)

    @property
    def gbar(self) -> MetricField:
        t = self.base
        n = t.n
        lo, hi = catalog.angle_box(n - 1)
        chart = Chart("radial-slice", n, (t.domain[0],) + lo, (t.domain[1],) + hi)
        f, u = t.f, self.u

        def fn(x):
            r = x[0]
            w = u(r) ** 2
            return catalog._diag([w / f(r)] + [w * r * r * s for s in catalog.sphere_factors(x[1:])], r)

        return MetricField(n, RIEMANNIAN, fn, chart, f"{t.name}-compactified")

    def scaled(self, c: float) -> MetricField:
        """(c u)^2 h, for the constant-rescaling consistency check."""
        g = self.gbar
        return MetricField(g.dim, g.signature, lambda x: g.fn(x) * (c * c), g.chart, f"{g.name}-x{c:g}")


def bochner_terms(t: StaticTriple, p) -> dict:
    """Individual terms of  Delta W + 2 |hess N - N h|^2 - (grad N / N) . grad W,  N = sqrt V."""
    loc = _SliceLocal(t, _points(t, p), order=3)
    geo, N = loc.geo, loc.N
    W = loc.W()
    D = loc.hess - geo.g * N
    lap = geo.laplacian(W)
    sq = geo.inner(D.truncate(0), D.truncate(0)) * 2.0
    dN, dW = N.grad(), W.grad()
    cross = contract("...ab,...a,...b->...", geo.ginv, dN, dW) * N.reciprocal()
    return {
        "laplacian_W": lap.val,
        "hessian_defect_sq": sq.val,
        "drift": cross.val,
        "W": W.val,
        "residual": (lap + sq - cross.truncate(0)).val,
    }


def bochner_residual(t: StaticTriple, p) -> np.ndarray:
    return bochner_terms(t, p)["residual"]


def conformal_scalar_check(t: StaticTriple, p) -> dict:
    """Three expressions for the scalar curvature of u^2 h.

    ``lhs`` is the curvature engine on u^2 h, ``rhs`` is n(n-1) W and
    ``conformal`` is u^-(n+2)/2 (-(4(n-1)/(n-2)) Delta_h u^((n-2)/2) + R[h] u^((n-2)/2)).
    """
    n = t.n
    if n < 3:
        raise ValueError("n must be >= 3")
    pts = _points(t, p)
    c = CompactifiedSlice(t)
    lhs = LocalGeometry(c.gbar, pts, order=2).scalar.val
    loc = _SliceLocal(t, pts, order=2)
    W = loc.W().val
    u = 1.0 / (loc.N + 1.0)
    k = (n - 2) / 2
    phi = u ** k
    conformal = (loc.geo.laplacian(phi) * (-4 * (n - 1) / (n - 2)) + loc.geo.scalar * phi) * u ** (-(n + 2) / 2)
    return {"lhs": lhs, "rhs": n * (n - 1) * W, "conformal": conformal.val}


def _norm_on(ginv_block: np.ndarray, T: np.ndarray) -> float:
    return float(np.sqrt(abs(np.einsum("ik,jl,ij,kl->", ginv_block, ginv_block, T, T))))


@dataclass
class BoundaryReport:
    eps: list
    radii: list
    induced_defect: list  # |g_induced - dsigma_0| in the induced metric
    second_form_defect: list  # |II - dsigma_0|
    umbilicity_defect: list  # |II - (tr II / (n-1)) g_induced|
    mean_curvature_factor: list  # tr II / (n-1) measured against dsigma_0
    induced_rate: float | None = None
    second_form_rate: float | None = None
    umbilicity_rate: float | None = None
    limits: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _round_metric(angles) -> np.ndarray:
    return np.diag([float(v) for v in catalog.sphere_factors(list(angles))])


def _x_of_s(t: StaticTriple, N: int = 10):
    return radial_fg_gauge(t.V, t.f, t.n, N).radial_map


def radial_map(t: StaticTriple, N: int = 10):
    """r as a function of the FG variable s, from the radial defining-function series."""
    x_of_s = _x_of_s(t, N)
    return lambda s: 1.0 / x_of_s(s)


def boundary_geometry(c: CompactifiedSlice, eps_list=DEFAULT_EPS, angles=None) -> BoundaryReport:
    """Induced metric and second fundamental form of {s = eps} in (Sigma, u^2 h).

    The normal points toward the boundary (increasing r); norms are taken in
    the induced metric from ``gbar``.  Limits as eps -> 0 come from a linear
    extrapolation through the two smallest eps, and decay rates from a
    power-law fit over the whole ladder.
    """
    t = c.base
    n = t.n
    r_of_s = radial_map(t)
    if angles is None:
        angles = [1.1] * (n - 2) + [0.7]
    eps = sorted((float(e) for e in eps_list), reverse=True)
    radii = [float(r_of_s(e)) for e in eps]
    for e, r in zip(eps, radii):
        if not (e > 0 and np.isfinite(r) and r > t.domain[0]):
            raise ValueError(f"eps = {e} outside the gauge domain")
        if t.provenance == SHOOTING and r > t.domain[1]:
            raise ValueError(f"eps = {e} maps to r = {r:.4g}, beyond the integrated range")
    pts = np.array([[r] + list(angles) for r in radii])
    geo = LocalGeometry(c.gbar, pts, order=1)
    g = geo.g.val
    G = geo.gamma.val
    sig = _round_metric(angles)
    ind_d, II_d, umb, fac = [], [], [], []
    for k in range(len(radii)):
        gind = g[k, 1:, 1:]
        II = -G[k, 0, 1:, 1:] * np.sqrt(g[k, 0, 0])
        ginv = np.linalg.inv(gind)
        trII = np.einsum("ij,ij->", ginv, II)
        ind_d.append(_norm_on(ginv, gind - sig))
        II_d.append(_norm_on(ginv, II - sig))
        umb.append(_norm_on(ginv, II - trII / (n - 1) * gind))
        fac.append(float(np.einsum("ij,ij->", np.linalg.inv(sig), II) / (n - 1)))
    rep = BoundaryReport(eps, radii, ind_d, II_d, umb, fac)
    if len(eps) >= 3:
        rep.induced_rate = power_law_slope(eps, ind_d)
        rep.second_form_rate = power_law_slope(eps, II_d)
        rep.umbilicity_rate = power_law_slope(eps, umb)
    if len(eps) >= 2:
        e1, e2 = eps[-2], eps[-1]
        lin = lambda a, b: b - (a - b) * e2 / (e1 - e2)
        rep.limits = {
            "induced_defect": lin(ind_d[-2], ind_d[-1]),
            "second_form_defect": lin(II_d[-2], II_d[-1]),
            "mean_curvature_factor": lin(fac[-2], fac[-1]),
        }
    return rep


def gbar_boundedness(c: CompactifiedSlice, eps_list=DEFAULT_EPS) -> float:
    """Largest |gbar| component in (s, angles) coordinates over the eps ladder."""
    x = _x_of_s(c.base)
    dx = x.differentiate()
    n = c.base.n
    angles = [1.1] * (n - 2) + [0.7]
    eps = np.asarray(eps_list, float)
    r = 1.0 / x(eps)
    pts = np.column_stack([r] + [np.full_like(r, a) for a in angles])
    g = LocalGeometry(c.gbar, pts, order=0, validate=False).g.val.copy()
    dr_ds = -dx(eps) * r * r
    g[:, 0, 0] *= dr_ds**2
    return float(np.abs(g).max())


@dataclass
class ScanReport:
    min_value: float
    argmin: float
    values: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"min_value": self.min_value, "argmin": self.argmin}


def nonneg_scalar_scan(t: StaticTriple, r_grid) -> ScanReport:
    """min over the grid of n(n-1) W, i.e. of the scalar curvature of u^2 h."""
    from .static_system import mass_aspect_W

    r = np.asarray(r_grid, float)
    vals = t.n * (t.n - 1) * mass_aspect_W(t, r)
    i = int(np.argmin(vals))
    return ScanReport(float(vals[i]), float(r[i]), vals, r)


def rigidity_check(t: StaticTriple, p, scale: float = 1.0) -> np.ndarray:
    """|hess phi - phi h|_h with phi = sqrt V / scale."""
    loc = _SliceLocal(t, _points(t, p), order=2)
    phi = loc.N * (1.0 / scale)
    D = loc.geo.hessian(phi) - loc.geo.g * phi
    return np.sqrt(np.abs(loc.geo.inner(D.truncate(0), D.truncate(0)).val))


def riemann_norm(g: MetricField, p) -> np.ndarray:
    """max |R_abcd| at each point (the AdS flatness check uses this on u^2 h)."""
    return np.abs(LocalGeometry(g, p, order=2).riemann_lower.val).max(axis=(-4, -3, -2, -1))


__all__ = [
    "CompactifiedSlice", "BoundaryReport", "ScanReport", "bochner_residual", "bochner_terms",
    "conformal_scalar_check", "boundary_geometry", "gbar_boundedness", "nonneg_scalar_scan",
    "rigidity_check", "riemann_norm", "radial_map", "NonPositiveLapseError",
]
