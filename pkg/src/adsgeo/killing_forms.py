"""Killing-field diagnostics and twist calculus.

For a candidate Killing field X on a Lorentzian metric g we work with the
dual one-form ``omega = g(X, .)`` and ``V = -g(X, X)``.  The twist is the
three-form ``theta = omega ^ d omega``; X is hypersurface orthogonal iff it
vanishes.  All quantities are assembled from jets so derivatives are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .conventions import V_FLOOR, cosmological_constant
from .jets import Jet, contract
from .tensor_core import (
    LocalGeometry,
    MetricField,
    VectorField,
    d_jet,
    interior_jet,
    wedge_jet,
)


class LapseVanishesError(ZeroDivisionError):
    """|V| fell below the floor; the point is on (or too near) a horizon/ergosurface."""


class NotEinsteinError(ValueError):
    pass


@dataclass(frozen=True)
class StationaryData:
    g: MetricField
    X: VectorField
    name: str = ""


@dataclass
class FluxReport:
    epsilon: float
    flux: float
    quadrature_nodes: int
    refined_flux: float | None = None
    converged: bool = True
    decay_fit: float | None = None

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "flux": self.flux,
            "quadrature_nodes": self.quadrature_nodes,
            "refined_flux": self.refined_flux,
            "converged": self.converged,
            "decay_fit": self.decay_fit,
        }


class _Local:
    """Jets of omega, V and the twist at a point or batch of points."""

    def __init__(self, data: StationaryData, p, order: int):
        self.geo = LocalGeometry(data.g, p, order=order)
        self.X = data.X.from_coords(self.geo.coords)
        self.omega = self.geo.lower(self.X)
        self.V = -contract("...a,...a->...", self.omega, self.X)

    def guard(self) -> None:
        small = np.abs(self.V.val) < V_FLOOR
        if np.any(small):
            where = np.asarray([c.val for c in self.geo.coords])[..., small] if np.ndim(small) else [c.val for c in self.geo.coords]
            raise LapseVanishesError(f"|V| < {V_FLOOR:g} at coordinates {np.asarray(where).T.tolist()}")

    @property
    def theta(self) -> Jet:
        return wedge_jet(self.omega, d_jet(self.omega))


def omega(data: StationaryData, p) -> np.ndarray:
    return _Local(data, p, 0).omega.val


def lapse(data: StationaryData, p) -> np.ndarray:
    """V = -g(X, X)."""
    return _Local(data, p, 0).V.val


def killing_residual(data: StationaryData, p) -> np.ndarray:
    """(L_X g)_ab = nabla_a omega_b + nabla_b omega_a."""
    loc = _Local(data, p, 1)
    dw = loc.geo.covariant_derivative_covector(loc.omega)
    return (dw + dw.T).val


def twist(data: StationaryData, p) -> np.ndarray:
    return _Local(data, p, 1).theta.val


def twist_omega_wedge(data: StationaryData, p) -> np.ndarray:
    """theta ^ omega, which vanishes identically."""
    loc = _Local(data, p, 1)
    return wedge_jet(loc.theta, loc.omega).val


def lichnerowicz_residual(data: StationaryData, p) -> np.ndarray:
    """i_X theta / V^2 + d(omega / V); zero for Killing X wherever V != 0."""
    loc = _Local(data, p, 1)
    loc.guard()
    inv_v = loc.V.reciprocal()
    lhs = interior_jet(loc.X, loc.theta) * (inv_v * inv_v)
    return (lhs + d_jet(loc.omega * inv_v)).val


def dual_twist_closure(data: StationaryData, p, check_einstein: bool = True, tol: float = 1e-6) -> np.ndarray:
    """Components of d(*theta)."""
    loc = _Local(data, p, 2)
    if check_einstein:
        n = data.g.dim - 1
        res = np.abs(loc.geo.einstein(cosmological_constant(n)).val).max()
        if res > tol:
            raise NotEinsteinError(f"einstein residual {res:.3e} exceeds {tol:g}")
    return d_jet(loc.geo.hodge(loc.theta)).val


def twist_flux_identity(data: StationaryData, p) -> np.ndarray:
    """d((omega/V) ^ *theta) + i_X(theta ^ *theta) / V^2."""
    loc = _Local(data, p, 2)
    loc.guard()
    inv_v = loc.V.reciprocal()
    star = loc.geo.hodge(loc.theta)
    lhs = d_jet(wedge_jet(loc.omega * inv_v, star))
    rhs = interior_jet(loc.X, wedge_jet(loc.theta, star)) * (inv_v * inv_v)
    return (lhs + rhs).val


def _sphere_nodes(m: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes/weights on the angle box of S^m."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    axes, weights = [], []
    for i in range(m):
        hi = 2 * math.pi if i == m - 1 else math.pi
        axes.append(0.5 * hi * (x + 1))
        weights.append(0.5 * hi * w)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, m)
    wgrid = np.ones(1)
    for wi in weights:
        wgrid = np.multiply.outer(wgrid, wi).ravel()
    return grid, wgrid


def _flux_once(data: StationaryData, eps: float, t0: float, nodes: int, chunk: int | None = None) -> float:
    D = data.g.dim
    m = D - 2
    if chunk is None:
        # the volume-form jet holds D**(D+1) numbers per point
        chunk = int(min(2048, max(16, 2**23 // D ** (D + 1))))
    grid, weights = _sphere_nodes(m, nodes)
    total = 0.0
    idx = (Ellipsis,) + tuple(range(2, D))
    for start in range(0, len(grid), chunk):
        ang = grid[start:start + chunk]
        pts = np.column_stack([np.full(len(ang), eps), np.full(len(ang), t0), ang])
        loc = _Local(data, pts, 1)
        loc.guard()
        beta = wedge_jet(loc.omega * loc.V.reciprocal(), loc.geo.hodge(loc.theta))
        total += float(np.dot(weights[start:start + chunk], beta.val[idx]))
    return total


def flux_integral(data: StationaryData, eps: float, t0: float = 0.0, nodes: int = 16, rel_tol: float = 1e-6) -> FluxReport:
    """Integral of (omega/V) ^ *theta over {s = eps, t = t0} in FG-gauge coordinates.

    The chart must be ordered (s, t, angles).  The quadrature is repeated
    with twice the nodes; disagreement beyond ``rel_tol`` is flagged, not raised.
    """
    coarse = _flux_once(data, eps, t0, nodes)
    fine = _flux_once(data, eps, t0, 2 * nodes)
    scale = max(abs(fine), 1e-300)
    converged = abs(fine - coarse) <= rel_tol * scale or abs(fine - coarse) < 1e-14
    return FluxReport(eps, fine, 2 * nodes, refined_flux=coarse, converged=converged)


def power_law_slope(xs, ys) -> float | None:
    """Least-squares slope of log|y| against log x; None if any |y| is zero."""
    xs, ys = np.asarray(xs, float), np.abs(np.asarray(ys, float))
    if len(xs) < 2 or np.any(ys <= 0):
        return None
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def flux_sweep(data: StationaryData, eps_list, t0: float = 0.0, nodes: int = 16) -> list[FluxReport]:
    reports = [flux_integral(data, e, t0, nodes) for e in eps_list]
    if len(reports) >= 3:
        slope = power_law_slope([r.epsilon for r in reports], [r.flux for r in reports])
        for r in reports:
            r.decay_fit = slope
    return reports


# -- catalog -----------------------------------------------------------------

def coordinate_field(dim: int, weights: dict, name: str = "") -> VectorField:
    """Constant-coefficient combination of coordinate vector fields."""
    def fn(x):
        zero = x[0] * 0.0
        return [zero + weights.get(i, 0.0) for i in range(dim)]

    return VectorField(fn, name)


def killing_catalog(n: int, lam: float = 0.3, fg: bool = False) -> dict[str, StationaryData]:
    """d/dt, d/dphi and d/dt + lam d/dphi on AdS_{n+1}; |lam| < 1 keeps the helix timelike."""
    if not abs(lam) < 1:
        raise ValueError("helical parameter must satisfy |lam| < 1")
    g = catalog.ads_fg(n) if fg else catalog.ads(n)
    D = n + 1
    t_idx = 1 if fg else 0
    phi = D - 1
    return {
        "dt": StationaryData(g, coordinate_field(D, {t_idx: 1.0}, "dt"), "dt"),
        "dphi": StationaryData(g, coordinate_field(D, {phi: 1.0}, "dphi"), "dphi"),
        "helical": StationaryData(g, coordinate_field(D, {t_idx: 1.0, phi: lam}, "helical"), f"dt+{lam}dphi"),
    }


def radial_dilation(n: int) -> StationaryData:
    """Non-Killing control r d/dr on global AdS."""
    g = catalog.ads(n)
    D = n + 1
    X = VectorField(lambda x: [x[1] * 0.0] + [x[1]] + [x[1] * 0.0] * (D - 2), "r*dr")
    return StationaryData(g, X, "r*dr")


def deformed_ads(n: int, eps: float = 0.3) -> MetricField:
    """AdS with g_tt scaled by (1 + eps r): t- and phi-independent but not Einstein."""
    lo, hi = catalog.angle_box(n - 1)
    chart = catalog.Chart("global-AdS", n + 1, (-2.0, 0.2) + lo, (2.0, 5.0) + hi)

    def fn(x):
        r = x[1]
        ent = [-(1 + r * r) * (1 + eps * r), 1.0 / (1 + r * r)] + [r * r * s for s in catalog.sphere_factors(x[2:])]
        return catalog._diag(ent, r)

    return MetricField(n + 1, "lorentzian", fn, chart, f"deformed-ads-{n}")
