"""Reconstruction of a metric from a solution of hess(phi) = phi g.

Along a unit-speed geodesic from the minimum of phi, phi'' = phi with
phi(0) = 1, phi'(0) = 0, and the Jacobi fields normal to the geodesic solve
f'' + K f = 0 with f(0) = 0, f'(0) = 1, where K is the radial sectional
curvature (K = -1 in the rigid case).  Integrating both and rebuilding
``ds^2 + f(s)^2 dsigma_0`` gives a metric whose curvature can be recomputed
with the tensor engine.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import catalog
from . import jets as J
from .conventions import ODE_RTOL
from .jets import Jet
from .tensor_core import RIEMANNIAN, Chart, LocalGeometry, MetricField


@dataclass
class _Profile:
    """Solution of y'' = k y; jets use y'' = k y and y''' = k y' exactly."""

    dense: object
    index: int
    k: float

    def state(self, s):
        s = np.asarray(s, float)
        y = np.asarray(self.dense(np.atleast_1d(s).ravel())).reshape((4,) + s.shape)
        return y[self.index], y[self.index + 1]

    def __call__(self, s):
        if isinstance(s, Jet):
            y, dy = self.state(s.val)
            return s.apply([y, dy, self.k * y, self.k * dy])
        y, _ = self.state(s)
        return y if np.ndim(y) else float(y)


@dataclass
class ObataSolution:
    n: int
    s_grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    jacobi: np.ndarray
    djacobi: np.ndarray
    sectional: float
    reconstructed: MetricField = field(repr=False)
    phi_profile: _Profile = field(repr=False)
    jacobi_profile: _Profile = field(repr=False)

    def phi_energy(self) -> np.ndarray:
        """phi^2 - phi'^2, constant (= 1) along the solution."""
        return self.phi**2 - self.dphi**2

    def jacobi_energy(self) -> np.ndarray:
        """f'^2 + K f^2, constant (= 1) along the solution."""
        return self.djacobi**2 + self.sectional * self.jacobi**2

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "phi", "f"])
        for row in zip(self.s_grid, self.phi, self.jacobi):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _integrate(s_max: float, tol: float, sectional: float):
    if s_max <= 0:
        raise ValueError("s_max must be positive")
    # (phi, phi', f, f')
    F = lambda s, y: [y[1], y[0], y[3], -sectional * y[2]]
    sol = solve_ivp(F, (0.0, s_max), [1.0, 0.0, 0.0, 1.0], method="RK45", rtol=tol, atol=tol, dense_output=True)
    if sol.status != 0:
        raise RuntimeError(sol.message)
    return sol


def integrate_phi(s_max: float, tol: float = ODE_RTOL, samples: int = 101) -> tuple[np.ndarray, np.ndarray]:
    """Samples (s, phi) of phi'' = phi, phi(0) = 1, phi'(0) = 0."""
    sol = _integrate(s_max, tol, -1.0)
    s = np.linspace(0.0, s_max, samples)
    return s, sol.sol(s)[0]


def integrate_jacobi(s_max: float, tol: float = ODE_RTOL, sectional: float = -1.0, samples: int = 101):
    """Samples (s, f) of f'' + K f = 0, f(0) = 0, f'(0) = 1, with K = ``sectional``."""
    sol = _integrate(s_max, tol, sectional)
    s = np.linspace(0.0, s_max, samples)
    return s, sol.sol(s)[2]


def solve(n: int, s_max: float = 3.0, tol: float = ODE_RTOL, sectional: float = -1.0, samples: int = 101) -> ObataSolution:
    """Integrate both equations and rebuild ds^2 + f(s)^2 dsigma_0 from the numerical f."""
    sol = _integrate(s_max, tol, sectional)
    s = np.linspace(0.0, s_max, samples)
    y = sol.sol(s)
    phi_p = _Profile(sol.sol, 0, 1.0)
    jac_p = _Profile(sol.sol, 2, -sectional)
    lo, hi = catalog.angle_box(n - 1)
    chart = Chart("geodesic-polar", n, (0.1,) + lo, (s_max,) + hi)

    def fn(x):
        w = jac_p(x[0]) ** 2
        return catalog._diag([1.0] + [w * q for q in catalog.sphere_factors(x[1:])], x[0])

    g = MetricField(n, RIEMANNIAN, fn, chart, f"obata-reconstructed-{n}")
    return ObataSolution(n, s, y[0], y[1], y[2], y[3], sectional, g, phi_p, jac_p)


def verify_rigidity(sol: ObataSolution, p) -> np.ndarray:
    """|hess(cosh s) - cosh s g| on the reconstructed metric, one value per point."""
    p = np.atleast_2d(np.asarray(p, float))
    for q in p:
        if not sol.reconstructed.chart.contains(q):
            raise ValueError(f"point {q.tolist()} outside the chart (pole-adjacent or s out of range)")
    geo = LocalGeometry(sol.reconstructed, p, order=2)
    phi = J.cosh(geo.coords[0])
    D = geo.hessian(phi) - geo.g * phi
    return np.sqrt(np.abs(geo.inner(D.truncate(0), D.truncate(0)).val))


def ricci_defect(sol: ObataSolution, p) -> np.ndarray:
    """max |Ric + (n-1) g| per point."""
    geo = LocalGeometry(sol.reconstructed, np.atleast_2d(p), order=2)
    return np.abs((geo.ricci + geo.g * (sol.n - 1)).val).max(axis=(-1, -2))


def radial_curvature(g: MetricField, p) -> np.ndarray:
    """R(e_0, e_i, e_0, e_j) in the orthonormal frame e_0 = d_s, e_i = d_i / |d_i| (diagonal metrics)."""
    geo = LocalGeometry(g, np.atleast_2d(p), order=2)
    Rl = geo.riemann_lower.val
    scale = 1.0 / np.sqrt(np.diagonal(geo.g.val, axis1=-2, axis2=-1))
    frame = Rl[:, 0, :, 0, :] * scale[:, 0, None, None] ** 2
    frame = frame * scale[:, :, None] * scale[:, None, :]
    return frame[:, 1:, 1:]


def map_to_ball_profile(sol: ObataSolution) -> dict:
    """Under r = f(s): phi - sqrt(1 + r^2), and the radial metric coefficient (dr/ds)^2 - (1 + r^2)."""
    r = sol.jacobi
    return {
        "phi_defect": np.abs(sol.phi - np.sqrt(1 + r**2)),
        "metric_defect": np.abs(sol.djacobi**2 - (1 + r**2)),
    }


__all__ = [
    "ObataSolution", "integrate_phi", "integrate_jacobi", "solve", "verify_rigidity",
    "ricci_defect", "radial_curvature", "map_to_ball_profile",
]
