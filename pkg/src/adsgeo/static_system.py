"""Radial static triples (Sigma, h, sqrt V) with h = dr^2 / f + r^2 dsigma_0.

The reduced system carries (V, V', f) and comes from the Laplacian equation
for sqrt V together with the angular component of the Ricci equation; the
radial Ricci component is a constraint that the integrator does not use, so
``static_residual`` on a shooting output is a genuine check.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import catalog
from . import jets as J
from .conventions import EVENT_XTOL, ODE_ATOL, ODE_RTOL
from .jets import Jet
from .series import TruncatedSeries
from .tensor_core import RIEMANNIAN, Chart, LocalGeometry, MetricField

CLOSED_FORM = "closed-form"
SHOOTING = "shooting"

GLOBAL = "global"
HORIZON = "horizon"
BLOWUP = "blowup"

# the reduced ODE is 0/0 on a horizon, so integration stops at V = _HORIZON_STOP
# and the root is located on a local quadratic model of V
_HORIZON_STOP = 1e-6
_BLOWUP_LEVEL = 1e12
_CENTER_RADIUS = 1e-2


class NonPositiveLapseError(ValueError):
    pass


@dataclass(frozen=True)
class StaticTriple:
    """``V`` and ``f`` are callables of r that accept floats, arrays or jets."""

    n: int
    V: Callable
    f: Callable
    domain: tuple
    provenance: str = CLOSED_FORM
    name: str = ""
    flags: tuple = ()

    def slice_metric(self) -> MetricField:
        n = self.n
        lo, hi = catalog.angle_box(n - 1)
        chart = Chart("radial-slice", n, (self.domain[0],) + lo, (self.domain[1],) + hi)
        f = self.f

        def fn(x):
            r = x[0]
            return catalog._diag([1.0 / f(r)] + [r * r * s for s in catalog.sphere_factors(x[1:])], r)

        return MetricField(n, RIEMANNIAN, fn, chart, f"{self.name}-slice")

    def spacetime_metric(self) -> MetricField:
        return catalog.static_metric(self.n, self.V, self.f, self.domain[0], self.domain[1], self.name)

    def sample_points(self, radii, angles=None) -> np.ndarray:
        """Slice-chart points at the given radii (angles default to a generic direction)."""
        radii = np.atleast_1d(np.asarray(radii, float))
        if angles is None:
            angles = [1.1] * (self.n - 2) + [0.7]
        return np.column_stack([radii] + [np.full_like(radii, a) for a in angles])

    def random_radii(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo, hi = self.domain
        return lo + (hi - lo) * rng.random(count)


def ads_triple(n: int) -> StaticTriple:
    prof = lambda r: 1 + r * r
    return StaticTriple(n, prof, prof, (0.1, 10.0), CLOSED_FORM, f"ads-{n}")


def schwarzschild_ads(n: int, M: float, r_max: float = 10.0) -> StaticTriple:
    """V = f = 1 + r^2 - M / r^(n-2); negative M is allowed and flagged."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if M == 0:
        return ads_triple(n)
    prof = lambda r: 1 + r * r - M / r ** (n - 2)
    rh = catalog.schwarzschild_ads_horizon(n, M)
    lo = rh + 1e-3 if M > 0 else 1e-2
    flags = ("negative-mass",) if M < 0 else ()
    return StaticTriple(n, prof, prof, (lo, r_max), CLOSED_FORM, f"schwarzschild-ads-{n}-M{M:g}", flags)


def horizon_radius(t: StaticTriple) -> float | None:
    """Largest zero of V below the domain, for closed-form triples."""
    if t.V(t.domain[0]) <= 0:
        raise NonPositiveLapseError("V <= 0 at the inner edge of the domain")
    lo = 1e-9
    if t.V(lo) > 0:
        return None
    return brentq(t.V, lo, t.domain[0], xtol=EVENT_XTOL)


# -- residuals -------------------------------------------------------------

class _SliceLocal:
    def __init__(self, t: StaticTriple, p, order: int = 2):
        self.geo = LocalGeometry(t.slice_metric(), p, order=order)
        r = self.geo.coords[0]
        V = t.V(r)
        if np.any(np.asarray(V.val).real <= 0):
            raise NonPositiveLapseError(f"V <= 0 at r = {np.asarray(r.val).tolist()}")
        self.Vj = V
        self.N = J.sqrt(V)
        self.n = t.n

    @property
    def hess(self) -> Jet:
        return self.geo.hessian(self.N)

    def W(self) -> Jet:
        return self.Vj - self.geo.grad_norm_sq(self.N) - 1.0


def _points(t: StaticTriple, p) -> np.ndarray:
    """Scalars and 1-D arrays are radii; slice-chart points come as a (k, n) array."""
    p = np.asarray(p, float)
    if p.ndim <= 1:
        return t.sample_points(np.atleast_1d(p))
    if p.shape[-1] != t.n:
        raise ValueError(f"slice points need {t.n} coordinates, got shape {p.shape}")
    return p


def _static_jets(t: StaticTriple, p) -> tuple[_SliceLocal, Jet, Jet]:
    loc = _SliceLocal(t, _points(t, p))
    geo, n = loc.geo, t.n
    scalar = geo.laplacian(loc.N) - loc.N * n
    tensor = geo.ricci + geo.g * n - loc.hess * loc.N.reciprocal()
    return loc, scalar, tensor


def static_residual(t: StaticTriple, p) -> tuple[np.ndarray, np.ndarray]:
    """(Delta sqrt V - n sqrt V,  Ric[h] + n h - hess(sqrt V) / sqrt V).

    ``p`` may be plain radii or a (k, n) array of slice-chart points.
    """
    _, scalar, tensor = _static_jets(t, p)
    return scalar.val, tensor.val


def static_residual_norm(t: StaticTriple, p) -> np.ndarray:
    """max(|scalar residual|, |tensor residual|_h); the h-norm keeps 1/f factors out."""
    loc, scalar, tensor = _static_jets(t, p)
    tn = np.sqrt(np.abs(loc.geo.inner(tensor.truncate(0), tensor.truncate(0)).val))
    return np.maximum(np.abs(scalar.val), tn)


def mass_aspect_W(t: StaticTriple, p) -> np.ndarray:
    """W = V - |grad sqrt V|_h^2 - 1."""
    return _SliceLocal(t, _points(t, p), order=1).W().val


def mass_aspect_closed_form(n: int, M: float, r):
    """W for the closed-form Schwarzschild-AdS profile (f = V)."""
    r = np.asarray(r, float)
    return -(n - 1) * M / r ** (n - 2) - (n - 2) ** 2 * M * M / (4 * r ** (2 * n - 2))


# -- reduced ODE -----------------------------------------------------------

def reduced_rhs(n: int, r, V, dV, f):
    """(V', V'', f') for the radial system; works on floats, arrays or jets."""
    df = (2.0 / r) * ((n - 2) * (1.0 - f) + n * r * r - r * f * dV / (2.0 * V))
    ddV = (2 * n * V - df * dV * 0.5 - (n - 1) * f * dV / r) / f + dV * dV / (2.0 * V)
    return dV, ddV, df


def reduced_ode(n: int) -> Callable:
    """Right-hand side ``F(r, y)`` for y = (V, V', f), in scipy's calling convention."""
    if n < 3:
        raise ValueError("n must be >= 3")

    def F(r, y):
        return np.array(reduced_rhs(n, r, y[0], y[1], y[2]))

    return F


def constraint_residual(n: int, r, V, dV, f):
    """The radial Ricci component, which the reduced system leaves unused."""
    _, ddV, df = reduced_rhs(n, r, V, dV, f)
    N = np.sqrt(V)
    dN = dV / (2 * N)
    ddN = ddV / (2 * N) - dV * dV / (4 * V * N)
    return -(n - 1) * df / (2 * r) + n - (f * ddN + df * dN / 2) / N


def _polynomial_residuals(n: int, V: TruncatedSeries, f: TruncatedSeries):
    """The reduced system multiplied through by its denominators."""
    r = TruncatedSeries.variable(V.trunc_order)
    dV, ddV, df = V.differentiate(), V.differentiate().differentiate(), f.differentiate()
    N = ddV.trunc_order
    V, f, r, dV, df = (x.truncate(N) for x in (V, f, r, dV, df))
    e1 = r * V * df - 2.0 * V * ((n - 2) * (1.0 - f) + n * r * r) + r * f * dV
    e2 = 2.0 * r * V * f * ddV - 4.0 * n * r * V * V + r * V * df * dV + 2.0 * (n - 1) * V * f * dV - r * f * dV * dV
    return e1, e2


def center_series(n: int, V0: float, degree: int = 4) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Taylor start of a regular center, V(0) = V0, V'(0) = 0, f(0) = 1.

    Coefficients are fixed order by order by probing the polynomial form of
    the reduced system: order k first enters e1 at r^k and e2 at r^(k-1).
    """
    K = degree + 2
    v = np.zeros(K + 1)
    w = np.zeros(K + 1)
    v[0], w[0] = V0, 1.0

    def probe():
        e1, e2 = _polynomial_residuals(n, TruncatedSeries(v), TruncatedSeries(w))
        return np.array([e1[k], e2[k - 1]])

    for k in range(1, degree + 1):
        base = probe()
        cols = []
        for arr in (v, w):
            arr[k] = 1.0
            cols.append(probe() - base)
            arr[k] = 0.0
        sol = np.linalg.solve(np.column_stack(cols), -base)
        v[k], w[k] = sol
    return TruncatedSeries(v[: degree + 1]), TruncatedSeries(w[: degree + 1])


# -- shooting ----------------------------------------------------------------

def _taylor_state(n: int, r0, y0: np.ndarray) -> list[Jet]:
    """Third-order Taylor jets of (V, V', f) about r0 by Picard iteration in one variable."""
    r0 = np.asarray(r0, float)
    h = Jet.variable(np.zeros_like(r0), 0, 1, 3)
    r = h + r0
    Y = [Jet.constant(y0[i], 1, 3) for i in range(3)]
    for _ in range(4):
        F = reduced_rhs(n, r, *Y)
        Y = [Jet(y0[i], [F[i].val[..., None], F[i].ders[0][..., None], F[i].ders[1][..., None]], 0, 1)
             for i in range(3)]
    return Y


def _derivs(j: Jet) -> list[np.ndarray]:
    return [j.val, j.ders[0][..., 0], j.ders[1][..., 0, 0], j.ders[2][..., 0, 0, 0]]


@dataclass
class _SampledProfile:
    """Profile evaluated from dense output; jets come from Taylor mode on the ODE."""

    n: int
    dense: Callable
    index: int
    center: tuple | None = None  # (series V, series f, r_start)

    def state(self, r):
        r = np.asarray(r, float)
        y = np.asarray(self.dense(np.atleast_1d(r).ravel())).reshape((3,) + r.shape)
        if self.center is not None:
            Vs, fs, r_start = self.center
            inside = r < r_start
            if np.any(inside):
                dVs = Vs.differentiate()
                y = np.where(inside, np.stack([Vs(r), dVs(r), fs(r)]), y)
        return y

    def __call__(self, r):
        if isinstance(r, Jet):
            y0 = self.state(r.val)
            return r.apply(_derivs(_taylor_state(self.n, r.val, y0)[self.index]))
        out = self.state(r)[self.index]
        return out if np.ndim(out) else float(out)


@dataclass
class ShootingResult:
    triple: StaticTriple
    outcome: str
    event_radius: float | None = None
    V_at_event: float | None = None
    max_rel_deviation: float | None = None
    scale: float | None = None
    f_minus_V: float | None = None
    f_over_V_spread: float | None = None
    samples: np.ndarray | None = field(default=None, repr=False)  # integrator steps (r, V, V', f)
    tol: float = ODE_RTOL
    message: str = ""

    def residual_ratio(self) -> float:
        """max over stored samples of static_residual / residual_budget."""
        r, V = self.samples[:, 0], self.samples[:, 1]
        keep = r > 0
        res = static_residual_norm(self.triple, r[keep])
        return float(np.max(res / residual_budget(self.tol, r[keep], V[keep], self.triple.n)))

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "event_radius": self.event_radius,
            "V_at_event": self.V_at_event,
            "max_rel_deviation": self.max_rel_deviation,
            "scale": self.scale,
            "f_minus_V": self.f_minus_V,
            "f_over_V_spread": self.f_over_V_spread,
            "domain": list(self.triple.domain),
            "message": self.message,
        }

    def to_csv(self) -> str:
        return triple_csv(self.triple, self.samples[:, 0])


def residual_budget(tol: float, r, V, n: int = 3):
    """Allowed static residual for a state accurate to ``tol``.

    The radial constraint divides state errors by r^2 near a regular
    center and by V near a horizon, and its coefficients grow like n - 1,
    so the budget carries the same factors.
    """
    r, V = np.asarray(r, float), np.asarray(V, float)
    return 10 * tol * (n - 1) * np.maximum(1.0, np.maximum(1.0 / r**2, 1.0 / np.abs(V)))


def _events():
    def hit_horizon(r, y):
        return y[0] - _HORIZON_STOP

    def blow(r, y):
        return _BLOWUP_LEVEL - max(abs(y[0]), abs(y[2]))

    hit_horizon.terminal = True
    blow.terminal = True
    return [hit_horizon, blow]


def _locate_horizon(sol, r_e: float, y_e: np.ndarray) -> tuple[float, float]:
    """Root of the local quadratic model of V beyond the stopping point."""
    V, dV = y_e[0], y_e[1]
    step = -V / dV
    # curvature of V from the dense output over a short lever arm behind r_e
    back = r_e - 50 * step
    ddV = (dV - sol.sol(back)[1]) / (r_e - back)
    model = lambda r: V + dV * (r - r_e) + 0.5 * ddV * (r - r_e) ** 2
    a, b = sorted((r_e, r_e + 3 * step))
    root = brentq(model, a, b, xtol=EVENT_XTOL, rtol=4 * np.finfo(float).eps)
    # the model vanishes at the root; report the size of the neglected cubic term instead
    residual = abs(ddV) * (root - r_e) ** 2 / 2 * abs(root - r_e) / max(abs(r_e), 1.0)
    return float(root), float(residual)


def shoot(n: int, center_data, r_max: float, tol: float = ODE_RTOL) -> ShootingResult:
    """Integrate the reduced system and classify the outcome.

    ``center_data`` is either ``V0`` (a regular center with V(0) = V0,
    V'(0) = 0, f(0) = 1, started from a degree-4 Taylor expansion) or a
    tuple ``(r0, V, V', f)`` for an off-center start; ``r_max < r0``
    integrates inward.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    F = reduced_ode(n)
    center = None
    if np.ndim(center_data) == 0:
        V0 = float(center_data)
        if V0 <= 0:
            raise ValueError("V0 must be positive")
        Vs, fs = center_series(n, V0)
        r0 = _CENTER_RADIUS
        y0 = np.array([Vs(r0), Vs.differentiate()(r0), fs(r0)])
        center = (Vs, fs, r0)
    else:
        r0, *state = (float(c) for c in center_data)
        y0 = np.array(state)
        if y0[0] <= 0 or y0[2] <= 0:
            raise ValueError("off-center start needs V > 0 and f > 0")
    sol = solve_ivp(F, (r0, r_max), y0, method="RK45", rtol=tol, atol=max(tol, ODE_ATOL) * 1.0,
                    events=_events(), dense_output=True)
    r_end = float(sol.t[-1])
    y_end = sol.y[:, -1]
    event_radius = V_event = None
    message = sol.message
    if sol.status == 1 and len(sol.t_events[0]):
        outcome = HORIZON
        event_radius, V_event = _locate_horizon(sol, float(sol.t_events[0][0]), sol.y_events[0][0])
    elif sol.status == 0 and y_end[0] > 0 and y_end[2] > 0:
        outcome = GLOBAL
    else:
        outcome = BLOWUP
    lo, hi = sorted((0.0 if center else r0, r_end))
    prof_center = center
    triple = StaticTriple(
        n,
        _SampledProfile(n, sol.sol, 0, prof_center),
        _SampledProfile(n, sol.sol, 2, prof_center),
        (lo, hi),
        SHOOTING,
        f"shooting-{n}",
    )
    r_grid = np.linspace(lo, hi, 401)
    st = triple.V.state(r_grid)
    samples = np.column_stack([sol.t, sol.y.T])
    ratio = st[2] / st[0]
    res = ShootingResult(
        triple,
        outcome,
        event_radius,
        V_event,
        f_minus_V=float(np.max(np.abs(st[2] - st[0]))),
        f_over_V_spread=float(np.max(np.abs(ratio / ratio[0] - 1))),
        samples=samples,
        tol=tol,
        message=message,
    )
    if center is not None:
        c = float(center_data)
        ref = c * (1 + r_grid**2)
        res.scale = c
        res.max_rel_deviation = float(np.max(np.abs(st[0] - ref) / ref))
    return res


def triple_csv(t: StaticTriple, radii) -> str:
    """Rows (r, V, f, W)."""
    radii = np.asarray(radii, float)
    radii = radii[radii > 0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "V", "f", "W"])
    W = mass_aspect_W(t, radii)
    for r, Wi in zip(radii, W):
        w.writerow([repr(float(r)), repr(float(np.real(t.V(r)))), repr(float(np.real(t.f(r)))), repr(float(Wi))])
    return buf.getvalue()


def perturbed_triple(t: StaticTriple, amplitude: float = 0.01) -> StaticTriple:
    """Control: V -> V (1 + amplitude r e^-r), which no longer solves the system."""
    V0 = t.V
    V = lambda r: V0(r) * (1 + amplitude * r * J.exp(-r))
    return StaticTriple(t.n, V, t.f, t.domain, CLOSED_FORM, f"{t.name}-perturbed")


__all__ = [
    "StaticTriple", "ShootingResult", "ads_triple", "schwarzschild_ads", "static_residual",
    "static_residual_norm", "reduced_ode", "reduced_rhs", "center_series", "shoot",
    "mass_aspect_W", "mass_aspect_closed_form", "horizon_radius", "triple_csv", "perturbed_triple",
    "constraint_residual", "residual_budget", "GLOBAL", "HORIZON", "BLOWUP",
]
