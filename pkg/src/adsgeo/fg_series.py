"""FG expansion for the warped ansatz and the radial special defining function.

The ansatz is ``g = s^-2 (ds^2 - A(s)^2 dt^2 + B(s)^2 dsigma_0)`` with
``A(0) = B(0) = 1``.  :func:`fg_recursion` does not transcribe the
expansion equations: at each order it evaluates ``einstein_residual`` from
:mod:`adsgeo.tensor_core` on a circle of complex ``s``, reads off Laurent
coefficients with an FFT, and solves the (affine) equations for the two new
coefficients of A^2 and B^2.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .conventions import cosmological_constant
from .series import TruncatedSeries, cauchy_coefficients
from .tensor_core import LORENTZIAN, Chart, LocalGeometry, MetricField

# order-k coefficients first show up at s^(k + _LAURENT_OFFSET) in einstein_residual
_LAURENT_OFFSET = -2
_PROBE_RADIUS = 0.3
_PROBE_POINTS = 64
# small probes keep zeros of A^2, B^2 far from the sampling circle
_PROBE_STEP = 1e-2


class LogTermError(ValueError):
    """Even boundary dimension: orders >= n would need an s^n log s term."""


class AsymptoticsError(ValueError):
    pass


class HorizonError(ValueError):
    pass


@dataclass(frozen=True)
class WarpedSeriesMetric:
    n: int
    A2: TruncatedSeries
    B2: TruncatedSeries

    @property
    def A(self) -> TruncatedSeries:
        return self.A2.sqrt()

    @property
    def B(self) -> TruncatedSeries:
        return self.B2.sqrt()

    @property
    def trunc_order(self) -> int:
        return min(self.A2.trunc_order, self.B2.trunc_order)

    def odd_below_n(self) -> float:
        """Largest |odd coefficient| of A^2, B^2 below order n."""
        idx = [k for k in range(1, min(self.n, self.trunc_order + 1)) if k % 2]
        if not idx:
            return 0.0
        return float(max(np.abs(self.A2.coeffs[idx]).max(), np.abs(self.B2.coeffs[idx]).max()))

    def metric_field(self) -> MetricField:
        n = self.n
        lo, hi = catalog.angle_box(n - 1)
        chart = Chart("FG-gauge", n + 1, (0.0, -2.0) + lo, (1.0, 2.0) + hi)
        A2, B2 = self.A2, self.B2

        def fn(x):
            s = x[0]
            w = 1.0 / (s * s)
            return catalog._diag([w, -w * A2(s)] + [w * B2(s) * f for f in catalog.sphere_factors(x[2:])], s)

        return MetricField(n + 1, LORENTZIAN, fn, chart, f"fg-warped-{n}")

    def rows(self) -> list[tuple[int, float, float]]:
        N = self.trunc_order
        return [(k, float(self.A2[k]), float(self.B2[k])) for k in range(N + 1)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["order", "A2_coeff", "B2_coeff"])
        for k, a, b in self.rows():
            w.writerow([k, repr(a), repr(b)])
        return buf.getvalue()


@dataclass
class FGSolution:
    metric: WarpedSeriesMetric
    free_data: dict
    alpha: float | None
    diagnostics: dict = field(default_factory=dict)
    radial_map: TruncatedSeries | None = None  # x(s) = 1/r as a series in s

    def to_dict(self) -> dict:
        return {
            "n": self.metric.n,
            "trunc_order": self.metric.trunc_order,
            "A2": [float(c) for c in self.metric.A2.coeffs],
            "B2": [float(c) for c in self.metric.B2.coeffs],
            "free_data": self.free_data,
            "alpha": self.alpha,
            "diagnostics": self.diagnostics,
        }


def ads_series(N: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """(1 + s^2/4)^2 and (1 - s^2/4)^2."""
    return TruncatedSeries([1, 0, 0.5, 0, 1 / 16], N), TruncatedSeries([1, 0, -0.5, 0, 1 / 16], N)


def _residual_laurent(n: int, A2: TruncatedSeries, B2: TruncatedSeries, k_index: int) -> np.ndarray:
    """Laurent coefficient at s^k_index of the diagonal einstein residual."""
    g = WarpedSeriesMetric(n, A2, B2).metric_field()
    angles = [np.pi / 2] * (n - 2) + [0.5]
    lam = cosmological_constant(n)

    def sample(z):
        pts = np.column_stack([z, np.zeros_like(z)] + [np.full_like(z, a) for a in angles])
        E = LocalGeometry(g, pts, order=2, validate=False).einstein(lam).val
        return np.stack([E[:, i, i] for i in range(n + 1)], -1)

    c = cauchy_coefficients(sample, k_index, k_index, _PROBE_RADIUS, _PROBE_POINTS)
    return c[0].real


def fg_recursion(n: int, N: int, seed: float | None = None, log_truncate: bool = False) -> FGSolution:
    """Solve the vacuum expansion order by order for A^2 and B^2.

    ``seed`` is the free order-n coefficient of B^2 (the sphere part of the
    undetermined tensor); ``None`` means zero, which reproduces exact AdS.
    For even n, orders >= n are refused unless ``log_truncate`` is set, in
    which case the expansion stops at order n - 1.
    """
    if n < 2:
        raise ValueError("boundary dimension must be >= 2")
    if N < n:
        raise ValueError(f"need N >= n (got N={N}, n={n})")
    top = N
    if n % 2 == 0:
        if not log_truncate:
            raise LogTermError(f"n={n} is even: orders >= n need an s^n log s term; pass log_truncate=True")
        top = n - 1
    seed = 0.0 if seed is None else float(seed)
    a = np.zeros(top + 1)
    b = np.zeros(top + 1)
    a[0] = b[0] = 1.0
    ranks = {}
    for k in range(1, top + 1):
        base = _residual_laurent(n, TruncatedSeries(a), TruncatedSeries(b), k + _LAURENT_OFFSET)
        cols = []
        for which in (a, b):
            which[k] = _PROBE_STEP
            probe = _residual_laurent(n, TruncatedSeries(a), TruncatedSeries(b), k + _LAURENT_OFFSET)
            cols.append((probe - base) / _PROBE_STEP)
            which[k] = 0.0
        M = np.column_stack(cols)
        sv = np.linalg.svd(M, compute_uv=False)
        rank = int(np.sum(sv > 1e-6 * sv[0]))
        ranks[k] = rank
        rhs = -base
        if rank < 2:
            # the free direction is fixed by the seed on the B^2 coefficient
            M = np.vstack([M, [0.0, 1.0]])
            rhs = np.append(rhs, seed if k == n else 0.0)
        sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        a[k], b[k] = sol
    metric = WarpedSeriesMetric(n, TruncatedSeries(a), TruncatedSeries(b))
    diagnostics = {"ranks": ranks, "odd_below_n": metric.odd_below_n()}
    free, alpha = {}, None
    if top >= n:
        free = {"tau_00": float(-a[n]), "tau_sphere": float(b[n])}
        alpha = float(-(n - 1) * (b[n] - ads_series(n)[1][n]))
        diagnostics["trace_condition"] = float(a[n] + (n - 1) * b[n])
    return FGSolution(metric, free, alpha, diagnostics)


def _laurent_profile(fn, N: int, radius: float) -> TruncatedSeries:
    """Series of x^2 fn(1/x) about x = 0."""
    return TruncatedSeries(cauchy_coefficients(lambda x: x * x * fn(1.0 / x), 0, N, radius, 64).real)


def radial_fg_gauge(V, f, n: int, N: int, radius: float = 0.5, tol: float = 1e-8) -> FGSolution:
    """FG gauge of the static metric -V dt^2 + dr^2/f + r^2 dsigma_0.

    ``V`` and ``f`` are callables of r accepting complex arrays, with
    ``V, f = r^2 + 1 + O(r^(2-n))``.  The defining function solves
    ``ds/s = -dr/sqrt(f)`` as a series in x = 1/r; reverting gives x(s) and
    ``A^2 = s^2 V``, ``B^2 = s^2 r^2``.
    """
    xs = np.linspace(1e-6, radius, 200)
    if np.any(np.asarray(f(1.0 / xs)).real <= 0):
        raise HorizonError(f"f <= 0 for r >= {1 / radius:g}; expansion domain crosses a horizon")
    K = N + 2
    FV = _laurent_profile(V, K, radius)
    Ff = _laurent_profile(f, K, radius)
    for name, F in (("V", FV), ("f", Ff)):
        if abs(F[0] - 1) > tol or abs(F[1]) > tol:
            raise AsymptoticsError(f"{name} does not behave like r^2 + O(1) at infinity: {F.coeffs[:2]}")
    H = (Ff.sqrt().invert() - 1.0).divide_power(1, tol=tol)
    G = H.integrate()
    s_of_x = G.exp().shift(1).truncate(K)
    x_of_s = s_of_x.reversion()
    ratio = x_of_s.divide_power(1, tol=tol)
    inv_ratio2 = (ratio * ratio).invert()
    B2 = inv_ratio2.truncate(N)
    A2 = (FV.compose(x_of_s) * inv_ratio2).truncate(N)
    # |ds|^2 in s^2 g, written in x: f x^2 (ds/dx)^2 / s^2 = Ff (s'/(s/x))^2
    unit = (Ff * (s_of_x.differentiate() * s_of_x.divide_power(1, tol=tol).invert()) ** 2).truncate(N)
    metric = WarpedSeriesMetric(n, A2, B2)
    # measured against the AdS background, which has its own s^4 term
    alpha = float(-(n - 1) * (B2[n] - ads_series(n)[1][n])) if N >= n else None
    diagnostics = {
        "gauge_defect": unit.max_abs_diff(TruncatedSeries([1.0], N)),
        "odd_below_n": metric.odd_below_n(),
        "A2_order_n": float(A2[n]) if N >= n else None,
    }
    free = {"tau_00": float(-A2[n]), "tau_sphere": float(B2[n])} if N >= n else {}
    return FGSolution(metric, free, alpha, diagnostics, radial_map=x_of_s.truncate(N + 1))
