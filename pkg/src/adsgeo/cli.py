"""Command-line driver: every verification as a subcommand, one report format.

Usage::

    adsgeo <subcommand> --n 3 --metric schwarzschild-ads --param M=1 --seed 42 \\
        --out report.json [--csv table.csv] [--tol check_name=value]

Exit status is 0 when every entry passes, 1 when any check fails and 2 for
configuration errors (in which case nothing is written).
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from . import compactification as C
from . import fg_series as FG
from . import killing_forms as K
from . import obata_solver as O
from . import static_system as S
from .conventions import TOL_CURV, TOL_CURV3, cosmological_constant
from .report import Check, Report, check_rng, run_checks
from .tensor_core import LocalGeometry, ScalarField, einstein_divergence, einstein_residual, grad_norm_sq

METRIC_IDS = ("ads", "schwarzschild-ads", "shooting", "fg-truncated")
SUBCOMMANDS = ("verify-einstein", "fg-expand", "static", "twist", "compactify", "obata", "all")
SUPPORTED_METRICS = {
    "verify-einstein": METRIC_IDS,
    "fg-expand": ("fg-truncated",),
    "static": ("ads", "schwarzschild-ads", "shooting"),
    "twist": ("ads",),
    "compactify": ("ads", "schwarzschild-ads"),
    "obata": (),
    "all": (),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 3
    metric_id: str | None = None
    params: dict = field(default_factory=dict)
    seed: int = 42
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    csv: str | None = None

    def param(self, key, default):
        return self.params.get(key, default)

    def as_dict(self) -> dict:
        return {"n": self.n, "metric": self.metric_id, "params": self.params, "seed": self.seed,
                "tolerances": self.tolerances}


def parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"parameter {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        try:
            if key == "eps":
                val = [float(v) for v in raw.split(",")]
                if not all(v > 0 for v in val):
                    raise ValueError
            elif key in ("N", "nodes"):
                val = int(raw)
            else:
                val = float(raw)
                if not math.isfinite(val):
                    raise ValueError
        except ValueError:
            raise ConfigError(f"parameter {key} has malformed value {raw!r}") from None
        out[key] = val
    return out


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"tolerance {item!r} is not of the form check_name=value")
        key, raw = item.split("=", 1)
        try:
            val = float(raw)
        except ValueError:
            raise ConfigError(f"tolerance for {key} is not a number: {raw!r}") from None
        if not (val > 0 and math.isfinite(val)):
            raise ConfigError(f"tolerance for {key} must be positive")
        out[key.strip()] = val
    return out


# -- helpers -----------------------------------------------------------------

def _resid(lhs, rhs):
    return lhs, rhs, np.abs(np.asarray(lhs, float) - np.asarray(rhs, float))


def _above(value, threshold):
    """Check that ``value`` exceeds ``threshold``; the residual is the shortfall."""
    value = float(value)
    return value, threshold, max(0.0, threshold - value)


def _per_point(out, name, metric_id, params, pts, fn, tol):
    for i, p in enumerate(pts):
        out.append(Check(name, metric_id, params, i, [float(c) for c in p], (lambda p=p: fn(p)), tol))


def _one(out, name, metric_id, params, point, fn, tol):
    out.append(Check(name, metric_id, params, 0, point, fn, tol))


# -- verify-einstein ---------------------------------------------------------

def _symmetry_defect(g, pts):
    geo = LocalGeometry(g, pts, order=2)
    R = geo.riemann_lower.val
    bianchi = R + np.einsum("...abcd->...acdb", R) + np.einsum("...abcd->...adbc", R)
    defects = [
        R + np.swapaxes(R, -4, -3),
        R + np.swapaxes(R, -2, -1),
        R - np.einsum("...abcd->...cdab", R),
        bianchi,
        geo.ricci.val - np.swapaxes(geo.ricci.val, -1, -2),
        geo.gamma.val - np.swapaxes(geo.gamma.val, -1, -2),
    ]
    scale = max(1.0, float(np.abs(R).max()))
    return max(float(np.abs(d).max()) for d in defects) / scale


def checks_verify_einstein(cfg: RunConfig) -> list[Check]:
    n, M = cfg.n, cfg.param("M", 1.0)
    lam = cosmological_constant(n)
    out: list[Check] = []
    wanted = [cfg.metric_id] if cfg.metric_id else ["ads", "schwarzschild-ads"]
    for mid in wanted:
        if mid in ("ads", "schwarzschild-ads"):
            g = catalog.ads(n) if mid == "ads" else catalog.schwarzschild_ads(n, M)
            params = {"n": n} if mid == "ads" else {"n": n, "M": M}
            pts = g.chart.sample(check_rng(cfg.seed, f"einstein.vacuum.{mid}"), 10)
            _per_point(out, "einstein.vacuum", mid, params, pts,
                       lambda p, g=g: (float(np.abs(einstein_residual(g, lam, p)).max()), 0.0,
                                       np.abs(einstein_residual(g, lam, p))), TOL_CURV)
            sym_pts = g.chart.sample(check_rng(cfg.seed, f"curvature.symmetries.{mid}"), 20)
            _one(out, "curvature.symmetries", mid, params, "20 seeded points",
                 lambda g=g, q=sym_pts: (_symmetry_defect(g, q), 0.0, _symmetry_defect(g, q)), TOL_CURV)
            b_pts = g.chart.sample(check_rng(cfg.seed, f"curvature.contracted_bianchi.{mid}"), 5)
            _one(out, "curvature.contracted_bianchi", mid, params, "5 seeded points",
                 lambda g=g, q=b_pts: (float(np.abs(einstein_divergence(g, q)).max()), 0.0,
                                       np.abs(einstein_divergence(g, q))), TOL_CURV3)
        elif mid == "shooting":
            res = S.shoot(n, cfg.param("V0", 1.0), cfg.param("r_max", 10.0))
            g = res.triple.spacetime_metric()
            radii = np.linspace(0.5, 9.5, 10)
            pts = np.column_stack([np.zeros(10), radii] + [np.full(10, a) for a in [1.1] * (n - 2) + [0.7]])
            _per_point(out, "einstein.vacuum", mid, {"n": n, "V0": cfg.param("V0", 1.0)}, pts,
                       lambda p, g=g: (0.0, 0.0, np.abs(einstein_residual(g, lam, p))), 1e-7)
        elif mid == "fg-truncated":
            N = int(cfg.param("N", 6))
            seed = cfg.param("seed_n", 0.2)

            def decay(n=n, N=N, seed=seed):
                sol = FG.fg_recursion(n, N, seed=seed, log_truncate=True)
                top = sol.metric.trunc_order
                g = sol.metric.metric_field()
                ss = np.array([0.1, 0.05, 0.025])
                pts = np.column_stack([ss, np.zeros(3)] + [np.full(3, a) for a in [1.1] * (n - 2) + [0.7]])
                res = np.abs(einstein_residual(g, lam, pts)).max(axis=(-1, -2))
                slope = K.power_law_slope(ss, res)
                return _above(slope, top - 2)

            _one(out, "einstein.fg_truncated_decay", mid, {"n": n, "N": N, "seed": seed}, "s in {0.1,0.05,0.025}",
                 decay, 0.0)
    if not cfg.metric_id:
        flat = catalog.euclidean(4)
        pts = flat.chart.sample(check_rng(cfg.seed, "einstein.flat"), 3)
        _one(out, "einstein.flat", "euclidean-4", {}, "3 seeded points",
             lambda: (0.0, 0.0, einstein_residual(flat, 0.0, pts)), 1e-14)
        g = catalog.ads(n)
        p = np.array([0.3, 1.0] + [1.1] * (n - 2) + [0.7])
        t_field = ScalarField(lambda x: x[0])
        r_field = ScalarField(lambda x: x[1])

        def signature():
            gt = float(grad_norm_sq(g, t_field, p))
            gr = float(grad_norm_sq(g, r_field, p))
            return gt, gr, float(gt >= 0) + float(gr <= 0)

        _one(out, "curvature.signature", "ads", {"n": n}, p.tolist(), signature, 0.0)
    return out


# -- fg-expand -----------------------------------------------------------------

def _W_series_coefficient(x_of_s, n, M, k):
    """Coefficient of s^k in W = -(n-1) M x^(n-2) - (n-2)^2 M^2 x^(2n-2) / 4 with x = x(s)."""
    W = (x_of_s ** (n - 2)) * (-(n - 1) * M) + (x_of_s ** (2 * n - 2)) * (-((n - 2) ** 2) * M * M / 4)
    return float(W[k])


def checks_fg_expand(cfg: RunConfig) -> tuple[list[Check], str]:
    n = cfg.n
    N = int(cfg.param("N", max(6, n + 1)))
    M = cfg.param("M", 1.0)
    odd = n % 2 == 1
    out: list[Check] = []
    params = {"n": n, "N": N}
    base = FG.fg_recursion(n, N, log_truncate=not odd)
    top = base.metric.trunc_order
    A_ref, B_ref = FG.ads_series(top)
    _one(out, "fg.ads_reproduction", "fg-truncated", params, f"orders 0..{top}",
         lambda: (max(base.metric.A2.max_abs_diff(A_ref), base.metric.B2.max_abs_diff(B_ref)), 0.0,
                  max(base.metric.A2.max_abs_diff(A_ref), base.metric.B2.max_abs_diff(B_ref))), 1e-12)
    _one(out, "fg.odd_below_n", "fg-truncated", params, f"odd orders < {n}",
         lambda: (base.metric.odd_below_n(), 0.0, base.metric.odd_below_n()), 1e-12)
    if odd:
        def independence():
            a = FG.fg_recursion(n, N, seed=0.0)
            b = FG.fg_recursion(n, N, seed=0.7)
            d = max(np.abs(a.metric.A2.coeffs[:n] - b.metric.A2.coeffs[:n]).max(),
                    np.abs(a.metric.B2.coeffs[:n] - b.metric.B2.coeffs[:n]).max())
            return d, 0.0, d

        _one(out, "fg.seed_independence", "fg-truncated", params, f"orders < {n}, seeds 0 and 0.7", independence, 1e-12)

        def trace():
            sol = FG.fg_recursion(n, N, seed=0.7)
            return sol.diagnostics["trace_condition"], 0.0, sol.diagnostics["trace_condition"]

        _one(out, "fg.trace_condition", "fg-truncated", params, f"order {n}", trace, 1e-9)
    else:
        def gate():
            try:
                FG.fg_recursion(n, N)
            except FG.LogTermError:
                return 1.0, 1.0, 0.0
            return 0.0, 1.0, 1.0

        _one(out, "fg.log_gate", "fg-truncated", params, f"order {n}", gate, 0.0)

    prof = lambda r: 1 + r * r
    ads_sol = FG.radial_fg_gauge(prof, prof, n, N)
    _one(out, "fg.radial_ads_alpha", "ads", params, "series",
         lambda: (ads_sol.alpha, 0.0, ads_sol.alpha), 1e-12)
    _one(out, "fg.radial_ads_series", "ads", params, "series",
         lambda: (0.0, 0.0, max(ads_sol.metric.A2.max_abs_diff(FG.ads_series(N)[0]),
                                ads_sol.metric.B2.max_abs_diff(FG.ads_series(N)[1]))), 1e-12)
    masses = (0.5, 1.0, 2.0)

    def sads(m):
        V = lambda r: 1 + r * r - m / r ** (n - 2)
        return FG.radial_fg_gauge(V, V, n, N)

    def linearity():
        ratios = [sads(m).alpha / m for m in masses]
        return ratios, ratios[0], max(ratios) - min(ratios)

    _one(out, "fg.alpha_linearity", "schwarzschild-ads", {**params, "M": list(masses)}, "series", linearity, 1e-8)

    def mass_aspect():
        sol = sads(M)
        lhs = n * sol.alpha
        rhs = _W_series_coefficient(sol.radial_map, n, M, n - 2)
        return lhs, rhs, abs(lhs - rhs)

    _one(out, "fg.mass_aspect_consistency", "schwarzschild-ads", {**params, "M": M}, f"s^{n - 2}", mass_aspect, 1e-10)
    _one(out, "fg.gauge_identity", "schwarzschild-ads", {**params, "M": M}, f"orders 0..{N}",
         lambda: (sads(M).diagnostics["gauge_defect"], 0.0, sads(M).diagnostics["gauge_defect"]), 1e-12)
    if odd:
        def recursion_vs_radial():
            radial = sads(M)
            rec = FG.fg_recursion(n, N, seed=float(radial.metric.B2[n]))
            d = max(rec.metric.A2.max_abs_diff(radial.metric.A2), rec.metric.B2.max_abs_diff(radial.metric.B2))
            return d, 0.0, d

        _one(out, "fg.recursion_matches_radial", "schwarzschild-ads", {**params, "M": M}, f"orders 0..{N}",
             recursion_vs_radial, 1e-9)
    return out, base.metric.to_csv()


# -- static --------------------------------------------------------------------

def checks_static(cfg: RunConfig) -> tuple[list[Check], str]:
    n, M = cfg.n, cfg.param("M", 1.0)
    out: list[Check] = []
    wanted = [cfg.metric_id] if cfg.metric_id else ["ads", "schwarzschild-ads", "shooting"]
    table = ""
    for mid in wanted:
        if mid == "ads":
            t, params = S.ads_triple(n), {"n": n}
        elif mid == "schwarzschild-ads":
            t, params = S.schwarzschild_ads(n, M), {"n": n, "M": M}
        else:
            t = None
        if t is not None:
            radii = t.random_radii(check_rng(cfg.seed, f"static.residual.{mid}"), 10)
            _per_point(out, "static.residual", mid, params, radii[:, None],
                       lambda p, t=t: (0.0, 0.0, S.static_residual_norm(t, p[0])), 1e-8)
            table = S.triple_csv(t, np.linspace(t.domain[0], t.domain[1], 200))
        if mid == "ads":
            _one(out, "static.perturbed_control", mid, {"n": n, "amplitude": 0.01}, "r in [0.5, 5]",
                 lambda t=t: _above(S.static_residual_norm(S.perturbed_triple(t), np.linspace(0.5, 5, 10)).max(), 1e-4),
                 0.0)
            rr = np.array([1.0, 2.0, 3.0])
            _one(out, "static.mass_aspect_ads", mid, params, rr.tolist(),
                 lambda t=t: (0.0, 0.0, S.mass_aspect_W(t, rr)), 1e-10)
        if mid == "schwarzschild-ads":
            _one(out, "static.mass_aspect_closed_form", mid, params, [2.0],
                 lambda t=t: _resid(float(S.mass_aspect_W(t, 2.0)[0]), float(S.mass_aspect_closed_form(n, M, 2.0))),
                 1e-10)
            if n == 3:
                _one(out, "static.mass_aspect_limit", mid, params, [1e3],
                     lambda t=t: _resid(1e3 * float(S.mass_aspect_W(t, 1e3)[0]), -2 * M), 1e-3)
            if M > 0:
                radii = np.linspace(t.domain[0], 20, 50)
                _one(out, "static.mass_aspect_negative", mid, params, "50 radii outside the horizon",
                     lambda t=t, radii=radii: (float(S.mass_aspect_W(t, radii).max()), 0.0,
                                               max(0.0, float(S.mass_aspect_W(t, radii).max()))), 0.0)

                def horizon(t=t):
                    rh = catalog.schwarzschild_ads_horizon(n, M)
                    r0 = max(1.0, rh + 0.3)
                    V = t.V(r0)
                    dV = 2 * r0 + (n - 2) * M / r0 ** (n - 1)
                    res = S.shoot(n, (r0, V, dV, V), 0.05 * rh)
                    if res.outcome != S.HORIZON:
                        raise RuntimeError(f"outcome {res.outcome}, expected horizon")
                    return res.event_radius, rh, abs(res.event_radius - rh)

                _one(out, "static.horizon", mid, params, "inward from r0", horizon, 1e-6)

            def closed_form_ode(t=t):
                r = np.linspace(t.domain[0] + 0.1, 8, 25)
                V = t.V(r)
                dV = 2 * r + (n - 2) * M / r ** (n - 1)
                ddV = 2 - (n - 2) * (n - 1) * M / r**n
                _, ddV_rhs, df = S.reduced_rhs(n, r, V, dV, V)
                return 0.0, 0.0, np.concatenate([ddV_rhs - ddV, df - dV])

            _one(out, "static.reduced_ode_closed_form", mid, params, "25 radii", closed_form_ode, 1e-10)

            def cross_validation(t=t):
                r0 = max(1.0, t.domain[0] + 0.3)
                V = t.V(r0)
                dV = 2 * r0 + (n - 2) * M / r0 ** (n - 1)
                res = S.shoot(n, (r0, V, dV, V), 5.0)
                r = res.samples[:, 0]
                return 0.0, 0.0, np.abs(res.samples[:, 1] - t.V(r))

            _one(out, "static.cross_validation", mid, params, "r0 -> 5", cross_validation, 1e-8)
        if mid == "shooting":
            for V0, tol in ((1.0, 1e-7), (cfg.param("V0", 4.0), 1e-6)):
                def center(V0=V0):
                    res = S.shoot(n, V0, 10.0)
                    if res.outcome != S.GLOBAL:
                        raise RuntimeError(f"outcome {res.outcome}")
                    return res.max_rel_deviation, 0.0, res.max_rel_deviation

                _one(out, "static.shoot_center", mid, {"n": n, "V0": V0}, "[0, 10]", center, tol)

                def shoot_residual(V0=V0):
                    res = S.shoot(n, V0, 10.0)
                    q = res.residual_ratio()
                    return q, 1.0, q

                _one(out, "static.shooting_residual", mid, {"n": n, "V0": V0}, "integrator steps", shoot_residual, 1.0)
            if not cfg.metric_id:
                table = S.shoot(n, 1.0, 10.0).to_csv() if not table else table
    if not cfg.metric_id:
        def dichotomy():
            rng = check_rng(cfg.seed, "static.horizon_dichotomy")
            wrong = []
            for i in range(20):
                nn = int(rng.integers(3, 6))
                m = 0.0 if i % 5 == 0 else float(rng.uniform(-1.0, 2.0))
                prof = lambda r: 1 + r * r - m / r ** (nn - 2)
                d = lambda r: 2 * r + (nn - 2) * m / r ** (nn - 1)
                res = S.shoot(nn, (1.5, prof(1.5), d(1.5), prof(1.5)), 0.05)
                if (res.outcome == S.HORIZON) != (m > 0):
                    wrong.append((nn, m, res.outcome))
            return len(wrong), 0, len(wrong)

        _one(out, "static.horizon_dichotomy", "schwarzschild-ads", {"pairs": 20}, "seeded (n, M) sweep", dichotomy, 0.0)
    return out, table


# -- twist ---------------------------------------------------------------------

def checks_twist(cfg: RunConfig) -> list[Check]:
    n = cfg.n
    lam = cfg.param("lam", 0.3)
    out: list[Check] = []
    cat = K.killing_catalog(n, lam)
    g = catalog.ads(n)
    pts = g.chart.sample(check_rng(cfg.seed, "twist.points"), 10)
    for key, data in cat.items():
        params = {"n": n, "field": data.name}
        _per_point(out, f"twist.killing_residual.{key}", "ads", params, pts,
                   lambda p, d=data: (0.0, 0.0, K.killing_residual(d, p)), 1e-9)
        _per_point(out, f"twist.lichnerowicz.{key}", "ads", params, pts,
                   lambda p, d=data: (0.0, 0.0, K.lichnerowicz_residual(d, p)), 1e-8)
        _one(out, f"twist.theta_wedge_omega.{key}", "ads", params, "10 seeded points",
             lambda d=data: (0.0, 0.0, K.twist_omega_wedge(d, pts)), 1e-9)
    hel = cat["helical"]
    hparams = {"n": n, "lam": lam}
    _per_point(out, "twist.flux_identity", "ads", hparams, pts,
               lambda p: (0.0, 0.0, K.twist_flux_identity(hel, p)), 1e-7)
    _per_point(out, "twist.dual_closure", "ads", hparams, pts,
               lambda p: (0.0, 0.0, K.dual_twist_closure(hel, p)), 1e-7)
    _one(out, "twist.static_zero", "ads", {"n": n}, "10 seeded points",
         lambda: (0.0, 0.0, K.twist(cat["dt"], pts)), 1e-9)
    p_hel = np.array([0.0, 1.0] + [math.pi / 3] * (n - 2) + [0.0])
    _one(out, "twist.helical_nonzero", "ads", hparams, p_hel.tolist(),
         lambda: _above(np.abs(K.twist(hel, p_hel)).max(), 1e-3), 0.0)
    p_one = np.array([0.0, 1.0] + [1.1] * (n - 2) + [0.7])
    _one(out, "twist.killing_control", "ads", {"n": n, "field": "r*dr"}, p_one.tolist(),
         lambda: _above(np.abs(K.killing_residual(K.radial_dilation(n), p_one)).max(), 0.1), 0.0)
    _one(out, "twist.dual_closure_control", "deformed-ads", {"n": n, "eps": 0.3}, p_one.tolist(),
         lambda: _above(np.abs(K.dual_twist_closure(
             K.StationaryData(K.deformed_ads(n), cat["helical"].X), p_one, check_einstein=False)).max(), 1e-3), 0.0)
    fg_static = K.killing_catalog(n, lam, fg=True)["dt"]
    # tensor quadrature on S^(n-1): keep the node count manageable as n grows
    nodes = int(cfg.param("nodes", {3: 16, 4: 8}.get(n, 4)))
    for i, eps in enumerate(cfg.param("eps", [0.1, 0.05, 0.025])):
        def flux(eps=eps):
            rep = K.flux_integral(fg_static, eps, nodes=nodes)
            return rep.flux, 0.0, rep.flux

        out.append(Check("twist.static_flux", "ads", {"n": n, "field": "dt", "nodes": nodes}, i, [eps], flux, 1e-10))

    def quadrature():
        rep = K.flux_integral(fg_static, 0.1, nodes=nodes)
        return rep.flux, rep.refined_flux, abs(rep.flux - rep.refined_flux)

    _one(out, "twist.flux_quadrature_stable", "ads", {"n": n, "field": "dt"}, [0.1], quadrature, 1e-8)
    return out


# -- compactify ------------------------------------------------------------------

def checks_compactify(cfg: RunConfig) -> list[Check]:
    n, M = cfg.n, cfg.param("M", 1.0)
    out: list[Check] = []
    ads = S.ads_triple(n)
    sads = S.schwarzschild_ads(n, M)
    triples = [("ads", ads, {"n": n}), ("schwarzschild-ads", sads, {"n": n, "M": M})]
    if cfg.metric_id == "ads":
        triples = triples[:1]
    elif cfg.metric_id == "schwarzschild-ads":
        triples = triples[1:]
    for mid, t, params in triples:
        radii = t.random_radii(check_rng(cfg.seed, f"compactify.{mid}"), 10)
        _per_point(out, "compactify.bochner", mid, params, radii[:, None],
                   lambda p, t=t: (0.0, 0.0, C.bochner_residual(t, p[0])), 1e-7)

        def three_way(p, t=t):
            c = C.conformal_scalar_check(t, p[0])
            a, b, k = c["lhs"], c["rhs"], c["conformal"]
            return float(a[0]), float(b[0]), max(abs(a - b).max(), abs(a - k).max(), abs(b - k).max())

        _per_point(out, "compactify.conformal_scalar", mid, params, radii[:, None], three_way, 1e-6)
        rig = {"ads": (1e-9, False), "schwarzschild-ads": (1e-2, True)}[mid]
        if rig[1]:
            rr = np.linspace(t.domain[0] + 0.05, 5, 20)
            _one(out, "compactify.rigidity_obstructed", mid, params, "20 radii",
                 lambda t=t, rr=rr: _above(C.rigidity_check(t, rr).max(), rig[0]), 0.0)
        else:
            _one(out, "compactify.rigidity", mid, params, "10 seeded radii",
                 lambda t=t, r=radii: (0.0, 0.0, C.rigidity_check(t, r)), rig[0])
    if not cfg.metric_id or cfg.metric_id == "schwarzschild-ads":
        terms_r = sads.random_radii(check_rng(cfg.seed, "compactify.bochner_terms"), 10)

        def terms():
            T = C.bochner_terms(sads, terms_r)
            smallest = min(float(np.abs(T[k]).min()) for k in ("laplacian_W", "hessian_defect_sq", "drift", "W"))
            return _above(smallest, 1e-8)

        _one(out, "compactify.bochner_terms_nonzero", "schwarzschild-ads", {"n": n, "M": M}, "10 seeded radii",
             terms, 0.0)
        W2 = float(S.mass_aspect_closed_form(n, M, 2.0)) * n * (n - 1)
        _one(out, "compactify.scalar_at_r2", "schwarzschild-ads", {"n": n, "M": M}, [2.0],
             lambda: _resid(float(C.conformal_scalar_check(sads, 2.0)["lhs"][0]), W2), 1e-6)
        _one(out, "compactify.boundary_rate", "schwarzschild-ads", {"n": n, "M": M}, "eps ladder",
             lambda: _above(C.boundary_geometry(C.CompactifiedSlice(sads)).second_form_rate, 1.0), 0.0)
        rh = catalog.schwarzschild_ads_horizon(n, M)
        _one(out, "compactify.scan_negative", "schwarzschild-ads", {"n": n, "M": M}, f"r in [{rh + 0.01:.4f}, 50]",
             lambda: (C.nonneg_scalar_scan(sads, np.linspace(rh + 0.01, 50, 2000)).min_value, -1.0,
                      max(0.0, C.nonneg_scalar_scan(sads, np.linspace(rh + 0.01, 50, 2000)).min_value + 1.0)), 0.0)
    if not cfg.metric_id or cfg.metric_id == "ads":
        _one(out, "compactify.bochner_control", "ads", {"n": n, "perturbed": 0.01}, "r in [0.5, 5]",
             lambda: _above(np.abs(C.bochner_residual(S.perturbed_triple(ads), np.linspace(0.5, 5, 10))).max(), 1e-3),
             0.0)
        flat_pts = ads.sample_points(ads.random_radii(check_rng(cfg.seed, "compactify.ads_flatness"), 10))
        _one(out, "compactify.ads_flatness", "ads", {"n": n}, "10 seeded points",
             lambda: (0.0, 0.0, C.riemann_norm(C.CompactifiedSlice(ads).gbar, flat_pts)), 1e-8)

        def rescale():
            c = C.CompactifiedSlice(ads)
            p = ads.sample_points([1.3])
            a = LocalGeometry(c.gbar, p).scalar.val
            b = LocalGeometry(c.scaled(2.0), p).scalar.val
            # ads is flat after compactification; use the curved base slice for a nonzero value
            h = ads.slice_metric()
            h4 = type(h)(h.dim, h.signature, lambda x: h.fn(x) * 4.0, h.chart, "4h")
            Rh, R4 = LocalGeometry(h, p).scalar.val, LocalGeometry(h4, p).scalar.val
            return float(R4[0]), float(Rh[0]) / 4, max(abs(R4 - Rh / 4).max(), abs(b - a / 4).max())

        _one(out, "compactify.constant_rescaling", "ads", {"n": n, "c": 2.0}, [1.3], rescale, 1e-12)

        def umbilic():
            rep = C.boundary_geometry(C.CompactifiedSlice(ads), (1e-1, 1e-2, 1e-3))
            return rep.umbilicity_defect[-1], 0.0, rep.umbilicity_defect[-1]

        _one(out, "compactify.umbilicity", "ads", {"n": n}, [1e-3], umbilic, 1e-6)

        def limits():
            rep = C.boundary_geometry(C.CompactifiedSlice(ads))
            f = rep.limits["mean_curvature_factor"]
            return f, 1.0, max(abs(f - 1), abs(rep.limits["induced_defect"]), abs(rep.limits["second_form_defect"]))

        _one(out, "compactify.boundary_limits", "ads", {"n": n}, "eps -> 0", limits, 1e-4)
        _one(out, "compactify.gbar_bounded", "ads", {"n": n}, "eps ladder",
             lambda: (C.gbar_boundedness(C.CompactifiedSlice(ads)), 2.0,
                      max(0.0, C.gbar_boundedness(C.CompactifiedSlice(ads)) - 2.0)), 0.0)
        _one(out, "compactify.scan_ads", "ads", {"n": n}, "r in [0.1, 50]",
             lambda: (C.nonneg_scalar_scan(ads, np.linspace(0.1, 50, 500)).min_value, 0.0,
                      C.nonneg_scalar_scan(ads, np.linspace(0.1, 50, 500)).min_value), 1e-10)

        def homogeneity():
            scaled = S.StaticTriple(n, lambda r: 4 * (1 + r * r), lambda r: 1 + r * r, ads.domain, name="ads-scaled")
            rr = [0.7, 1.5, 3.0]
            a = C.rigidity_check(scaled, rr).max()
            b = C.rigidity_check(scaled, rr, scale=2.0).max()
            return a, b, max(a, b)

        _one(out, "compactify.rigidity_homogeneity", "ads", {"n": n, "c": 2.0}, [0.7, 1.5, 3.0], homogeneity, 1e-9)
    return out


# -- obata ---------------------------------------------------------------------

def checks_obata(cfg: RunConfig) -> tuple[list[Check], str]:
    n = cfg.n
    out: list[Check] = []
    params = {"n": n}
    sol = O.solve(n, s_max=3.0)
    s, phi = O.integrate_phi(2.0, samples=3)
    _one(out, "obata.phi_initial", "obata", params, [0.0], lambda: _resid(phi[0], 1.0), 0.0)
    _one(out, "obata.phi_cosh1", "obata", params, [1.0], lambda: _resid(phi[1], math.cosh(1)), 1e-9)
    _one(out, "obata.phi_ratio", "obata", params, [1.0, 2.0],
         lambda: _resid(phi[2] / phi[1], math.cosh(2) / math.cosh(1)), 1e-9)
    s, f = O.integrate_jacobi(2.0, samples=3)
    _one(out, "obata.jacobi_sinh1", "obata", params, [1.0], lambda: _resid(f[1], math.sinh(1)), 1e-9)
    _one(out, "obata.jacobi_first_integral", "obata", params, "s in [0, 3]",
         lambda: (0.0, 0.0, sol.jacobi_energy() - 1.0), 1e-9)
    _one(out, "obata.phi_first_integral", "obata", params, "s in [0, 3]",
         lambda: (0.0, 0.0, sol.phi_energy() - 1.0), 1e-9)
    _one(out, "obata.spherical_control", "obata", {**params, "sectional": 1.0}, [math.pi / 2],
         lambda: _resid(O.integrate_jacobi(math.pi / 2, sectional=1.0, samples=2)[1][-1], 1.0), 1e-9)
    pts = sol.reconstructed.chart.sample(check_rng(cfg.seed, "obata.points"), 10)
    _per_point(out, "obata.rigidity", "obata", params, pts, lambda p: (0.0, 0.0, O.verify_rigidity(sol, p)), 1e-9)
    _one(out, "obata.ricci", "obata", params, "10 seeded points", lambda: (0.0, 0.0, O.ricci_defect(sol, pts)), 1e-8)
    eye = np.eye(n - 1)
    _one(out, "obata.radial_curvature", "obata", params, "10 seeded points",
         lambda: (0.0, 0.0, O.radial_curvature(sol.reconstructed, pts) + eye), 1e-8)
    _one(out, "obata.map_to_ball", "obata", params, "s grid",
         lambda: (0.0, 0.0, O.map_to_ball_profile(sol)["phi_defect"]), 1e-10)
    return out, sol.to_csv()


# -- driver --------------------------------------------------------------------

def build(cmd: str, cfg: RunConfig) -> tuple[list[Check], str | None]:
    if cmd == "verify-einstein":
        return checks_verify_einstein(cfg), None
    if cmd == "fg-expand":
        return checks_fg_expand(cfg)
    if cmd == "static":
        return checks_static(cfg)
    if cmd == "twist":
        return checks_twist(cfg), None
    if cmd == "compactify":
        return checks_compactify(cfg), None
    if cmd == "obata":
        return checks_obata(cfg)
    if cmd == "all":
        checks: list[Check] = []
        for sub in SUBCOMMANDS[:-1]:
            checks.extend(build(sub, cfg)[0])
        return checks, None
    raise ConfigError(f"unknown subcommand {cmd}")


def run(cmd: str, cfg: RunConfig) -> Report:
    if cfg.metric_id and cfg.metric_id not in SUPPORTED_METRICS[cmd]:
        raise ConfigError(f"--metric {cfg.metric_id} is not available for {cmd}")
    checks, table = build(cmd, cfg)
    for key in cfg.tolerances:
        if not any(c.check_name == key or c.check_name.startswith(key + ".") for c in checks):
            raise ConfigError(f"tolerance override {key!r} matches no check")
    for c in checks:
        for key, val in cfg.tolerances.items():
            if c.check_name == key or c.check_name.startswith(key + "."):
                c.tolerance = val
    report = Report(cmd, cfg.as_dict(), run_checks(checks))
    report.table = table
    return report


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="boundary dimension n (space-time dimension n+1)")
    common.add_argument("--metric", choices=METRIC_IDS, default=None, help="restrict to one catalog entry")
    common.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="model parameter: M, lam, V0, N, eps (comma list), r_max")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", action="append", default=[], metavar="CHECK=VALUE", help="tolerance override")
    common.add_argument("--out", default=None, help="JSON report path (default: stdout)")
    common.add_argument("--csv", default=None, help="CSV table path")
    parser = argparse.ArgumentParser(prog="adsgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args) -> RunConfig:
    if args.n < 3 and args.command != "obata":
        raise ConfigError("--n must be at least 3")
    if args.n < 2:
        raise ConfigError("--n must be at least 2")
    return RunConfig(args.n, args.metric, parse_params(args.param), args.seed, parse_tolerances(args.tol),
                     args.out, args.csv)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(args.command, cfg)
    except ConfigError as exc:
        print(f"adsgeo: configuration error: {exc}", file=sys.stderr)
        return 2
    text = report.to_json()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.csv:
        with open(cfg.csv, "w") as fh:
            fh.write(report.table if report.table else report.to_csv())
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
