"""Pointwise tensor calculus on explicit metrics of either signature.

Every field is a Python callable that receives the chart coordinates as
:class:`~adsgeo.jets.Jet` objects and builds its value with ordinary
arithmetic, so curvature comes out with exact derivatives (up to round-off).
Functions accept a single :class:`ChartPoint`, a coordinate vector, or an
``(m, dim)`` array of points; in the last case results carry a leading batch
axis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import jets as J
from .jets import Jet, contract

LORENTZIAN = "lorentzian"
RIEMANNIAN = "riemannian"


class DegenerateMetricError(ValueError):
    """The metric matrix is singular at the evaluation point."""


class SignatureError(ValueError):
    """Eigenvalue signs disagree with the declared signature."""


class ChartDomainError(ValueError):
    """A point lies outside the open admissibility box of its chart."""


@dataclass(frozen=True)
class Chart:
    name: str
    dim: int
    lower: tuple
    upper: tuple
    coord_names: tuple = ()

    def contains(self, coords) -> bool:
        c = np.asarray(coords, dtype=float)
        return bool(np.all(c > np.asarray(self.lower)) and np.all(c < np.asarray(self.upper)))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        return lo + (hi - lo) * rng.random((count, self.dim))

    def point(self, *coords) -> "ChartPoint":
        if len(coords) != self.dim:
            raise ValueError(f"chart {self.name} expects {self.dim} coordinates, got {len(coords)}")
        if not self.contains(coords):
            raise ChartDomainError(f"{coords} outside chart {self.name}")
        return ChartPoint(tuple(float(c) for c in coords), self.name)


@dataclass(frozen=True)
class ChartPoint:
    coords: tuple
    chart_id: str = ""

    def __len__(self):
        return len(self.coords)


def as_coords(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        return np.asarray(p.coords)
    return np.asarray(p)


def coordinate_jets(p, dim: int, order: int = J.MAX_ORDER) -> list[Jet]:
    c = as_coords(p)
    if c.shape[-1] != dim:
        raise ValueError(f"expected {dim} coordinates, got shape {c.shape}")
    return [J.Jet.variable(c[..., i], i, dim, order) for i in range(dim)]


def _as_jet(x, like: Jet) -> Jet:
    if isinstance(x, Jet):
        return x
    return like * 0.0 + x


@dataclass(frozen=True)
class ScalarField:
    fn: Callable
    max_order: int = J.MAX_ORDER
    name: str = ""

    def jet(self, p, dim: int, order: int = J.MAX_ORDER) -> Jet:
        x = coordinate_jets(p, dim, min(order, self.max_order))
        return _as_jet(self.fn(x), x[0])

    def __call__(self, x):
        return self.fn(x)


@dataclass(frozen=True)
class VectorField:
    fn: Callable
    name: str = ""

    def from_coords(self, x: Sequence[Jet]) -> Jet:
        comps = [_as_jet(c, x[0]) for c in self.fn(x)]
        return J.stack(comps)

    def jet(self, p, dim: int, order: int = J.MAX_ORDER) -> Jet:
        return self.from_coords(coordinate_jets(p, dim, order))

    def scaled(self, c: float) -> "VectorField":
        fn = self.fn
        return VectorField(lambda x: [c * v for v in fn(x)], f"{c}*{self.name}")


@dataclass(frozen=True)
class MetricField:
    """Symmetric metric with components given as a callable of coordinate jets."""

    dim: int
    signature: str
    fn: Callable
    chart: Chart | None = None
    name: str = ""

    def from_coords(self, x: Sequence[Jet]) -> Jet:
        rows = self.fn(x)
        if isinstance(rows, Jet):
            return rows
        return J.matrix([[_as_jet(c, x[0]) for c in row] for row in rows])

    def jet(self, p, order: int = J.MAX_ORDER) -> Jet:
        return self.from_coords(coordinate_jets(p, self.dim, order))

    def matrix(self, p) -> np.ndarray:
        return self.jet(p, 0).val


@dataclass(frozen=True)
class FormField:
    """Differential form; ``fn`` maps coordinate jets to ``{increasing index tuple: coefficient}``."""

    degree: int
    dim: int
    fn: Callable
    name: str = ""

    def from_coords(self, x: Sequence[Jet]) -> Jet:
        return form_from_components(self.fn(x), self.degree, self.dim, x[0])

    def jet(self, p, order: int = J.MAX_ORDER) -> Jet:
        return self.from_coords(coordinate_jets(p, self.dim, order))


# -- permutations and antisymmetry -------------------------------------------

def _parity(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def levi_civita(dim: int) -> np.ndarray:
    eps = np.zeros((dim,) * dim)
    for perm in itertools.permutations(range(dim)):
        eps[perm] = _parity(perm)
    return eps


def antisymmetrize(a: Jet) -> Jet:
    k = a.rank
    if k <= 1:
        return a
    acc = None
    for perm in itertools.permutations(range(k)):
        t = a.transpose(perm) * float(_parity(perm))
        acc = t if acc is None else acc + t
    return acc * (1.0 / math.factorial(k))


def form_from_components(comps: dict, degree: int, dim: int, like: Jet) -> Jet:
    """Build the antisymmetric tensor jet from increasing-multi-index coefficients."""
    if degree == 0:
        return _as_jet(comps[()], like)
    entries = {}
    for idx, c in comps.items():
        if list(idx) != sorted(set(idx)):
            raise ValueError(f"form indices must be strictly increasing, got {idx}")
        c = _as_jet(c, like)
        for perm in itertools.permutations(range(degree)):
            entries[tuple(idx[p] for p in perm)] = c * float(_parity(perm))
    zero = like * 0.0
    flat = [entries.get(ix, zero) for ix in itertools.product(range(dim), repeat=degree)]
    return J.stack(flat, (dim,) * degree)


def form_components(a, degree: int) -> dict:
    """Increasing-multi-index view of an antisymmetric component array."""
    arr = a.val if isinstance(a, Jet) else np.asarray(a)
    dim = arr.shape[-1] if degree else 0
    return {idx: arr[(Ellipsis,) + idx] for idx in itertools.combinations(range(dim), degree)}


# -- local geometry ----------------------------------------------------------

class LocalGeometry:
    """Metric jet at a point (or batch of points) with lazily derived curvature."""

    def __init__(self, metric: MetricField, p, order: int = J.MAX_ORDER, validate: bool = True):
        self.metric = metric
        self.dim = metric.dim
        self.coords = coordinate_jets(p, metric.dim, order)
        self.g = metric.from_coords(self.coords)
        if validate:
            _validate(self.g.val, metric.signature)

    @cached_property
    def ginv(self) -> Jet:
        return J.inverse(self.g)

    @cached_property
    def gamma(self) -> Jet:
        dg = self.g.grad()  # (i, j, k) = d_k g_ij
        low = (contract("...dcb->...dbc", dg) + dg - contract("...bcd->...dbc", dg)) * 0.5
        return contract("...ad,...dbc->...abc", self.ginv, low)

    @cached_property
    def riemann(self) -> Jet:
        G = self.gamma
        dG = G.grad()
        return (
            contract("...adbc->...abcd", dG)
            - contract("...acbd->...abcd", dG)
            + contract("...ace,...edb->...abcd", G, G)
            - contract("...ade,...ecb->...abcd", G, G)
        )

    @cached_property
    def riemann_lower(self) -> Jet:
        return contract("...ae,...ebcd->...abcd", self.g, self.riemann)

    @cached_property
    def ricci(self) -> Jet:
        return contract("...abad->...bd", self.riemann)

    @cached_property
    def scalar(self) -> Jet:
        return contract("...bd,...bd->...", self.ginv, self.ricci)

    def einstein(self, lam: float) -> Jet:
        return self.ricci - self.scalar * self.g * 0.5 + self.g * lam

    @cached_property
    def sqrt_abs_det(self) -> Jet:
        d = J.det(self.g)
        sign = np.sign(d.val.real)
        return J.sqrt(d * Jet.constant(sign, self.dim, d.order))

    @cached_property
    def volume_form(self) -> Jet:
        return self.sqrt_abs_det * Jet.constant(levi_civita(self.dim), self.dim, self.sqrt_abs_det.order, rank=self.dim)

    # scalar-field calculus; ``f`` is a rank-0 jet built from self.coords
    def scalar_jet(self, f: ScalarField) -> Jet:
        return _as_jet(f.fn(self.coords), self.coords[0])

    def hessian(self, f: Jet) -> Jet:
        df = f.grad()
        return df.grad() - contract("...cab,...c->...ab", self.gamma, df)

    def laplacian(self, f: Jet) -> Jet:
        return contract("...ab,...ab->...", self.ginv, self.hessian(f))

    def grad_norm_sq(self, f: Jet) -> Jet:
        df = f.grad()
        return contract("...ab,...a,...b->...", self.ginv, df, df)

    def inner(self, a: Jet, b: Jet) -> Jet:
        """Full contraction of two covariant tensors of equal rank with the metric."""
        k = a.rank
        if k == 0:
            return a * b
        up = "abcdefgh"[:k]
        lo = "ijklmnop"[:k]
        ops = [self.ginv] * k
        spec = ",".join(f"...{u}{l}" for u, l in zip(up, lo)) + f",...{up},...{lo}->..."
        return contract(spec, *ops, a, b)

    def lower(self, X: Jet) -> Jet:
        return contract("...ab,...b->...a", self.g, X)

    def raise_index(self, w: Jet) -> Jet:
        return contract("...ab,...b->...a", self.ginv, w)

    def covariant_derivative_covector(self, w: Jet) -> Jet:
        """(a, b) -> nabla_a w_b."""
        return contract("...ba->...ab", w.grad()) - contract("...cab,...c->...ab", self.gamma, w)

    def covariant_derivative_2tensor(self, T: Jet) -> Jet:
        """(c, a, b) -> nabla_c T_ab."""
        G = self.gamma
        return (
            contract("...abc->...cab", T.grad())
            - contract("...eca,...eb->...cab", G, T)
            - contract("...ecb,...ae->...cab", G, T)
        )

    def hodge(self, a: Jet) -> Jet:
        return hodge_jet(a, self.ginv, self.volume_form)


def _validate(gval: np.ndarray, signature: str) -> None:
    if np.iscomplexobj(gval):
        return
    if not np.allclose(gval, np.swapaxes(gval, -1, -2), rtol=1e-12, atol=1e-12):
        raise ValueError("metric component matrix is not symmetric")
    eig = np.linalg.eigvalsh(gval)
    scale = np.max(np.abs(eig), axis=-1, keepdims=True)
    if np.any(np.abs(eig) <= 1e-14 * scale) or np.any(scale == 0):
        raise DegenerateMetricError("metric is singular at the evaluation point")
    neg = np.sum(eig < 0, axis=-1)
    want = 1 if signature == LORENTZIAN else 0
    if np.any(neg != want):
        raise SignatureError(f"expected {want} negative eigenvalue(s), found {np.unique(neg).tolist()}")


# -- exterior calculus on antisymmetric jets ---------------------------------

def d_jet(a: Jet) -> Jet:
    k = a.rank
    g = a.grad()
    if k == 0:
        return g
    moved = g.transpose((k,) + tuple(range(k)))
    return antisymmetrize(moved) * float(k + 1)


def wedge_jet(a: Jet, b: Jet) -> Jet:
    k, l = a.rank, b.rank
    if k == 0 or l == 0:
        return a * b
    la = "abcdefgh"[:k]
    lb = "ijklmnop"[:l]
    prod = contract(f"...{la},...{lb}->...{la}{lb}", a, b)
    coef = math.factorial(k + l) / (math.factorial(k) * math.factorial(l))
    return antisymmetrize(prod) * coef


def interior_jet(X: Jet, a: Jet) -> Jet:
    k = a.rank
    if k == 0:
        return a * 0.0
    rest = "bcdefgh"[: k - 1]
    return contract(f"...a,...a{rest}->...{rest}", X, a)


def hodge_jet(a: Jet, ginv: Jet, vol: Jet) -> Jet:
    k, D = a.rank, vol.rank
    up = "abcdefgh"[:k]
    lo = "ijklmnop"[:k]
    rest = "qrstuvwx"[: D - k]
    if k == 0:
        return contract(f"...,...{rest}->...{rest}", a, vol)
    # raise one index at a time; a single many-operand einsum scales badly with D
    for i in range(k):
        idx = up[:i] + lo[i:]
        spec = f"...{up[i]}{lo[i]},...{idx}->...{up[:i + 1] + lo[i + 1:]}"
        a = contract(spec, ginv, a)
    return contract(f"...{up},...{up}{rest}->...{rest}", a, vol) * (1.0 / math.factorial(k))


# -- public pointwise operations ---------------------------------------------

@dataclass(frozen=True)
class CurvatureBundle:
    gamma: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    riemann_lower: np.ndarray = field(repr=False, default=None)


def christoffel(g: MetricField, p) -> np.ndarray:
    return LocalGeometry(g, p, order=1).gamma.val


def riemann(g: MetricField, p) -> np.ndarray:
    return LocalGeometry(g, p, order=2).riemann.val


def ricci(g: MetricField, p) -> np.ndarray:
    return LocalGeometry(g, p, order=2).ricci.val


def scalar_curvature(g: MetricField, p) -> np.ndarray:
    return LocalGeometry(g, p, order=2).scalar.val


def curvature(g: MetricField, p) -> CurvatureBundle:
    geo = LocalGeometry(g, p, order=2)
    return CurvatureBundle(geo.gamma.val, geo.riemann.val, geo.ricci.val, geo.scalar.val, geo.riemann_lower.val)


def einstein_residual(g: MetricField, lam: float, p) -> np.ndarray:
    """``Ric - R g / 2 + lam g`` componentwise."""
    return LocalGeometry(g, p, order=2).einstein(lam).val


def einstein_divergence(g: MetricField, p) -> np.ndarray:
    """``g^{ca} nabla_c G_ab`` of the Einstein tensor; needs third derivatives."""
    geo = LocalGeometry(g, p, order=3)
    G = geo.ricci - geo.scalar * geo.g * 0.5
    return contract("...ca,...cab->...b", geo.ginv, geo.covariant_derivative_2tensor(G)).val


def hessian(g: MetricField, f: ScalarField, p) -> np.ndarray:
    geo = LocalGeometry(g, p, order=2)
    return geo.hessian(geo.scalar_jet(f)).val


def laplacian(g: MetricField, f: ScalarField, p) -> np.ndarray:
    geo = LocalGeometry(g, p, order=2)
    return geo.laplacian(geo.scalar_jet(f)).val


def grad_norm_sq(g: MetricField, f: ScalarField, p) -> np.ndarray:
    geo = LocalGeometry(g, p, order=1)
    return geo.grad_norm_sq(geo.scalar_jet(f)).val


def exterior_derivative(alpha: FormField, p) -> np.ndarray:
    return d_jet(alpha.jet(p, order=1)).val


def wedge(alpha: FormField, beta: FormField, p) -> np.ndarray:
    return wedge_jet(alpha.jet(p, 0), beta.jet(p, 0)).val


def interior_product(X: VectorField, alpha: FormField, p) -> np.ndarray:
    return interior_jet(X.jet(p, alpha.dim, 0), alpha.jet(p, 0)).val


def hodge_star(g: MetricField, alpha: FormField, p) -> np.ndarray:
    geo = LocalGeometry(g, p, order=0)
    return geo.hodge(alpha.jet(p, 0)).val
