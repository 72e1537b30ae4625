"""Truncated multivariate Taylor arithmetic ("jets") up to third order.

A :class:`Jet` carries a tensor-valued quantity together with all of its
partial derivatives with respect to the chart coordinates, up to a fixed
order.  Arrays are laid out as ``batch + components + (dim,) * k`` so that a
whole set of sample points can be pushed through the same expression at
once.  Derivative axes always trail the component axes, which makes
``grad`` a free relabelling.

Products follow the general Leibniz rule: for every output derivative
index we enumerate which operand it lands on.  Elementary functions use the
Faa di Bruno formula truncated at order three.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

MAX_ORDER = 3
_DLET = "UVW"


class Jet:
    """Value plus partial derivatives up to ``order`` of a tensor quantity.

    ``rank`` counts the component axes; everything in front of them is a
    batch shape.  ``ders[k]`` holds the ``k+1``-th derivatives.
    """

    __slots__ = ("val", "ders", "rank", "dim")
    __array_priority__ = 1000

    def __init__(self, val, ders: Sequence[np.ndarray], rank: int, dim: int):
        self.val = np.asarray(val)
        self.ders = list(ders)
        self.rank = rank
        self.dim = dim

    # -- construction -----------------------------------------------------

    @classmethod
    def variable(cls, x, index: int, dim: int, order: int = MAX_ORDER) -> "Jet":
        x = np.asarray(x)
        if not np.iscomplexobj(x):
            x = x.astype(float)
        d1 = np.zeros(x.shape + (dim,), dtype=x.dtype)
        d1[..., index] = 1.0
        ders = [d1] + [np.zeros(x.shape + (dim,) * k, dtype=x.dtype) for k in range(2, order + 1)]
        return cls(x, ders[:order], 0, dim)

    @classmethod
    def constant(cls, c, dim: int, order: int = MAX_ORDER, rank: int = 0) -> "Jet":
        c = np.asarray(c)
        if not np.iscomplexobj(c):
            c = c.astype(float)
        ders = [np.zeros(c.shape + (dim,) * k, dtype=c.dtype) for k in range(1, order + 1)]
        return cls(c, ders, rank, dim)

    @property
    def order(self) -> int:
        return len(self.ders)

    @property
    def comp_shape(self) -> tuple:
        return self.val.shape[self.val.ndim - self.rank:] if self.rank else ()

    def truncate(self, order: int) -> "Jet":
        return Jet(self.val, self.ders[:order], self.rank, self.dim)

    def __repr__(self) -> str:
        return f"Jet(rank={self.rank}, order={self.order}, val={self.val!r})"

    # -- structural ops ---------------------------------------------------

    def grad(self) -> "Jet":
        """Promote the first derivative axis to a trailing component axis."""
        if not self.ders:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.ders[0], self.ders[1:], self.rank + 1, self.dim)

    def partial(self, i: int) -> "Jet":
        if not self.ders:
            raise ValueError("cannot differentiate an order-0 jet")
        # derivative axes are symmetric, so slicing the last one is enough
        return Jet(self.ders[0][..., i], [d[..., i] for d in self.ders[1:]], self.rank, self.dim)

    def comp(self, *idx) -> "Jet":
        """Select component ``idx`` (indexes the component axes only)."""
        k = len(idx)
        tail = self.rank - k
        sel = lambda nd: (Ellipsis,) + tuple(idx) + (slice(None),) * (tail + nd)
        return Jet(self.val[sel(0)], [d[sel(j + 1)] for j, d in enumerate(self.ders)], tail, self.dim)

    def transpose(self, perm: Sequence[int]) -> "Jet":
        r = self.rank

        def tr(a, nd):
            lead = a.ndim - nd - r
            axes = list(range(lead)) + [lead + p for p in perm] + list(range(lead + r, a.ndim))
            return np.transpose(a, axes)

        return Jet(tr(self.val, 0), [tr(d, j + 1) for j, d in enumerate(self.ders)], r, self.dim)

    @property
    def T(self) -> "Jet":
        return self.transpose(tuple(reversed(range(self.rank))))

    def real(self) -> "Jet":
        return Jet(self.val.real, [d.real for d in self.ders], self.rank, self.dim)

    def _map(self, fn) -> "Jet":
        return Jet(fn(self.val), [fn(d) for d in self.ders], self.rank, self.dim)

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return self._map(np.negative)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            _check_rank(self, other)
            o = min(self.order, other.order)
            return Jet(self.val + other.val, [a + b for a, b in zip(self.ders[:o], other.ders[:o])], self.rank, self.dim)
        return Jet(self.val + other, self.ders, self.rank, self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return _elementwise_product(self, other)
        if np.ndim(other) == 0:
            return self._map(lambda a: a * other)
        # non-scalar arrays are read as rank-0 constants over the batch
        return _elementwise_product(self, Jet.constant(other, self.dim, self.order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(log(self) * p)
        if p == 0:
            return Jet.constant(np.ones_like(self.val), self.dim, self.order, self.rank)
        if p == 1:
            return self
        if p == 2:
            return self * self
        x = self.val
        if float(p).is_integer():
            p = int(p)
        c = [x**p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2), p * (p - 1) * (p - 2) * x ** (p - 3)]
        return self.apply(c)

    def __rpow__(self, base):
        return exp(self * math.log(base))

    def reciprocal(self) -> "Jet":
        x = self.val
        ix = 1.0 / x
        return self.apply([ix, -ix * ix, 2 * ix**3, -6 * ix**4])

    def apply(self, c: Sequence) -> "Jet":
        """Compose with a univariate function given its derivatives ``c[k]`` at ``val``."""
        f1 = self.ders[0] if self.order >= 1 else None
        ders = []
        if self.order >= 1:
            ders.append(np.einsum("...,...U->...U", c[1], f1))
        if self.order >= 2:
            f2 = self.ders[1]
            ders.append(np.einsum("...,...U,...V->...UV", c[2], f1, f1) + np.einsum("...,...UV->...UV", c[1], f2))
        if self.order >= 3:
            f3 = self.ders[2]
            t = np.einsum("...UV,...W->...UVW", f2, f1)
            sym = t + np.einsum("...UVW->...UWV", t) + np.einsum("...UVW->...WVU", t)
            ders.append(
                np.einsum("...,...U,...V,...W->...UVW", c[3], f1, f1, f1)
                + np.einsum("...,...UVW->...UVW", c[2], sym)
                + np.einsum("...,...UVW->...UVW", c[1], f3)
            )
        return Jet(c[0], ders, self.rank, self.dim)


def _check_rank(a: Jet, b: Jet) -> None:
    if a.rank != b.rank:
        raise ValueError(f"rank mismatch in elementwise op: {a.rank} vs {b.rank}")


def _comp_letters(rank: int, offset: int = 0) -> str:
    return "abcdefghijklmnopqrst"[offset:offset + rank]


def _elementwise_product(a: Jet, b: Jet) -> Jet:
    if a.rank == b.rank:
        return contract("...,...->...", a, b, rank=a.rank)
    if a.rank == 0 or b.rank == 0:
        r = max(a.rank, b.rank)
        L = _comp_letters(r)
        if a.rank == 0:
            return contract(f"...,...{L}->...{L}", a, b)
        return contract(f"...{L},...->...{L}", a, b)
    raise ValueError(f"cannot multiply jets of rank {a.rank} and {b.rank} elementwise")


def contract(spec: str, *ops, rank: int | None = None) -> Jet:
    """``np.einsum`` over jets, propagating derivatives with the Leibniz rule.

    ``spec`` addresses component axes only (lowercase letters, optional
    leading ``...`` for batch); derivative axes are appended internally.
    Plain arrays are treated as constants.
    """
    ins, out = spec.split("->")
    ins = ins.split(",")
    jets = [i for i, o in enumerate(ops) if isinstance(o, Jet)]
    if not jets:
        raise TypeError("contract needs at least one Jet operand")
    order = min(ops[i].order for i in jets)
    dim = ops[jets[0]].dim
    if rank is None:
        rank = len(out.replace("...", ""))
    arrs0 = [o.val if isinstance(o, Jet) else o for o in ops]
    val = np.einsum(spec, *arrs0)
    ders = []
    for m in range(1, order + 1):
        letters = _DLET[:m]
        acc = None
        for assign in itertools.product(jets, repeat=m):
            subs, arrs = [], []
            for i, o in enumerate(ops):
                if isinstance(o, Jet):
                    mine = "".join(l for l, a in zip(letters, assign) if a == i)
                    subs.append(ins[i] + mine)
                    arrs.append(o.val if not mine else o.ders[len(mine) - 1])
                else:
                    subs.append(ins[i])
                    arrs.append(o)
            term = np.einsum(",".join(subs) + "->" + out + letters, *arrs)
            acc = term if acc is None else acc + term
        ders.append(acc)
    return Jet(val, ders, rank, dim)


def stack(items: Sequence, axis_shape: tuple | None = None) -> Jet:
    """Stack rank-0 jets (or constants) into a tensor jet of shape ``axis_shape``."""
    items = list(items)
    proto = next(x for x in items if isinstance(x, Jet))
    if axis_shape is None:
        axis_shape = (len(items),)
    order, dim = min(x.order for x in items if isinstance(x, Jet)), proto.dim
    batch = np.broadcast_shapes(*[np.shape(x.val if isinstance(x, Jet) else x) for x in items])
    dtype = np.result_type(*[(x.val if isinstance(x, Jet) else np.asarray(x)) for x in items])
    val = np.zeros(batch + (len(items),), dtype=dtype)
    ders = [np.zeros(batch + (len(items),) + (dim,) * k, dtype=dtype) for k in range(1, order + 1)]
    for j, x in enumerate(items):
        if isinstance(x, Jet):
            val[..., j] = x.val
            for k in range(order):
                ders[k][(Ellipsis, j) + (slice(None),) * (k + 1)] = x.ders[k]
        else:
            val[..., j] = x
    r = len(axis_shape)
    val = val.reshape(batch + tuple(axis_shape))
    ders = [d.reshape(batch + tuple(axis_shape) + (dim,) * (k + 1)) for k, d in enumerate(ders)]
    return Jet(val, ders, r, dim)


def matrix(rows: Sequence[Sequence]) -> Jet:
    n = len(rows)
    return stack([x for row in rows for x in row], (n, len(rows[0])))


def diag(entries: Sequence) -> Jet:
    n = len(entries)
    zero = 0.0
    return matrix([[entries[i] if i == j else zero for j in range(n)] for i in range(n)])


def trace(a: Jet) -> Jet:
    return contract("...aa->...", a)


def matmul(a, b) -> Jet:
    return contract("...ab,...bc->...ac", a, b)


def inverse(a: Jet) -> Jet:
    """Inverse of a matrix jet via the nilpotent Neumann series."""
    h0 = np.linalg.inv(a.val)
    delta = Jet(np.zeros_like(a.val), a.ders, 2, a.dim)
    e = contract("...ab,...bc->...ac", h0, delta)
    term = Jet.constant(h0, a.dim, a.order, rank=2)
    acc = term
    for _ in range(a.order):
        term = -matmul(e, term)
        acc = acc + term
    return acc


def det(a: Jet) -> Jet:
    """Determinant jet: ``det(A0) * exp(tr log(I + A0^{-1} dA))``."""
    h0 = np.linalg.inv(a.val)
    d0 = np.linalg.det(a.val)
    delta = Jet(np.zeros_like(a.val), a.ders, 2, a.dim)
    e = contract("...ab,...bc->...ac", h0, delta)
    log_sum = None
    power = e
    for k in range(1, a.order + 1):
        term = power * ((-1) ** (k + 1) / k)
        log_sum = term if log_sum is None else log_sum + term
        if k < a.order:
            power = matmul(power, e)
    if log_sum is None:
        return Jet(d0, [], 0, a.dim)
    return exp(trace(log_sum)) * d0


# -- elementary functions on jets or plain numbers -------------------------

def _lift(name, fn_float, derivs):
    def f(x):
        if isinstance(x, Jet):
            return x.apply(derivs(x.val))
        return fn_float(x)

    f.__name__ = name
    return f


sqrt = _lift("sqrt", np.sqrt, lambda x: [np.sqrt(x), 0.5 / np.sqrt(x), -0.25 * x**-1.5, 0.375 * x**-2.5])
exp = _lift("exp", np.exp, lambda x: [np.exp(x)] * 4)
log = _lift("log", np.log, lambda x: [np.log(x), 1 / x, -1 / x**2, 2 / x**3])
sin = _lift("sin", np.sin, lambda x: [np.sin(x), np.cos(x), -np.sin(x), -np.cos(x)])
cos = _lift("cos", np.cos, lambda x: [np.cos(x), -np.sin(x), -np.cos(x), np.sin(x)])
sinh = _lift("sinh", np.sinh, lambda x: [np.sinh(x), np.cosh(x), np.sinh(x), np.cosh(x)])
cosh = _lift("cosh", np.cosh, lambda x: [np.cosh(x), np.sinh(x), np.cosh(x), np.sinh(x)])
