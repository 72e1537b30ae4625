"""Truncated power series c_0 + c_1 s + ... + c_N s^N.

Coefficients beyond N are unknown, not zero: binary operations return the
smaller of the two truncation orders and nothing ever silently extends
past it.
"""

from __future__ import annotations

import math

import numpy as np


class SeriesDomainError(ValueError):
    """A precondition on the leading coefficients was violated."""


class TruncatedSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trunc_order: int | None = None):
        c = np.asarray(coeffs)
        if not np.iscomplexobj(c):
            c = c.astype(float)
        if trunc_order is not None:
            if len(c) <= trunc_order:
                c = np.concatenate([c, np.zeros(trunc_order + 1 - len(c), dtype=c.dtype)])
            c = c[: trunc_order + 1]
        self.coeffs = c

    @property
    def trunc_order(self) -> int:
        return len(self.coeffs) - 1

    N = trunc_order

    @classmethod
    def variable(cls, N: int) -> "TruncatedSeries":
        return cls([0.0, 1.0], N)

    @classmethod
    def constant(cls, c: float, N: int) -> "TruncatedSeries":
        return cls([c], N)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries({np.array2string(self.coeffs, precision=6)}, N={self.trunc_order})"

    def truncate(self, N: int) -> "TruncatedSeries":
        if N > self.trunc_order:
            raise SeriesDomainError(f"cannot extend a series of order {self.trunc_order} to {N}")
        return TruncatedSeries(self.coeffs[: N + 1])

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries([other], self.trunc_order)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        N = min(self.trunc_order, other.trunc_order)
        return TruncatedSeries(self.coeffs[: N + 1] + other.coeffs[: N + 1])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.coeffs * other)
        N = min(self.trunc_order, other.trunc_order)
        return TruncatedSeries(np.convolve(self.coeffs[: N + 1], other.coeffs[: N + 1])[: N + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.invert()
        return TruncatedSeries(self.coeffs / other)

    def __rtruediv__(self, other):
        return self.invert() * other

    def __pow__(self, k: int):
        if not float(k).is_integer():
            raise SeriesDomainError("only integer powers are supported; use sqrt()")
        k = int(k)
        if k < 0:
            return self.invert() ** (-k)
        out = TruncatedSeries([1.0], self.trunc_order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def invert(self) -> "TruncatedSeries":
        a = self.coeffs
        if a[0] == 0:
            raise SeriesDomainError("invert requires a nonzero constant term")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, len(a)):
            b[k] = -np.dot(a[1: k + 1], b[k - 1:: -1][:k]) / a[0]
        return TruncatedSeries(b)

    def sqrt(self) -> "TruncatedSeries":
        a = self.coeffs
        if not (np.isrealobj(a) and a[0] > 0):
            raise SeriesDomainError("sqrt requires a positive constant term")
        b = np.zeros_like(a)
        b[0] = math.sqrt(a[0])
        for k in range(1, len(a)):
            b[k] = (a[k] - np.dot(b[1:k], b[k - 1:0:-1])) / (2 * b[0])
        return TruncatedSeries(b)

    def exp(self) -> "TruncatedSeries":
        a = self.coeffs
        b = np.zeros_like(a)
        b[0] = np.exp(a[0])
        j = np.arange(len(a))
        for k in range(1, len(a)):
            b[k] = np.dot(j[1: k + 1] * a[1: k + 1], b[k - 1:: -1][:k]) / k
        return TruncatedSeries(b)

    def differentiate(self) -> "TruncatedSeries":
        if self.trunc_order == 0:
            raise SeriesDomainError("derivative of an order-0 series is unknown")
        k = np.arange(1, len(self.coeffs))
        return TruncatedSeries(self.coeffs[1:] * k)

    def integrate(self, c0: float = 0.0) -> "TruncatedSeries":
        k = np.arange(1, len(self.coeffs) + 1)
        return TruncatedSeries(np.concatenate([[c0], self.coeffs / k]))

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by s^k (k >= 0), keeping the known order N + k."""
        return TruncatedSeries(np.concatenate([np.zeros(k, dtype=self.coeffs.dtype), self.coeffs]))

    def divide_power(self, k: int, tol: float = 1e-12) -> "TruncatedSeries":
        """Divide by s^k; the first k coefficients must vanish."""
        if k > self.trunc_order:
            raise SeriesDomainError("not enough known coefficients")
        if np.any(np.abs(self.coeffs[:k]) > tol):
            raise SeriesDomainError(f"leading {k} coefficients must vanish to divide by s^{k}")
        return TruncatedSeries(self.coeffs[k:])

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(s)); inner must have zero constant term."""
        if abs(inner.coeffs[0]) != 0:
            raise SeriesDomainError("compose requires inner series with zero constant term")
        N = min(self.trunc_order, inner.trunc_order)
        inner = inner.truncate(N)
        out = TruncatedSeries([self.coeffs[N]], N)
        for k in range(N - 1, -1, -1):
            out = out * inner + self.coeffs[k]
        return out

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse b with self(b(s)) = s."""
        a = self.coeffs
        if a[0] != 0 or a[1] == 0:
            raise SeriesDomainError("reversion requires c0 = 0 and c1 != 0")
        N = self.trunc_order
        b = np.zeros_like(a)
        b[1] = 1.0 / a[1]
        for k in range(2, N + 1):
            c = self.compose(TruncatedSeries(b)).coeffs
            b[k] = -c[k] / a[1]
        return TruncatedSeries(b)

    def evaluate(self, x):
        out = self.coeffs[-1] + 0 * x
        for c in self.coeffs[-2::-1]:
            out = out * x + c
        return out

    __call__ = evaluate

    def max_abs_diff(self, other) -> float:
        other = self._coerce(other)
        N = min(self.trunc_order, other.trunc_order)
        return float(np.max(np.abs(self.coeffs[: N + 1] - other.coeffs[: N + 1])))


def series_add(a, b):
    return a + b


def series_mul(a, b):
    return a * b


def series_invert(a):
    return a.invert()


def series_sqrt(a):
    return a.sqrt()


def series_differentiate(a):
    return a.differentiate()


def series_compose(outer, inner):
    return outer.compose(inner)


def series_reversion(a):
    return a.reversion()


def cauchy_coefficients(fn, lo: int, hi: int, radius: float = 0.5, points: int = 64) -> np.ndarray:
    """Laurent coefficients c_lo..c_hi of ``fn`` about 0 from samples on |z| = radius.

    ``fn`` must accept a complex array.  Aliasing error is of relative size
    (radius / R)^points where R is the distance to the nearest singularity.
    """
    if hi - lo >= points:
        raise ValueError("need more sample points than requested coefficients")
    z = radius * np.exp(2j * np.pi * np.arange(points) / points)
    vals = np.asarray(fn(z))
    fhat = np.fft.fft(vals, axis=0) / points
    ks = np.arange(lo, hi + 1)
    out = fhat[ks % points] / (radius ** ks).reshape((-1,) + (1,) * (vals.ndim - 1))
    return out


def taylor_series(fn, N: int, radius: float = 0.5, points: int = 64, real: bool = True) -> TruncatedSeries:
    c = cauchy_coefficients(fn, 0, N, radius, points)
    return TruncatedSeries(c.real if real else c)
