"""Truncated power and Laurent series with complex coefficients.

A :class:`TruncatedSeries` stores the coefficients of a series on a dense
exponent window ``lo, lo+1, ..., trunc-1``.  Every coefficient at an exponent
``>= trunc`` is *unknown*, not zero, and arithmetic propagates this
uncertainty pessimistically: a result never reports a coefficient that could
have been contaminated by an unknown tail of either operand.

    >>> z = TruncatedSeries([0, 1], trunc=6)
    >>> (1 + z) * (1 - z)
    TruncatedSeries(lo=0, trunc=6, coeffs=[1, 0, -1, 0, 0, 0])

The module-level functions :func:`log1p_series` and :func:`exp_series` only
rely on ``+``, ``*`` and :meth:`nilpotency_order`, so they also work for the
bivariate series of :mod:`riemscatter.grunsky`.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "TruncatedSeries",
    "mul",
    "quotient",
    "log1p_series",
    "exp_series",
    "compose",
    "reversion",
    "derivative",
]


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Finite window of a Laurent series.

    Parameters
    ----------
    coeffs : array_like
        Coefficients for exponents ``lo, lo+1, ...``.
    lo : int
        Lowest stored exponent.
    trunc : int, optional
        First unknown exponent.  Defaults to ``lo + len(coeffs)``; a larger
        value pads with (known) zeros, a smaller one discards the excess.
    """

    coeffs: np.ndarray
    lo: int = 0
    trunc: int | None = None

    # keep numpy scalars from broadcasting over the series
    __array_ufunc__ = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).ravel()
        trunc = self.lo + len(c) if self.trunc is None else int(self.trunc)
        n = max(trunc - self.lo, 0)
        if len(c) < n:
            c = np.concatenate([c, np.zeros(n - len(c), dtype=complex)])
        c = c[:n].copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "trunc", trunc)

    # -- construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, value, trunc: int) -> "TruncatedSeries":
        return cls([value], lo=0, trunc=trunc)

    @classmethod
    def monomial(cls, k: int, trunc: int, value=1.0) -> "TruncatedSeries":
        return cls([value], lo=k, trunc=trunc)

    # -- inspection -------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        vals = [complex(v) for v in self.coeffs]
        shown = [
            (int(v.real) if v.real.is_integer() else v.real) if v.imag == 0 else v
            for v in vals
        ]
        return f"TruncatedSeries(lo={self.lo}, trunc={self.trunc}, coeffs={shown})"

    def coeff(self, k: int) -> complex:
        """Coefficient of ``z**k``; raises for unknown exponents."""
        if k >= self.trunc:
            raise IndexError(f"exponent {k} is beyond the truncation {self.trunc}")
        if k < self.lo:
            return 0j
        return complex(self.coeffs[k - self.lo])

    def dense(self, n: int | None = None) -> np.ndarray:
        """Coefficients for exponents ``0..n-1`` (power series only)."""
        if self.lo < 0:
            raise ValueError("dense() needs a power series (lo >= 0)")
        n = self.trunc if n is None else n
        if n > self.trunc:
            raise IndexError(f"requested {n} coefficients, only {self.trunc} known")
        out = np.zeros(n, dtype=complex)
        stop = max(min(n, self.trunc) - self.lo, 0)
        out[self.lo : self.lo + stop] = self.coeffs[:stop]
        return out

    @property
    def constant_term(self) -> complex:
        if self.lo > 0 or self.trunc <= 0:
            return 0j
        return complex(self.coeffs[-self.lo])

    @property
    def valuation(self) -> int:
        """Smallest exponent with a nonzero stored coefficient (``trunc`` if none)."""
        nz = np.flatnonzero(self.coeffs)
        return self.lo + int(nz[0]) if len(nz) else self.trunc

    def nilpotency_order(self) -> int:
        """Smallest ``K`` with ``self**K`` vanishing inside the truncation window."""
        v = self.valuation
        if v <= 0:
            raise ValueError("series with a nonzero term at exponent <= 0 is not nilpotent")
        return -(-self.trunc // v)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        val = np.polyval(self.coeffs[::-1], x) if len(self.coeffs) else np.zeros_like(x)
        return val * x**self.lo if self.lo else val

    # -- arithmetic -----------------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, Number):
            # exact constant: never limits precision
            return TruncatedSeries([other], lo=0, trunc=max(self.trunc, 1))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        lo = min(self.lo, other.lo)
        trunc = min(self.trunc, other.trunc)
        out = np.zeros(max(trunc - lo, 0), dtype=complex)
        for s in (self, other):
            k = max(min(trunc, s.trunc) - s.lo, 0)
            out[s.lo - lo : s.lo - lo + k] += s.coeffs[:k]
        return TruncatedSeries(out, lo=lo, trunc=trunc)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs, lo=self.lo, trunc=self.trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return TruncatedSeries(self.coeffs * other, lo=self.lo, trunc=self.trunc)
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return TruncatedSeries(self.coeffs / other, lo=self.lo, trunc=self.trunc)
        if isinstance(other, TruncatedSeries):
            return quotient(self, other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return quotient(self._coerce(other), self)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return (1 / self) ** (-k)
        result = TruncatedSeries([1.0], lo=0, trunc=self.trunc)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def deriv(self) -> "TruncatedSeries":
        return derivative(self)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product.

    The result is known up to ``min(a.trunc + b.lo, b.trunc + a.lo)`` and
    never beyond the truncation of the less precise operand.
    """
    lo = a.lo + b.lo
    trunc = min(a.trunc + b.lo, b.trunc + a.lo, a.trunc, b.trunc)
    n = max(trunc - lo, 0)
    if n == 0 or len(a) == 0 or len(b) == 0:
        return TruncatedSeries(np.zeros(n), lo=lo, trunc=trunc)
    prod = np.convolve(a.coeffs[:n], b.coeffs[:n])[:n]
    return TruncatedSeries(prod, lo=lo, trunc=trunc)


def _reciprocal(b: TruncatedSeries) -> TruncatedSeries:
    v = b.valuation
    if v >= b.trunc:
        raise ZeroDivisionError("series has no known nonzero coefficient")
    c = b.coeffs[v - b.lo :]
    n = len(c)
    impulse = np.zeros(n, dtype=complex)
    impulse[0] = 1.0
    # impulse response of 1/c(z) is the reciprocal series
    r = lfilter([1.0], c, impulse)
    return TruncatedSeries(r, lo=-v, trunc=n - v)


def quotient(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """``a / b``; ``b`` needs a nonzero coefficient inside its window."""
    return mul(a, _reciprocal(b))


def log1p_series(a):
    """``log(1 + a)`` for a series ``a`` with zero constant term.

    Works for any series type implementing ``+``, ``*``, ``constant_term`` and
    ``nilpotency_order()``.
    """
    if a.constant_term != 0:
        raise ValueError("log1p_series needs a zero constant term")
    K = a.nilpotency_order()
    if K <= 1:
        return a * 0.0
    acc = a * 0.0 + (-1) ** K / (K - 1)
    for k in range(K - 2, 0, -1):
        acc = a * acc + (-1) ** (k + 1) / k
    return a * acc


def exp_series(a):
    """``exp(a)`` for a series ``a`` with zero constant term."""
    if a.constant_term != 0:
        raise ValueError("exp_series needs a zero constant term")
    K = a.nilpotency_order()
    acc = a * 0.0 + 1.0
    for k in range(K - 1, 0, -1):
        acc = (a * acc) * (1.0 / k) + 1.0
    return acc


def compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """``outer(inner(z))`` by Horner's rule.

    ``outer`` must be a power series (``lo >= 0``).  Unless ``outer`` is a
    constant, ``inner`` needs a zero constant term.
    """
    if outer.lo < 0:
        raise ValueError("compose needs a power series as the outer function")
    c = outer.dense()
    nz = np.flatnonzero(c)
    last = int(nz[-1]) if len(nz) else 0
    if last == 0:
        return TruncatedSeries([c[0] if len(c) else 0.0], lo=0, trunc=outer.trunc)
    if inner.constant_term != 0:
        raise ValueError("inner series must have a zero constant term")
    trunc = min(outer.trunc, inner.trunc)
    acc = TruncatedSeries([c[last]], lo=0, trunc=trunc)
    for k in range(last - 1, -1, -1):
        acc = inner * acc + c[k]
    return acc


def derivative(a: TruncatedSeries) -> TruncatedSeries:
    ks = np.arange(a.lo, a.trunc)
    d = a.coeffs * ks
    if a.lo == 0:
        return TruncatedSeries(d[1:], lo=0, trunc=a.trunc - 1)
    return TruncatedSeries(d, lo=a.lo - 1, trunc=a.trunc - 1)


def _compose_raw(c: np.ndarray, g: np.ndarray, n: int) -> np.ndarray:
    """Coefficients of ``sum c_k g**k`` modulo ``z**n`` (``g[0] == 0``)."""
    acc = np.zeros(n, dtype=complex)
    acc[0] = c[-1]
    for ck in c[-2::-1]:
        acc = np.convolve(g[:n], acc)[:n]
        acc[0] += ck
    return acc


def reversion(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse ``g`` with ``f(g(z)) = z`` to the available order.

    Newton iteration on raw coefficient arrays.  The correction
    ``(f(g) - z) / f'(g)`` starts at order >= 2, so the one-term precision loss
    of ``f'`` does not reach the result and the full truncation is kept.
    """
    if f.lo < 0:
        raise ValueError("reversion needs a power series")
    T = f.trunc
    c = f.dense()
    if T < 2 or c[0] != 0:
        raise ValueError("reversion needs f(0) = 0")
    if c[1] == 0:
        raise ValueError("reversion needs a nonzero linear coefficient")
    dc = (c * np.arange(T))[1:]
    g = np.zeros(T, dtype=complex)
    g[1] = 1.0 / c[1]
    ident = np.zeros(T, dtype=complex)
    ident[1] = 1.0
    for _ in range(int(np.ceil(np.log2(T))) + 2):
        resid = _compose_raw(c, g, T) - ident
        dfg = _compose_raw(dc, g, T)
        g = g - np.convolve(resid, _reciprocal(TruncatedSeries(dfg)).dense(T))[:T]
    return TruncatedSeries(g, lo=0, trunc=T)
