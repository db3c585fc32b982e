"""Truncated power and Laurent series.

Coefficients may be :class:`fractions.Fraction`, :class:`int` or
:class:`~qchabauty.padic.PadicElement`; the class only needs ring operations
plus division by integers.  A series stores a dense coefficient list starting
at ``min_exponent`` and a truncation order ``prec`` (terms of exponent
``>= prec`` are unknown; ``prec = inf`` means an exact Laurent polynomial).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

INF = math.inf


class SeriesError(ArithmeticError):
    pass


def _is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_indistinguishable_from_zero()


def _is_exact_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_exact_zero()


class TruncatedSeries:
    """Immutable truncated Laurent series ``sum c_k t^k + O(t^prec)``."""

    __slots__ = ("coeffs", "min_exponent", "prec")

    def __init__(self, coeffs: Sequence, min_exponent: int = 0, prec=INF):
        coeffs = list(coeffs)
        if prec != INF:
            keep = max(0, prec - min_exponent)
            coeffs = coeffs[:keep]
        self.coeffs = coeffs
        self.min_exponent = min_exponent
        self.prec = prec

    # -- constructors --------------------------------------------------
    @classmethod
    def from_dict(cls, terms: dict, prec=INF, zero=0) -> "TruncatedSeries":
        if not terms:
            return cls([], 0, prec)
        lo = min(terms)
        hi = max(terms)
        return cls([terms.get(k, zero) for k in range(lo, hi + 1)], lo, prec)

    @classmethod
    def monomial(cls, c, k: int, prec=INF) -> "TruncatedSeries":
        return cls([c], k, prec)

    @classmethod
    def zero(cls, prec=INF) -> "TruncatedSeries":
        return cls([], 0, prec)

    # -- basic access --------------------------------------------------
    def __getitem__(self, k: int):
        if self.prec != INF and k >= self.prec:
            raise SeriesError(f"coefficient of t^{k} is beyond the truncation order {self.prec}")
        i = k - self.min_exponent
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    @property
    def max_exponent(self) -> int:
        return self.min_exponent + len(self.coeffs) - 1

    def terms(self):
        for i, c in enumerate(self.coeffs):
            if not _is_exact_zero(c):
                yield self.min_exponent + i, c

    def valuation(self):
        """Exponent of the first coefficient not indistinguishable from zero."""
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return self.min_exponent + i
        return self.prec

    def normalized(self) -> "TruncatedSeries":
        """Drop exactly-zero coefficients at both ends."""
        c = self.coeffs
        lo, hi = 0, len(c)
        while lo < hi and _is_exact_zero(c[lo]):
            lo += 1
        while hi > lo and _is_exact_zero(c[hi - 1]):
            hi -= 1
        if lo == hi:
            return TruncatedSeries([], 0, self.prec)
        return TruncatedSeries(c[lo:hi], self.min_exponent + lo, self.prec)

    def truncate(self, prec) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, self.min_exponent, min(prec, self.prec))

    def map(self, fn: Callable) -> "TruncatedSeries":
        return TruncatedSeries([fn(c) for c in self.coeffs], self.min_exponent, self.prec)

    def as_dict(self) -> dict:
        return dict(self.terms())

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries([other], 0, INF)

    def __add__(self, other):
        other = self._coerce(other)
        prec = min(self.prec, other.prec)
        lo = min(self.min_exponent if self.coeffs else INF, other.min_exponent if other.coeffs else INF)
        if lo == INF:
            return TruncatedSeries([], 0, prec)
        hi = max(self.max_exponent, other.max_exponent)
        if prec != INF:
            hi = min(hi, prec - 1)
        out = []
        for k in range(lo, hi + 1):
            a = self._get(k)
            b = other._get(k)
            if a is None:
                out.append(0 if b is None else b)
            elif b is None:
                out.append(a)
            else:
                out.append(a + b)
        return TruncatedSeries(out, lo, prec)

    def _get(self, k):
        i = k - self.min_exponent
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return None

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.min_exponent, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def scale(self, c) -> "TruncatedSeries":
        return TruncatedSeries([c * a for a in self.coeffs], self.min_exponent, self.prec)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            # zero times something: precision is governed by the other's order
            prec = min(self.prec + (other.valuation() if other.coeffs else other.prec),
                       other.prec + (self.valuation() if self.coeffs else self.prec))
            return TruncatedSeries([], 0, prec)
        va = self.min_exponent
        vb = other.min_exponent
        prec = min(self.prec + vb, other.prec + va)
        lo = va + vb
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec != INF:
            n = min(n, prec - lo)
        if n <= 0:
            return TruncatedSeries([], 0, prec)
        out = [0] * n
        a, b = self.coeffs, other.coeffs
        for i, ca in enumerate(a):
            if i >= n:
                break
            if _is_exact_zero(ca):
                continue
            lim = min(len(b), n - i)
            for j in range(lim):
                cb = b[j]
                if _is_exact_zero(cb):
                    continue
                out[i + j] = out[i + j] + ca * cb
        return TruncatedSeries(out, lo, prec)

    def __rmul__(self, other):
        return self.scale(other)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``t^k``."""
        return TruncatedSeries(self.coeffs, self.min_exponent + k, self.prec + k)

    def inverse(self, prec=None) -> "TruncatedSeries":
        """Multiplicative inverse; needs a leading coefficient that is invertible."""
        s = self.normalized()
        if not s.coeffs:
            raise SeriesError("inverse of a zero series")
        v = s.min_exponent
        if prec is None:
            prec = s.prec - 2 * v if s.prec != INF else None
        if prec is None:
            raise SeriesError("inverse of an exact polynomial needs an explicit truncation order")
        rel = prec + v  # number of terms needed in the unit part
        unit = s.coeffs
        c0inv = _inv(unit[0])
        out = []
        for k in range(max(rel, 0)):
            acc = 1 if k == 0 else 0
            for j in range(1, min(k, len(unit) - 1) + 1):
                acc = acc - unit[j] * out[k - j]
            out.append(acc * c0inv)
        return TruncatedSeries(out, -v, prec)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse(None if other.prec != INF or self.prec == INF else self.prec - other.normalized().min_exponent)
        return self.scale(_inv(other))

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = TruncatedSeries([1], 0, INF)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- calculus --------------------------------------------------------
    def derivative(self) -> "TruncatedSeries":
        out = [c * k for k, c in ((self.min_exponent + i, c) for i, c in enumerate(self.coeffs))]
        return TruncatedSeries(out, self.min_exponent - 1, self.prec - 1).normalized()

    def residue(self):
        """Coefficient of ``t^-1``."""
        return self._get(-1) or 0

    def formal_integrate(self) -> "TruncatedSeries":
        """Termwise antiderivative with zero constant term; rejects a t^-1 term."""
        r = self._get(-1)
        if r is not None and not _is_exact_zero(r):
            if not _is_zero(r):
                raise SeriesError("formal integration of a series with a nonzero t^-1 coefficient")
        out = {}
        for i, c in enumerate(self.coeffs):
            k = self.min_exponent + i
            if k == -1:
                continue
            out[k + 1] = Fraction(c, k + 1) if isinstance(c, int) else c / (k + 1)
        if not out:
            return TruncatedSeries([], 0, self.prec + 1)
        lo, hi = min(out), max(out)
        return TruncatedSeries([out.get(k, 0) for k in range(lo, hi + 1)], lo, self.prec + 1)

    def tail_section(self) -> "TruncatedSeries":
        """The part of exponent ``<= -2`` (an exact Laurent polynomial)."""
        terms = {k: c for k, c in self.terms() if k <= -2}
        return TruncatedSeries.from_dict(terms)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(t))`` for a power series ``self`` and ``inner`` with ``v >= 1``."""
        inner_n = inner.normalized()
        if inner_n.coeffs and inner_n.min_exponent < 1:
            raise SeriesError("compose needs an inner series without constant term")
        if self.min_exponent < 0 and any(not _is_exact_zero(c) for k, c in self.terms() if k < 0):
            raise SeriesError("compose of a Laurent series is not supported")
        w = inner_n.min_exponent if inner_n.coeffs else inner.prec
        prec = INF
        if self.prec != INF:
            prec = min(prec, self.prec * w)
        if inner.prec != INF:
            prec = min(prec, inner.prec)
        # Horner's scheme
        out = TruncatedSeries([], 0, prec)
        hi = self.max_exponent
        for k in range(hi, -1, -1):
            out = out * inner + TruncatedSeries([self[k]], 0, INF)
            if prec != INF:
                out = out.truncate(prec)
        return out.truncate(prec)

    def __call__(self, t):
        """Evaluate at a scalar (Horner); the caller is responsible for convergence."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        if self.min_exponent:
            acc = acc * (t**self.min_exponent if self.min_exponent > 0 else _inv(t) ** (-self.min_exponent))
        return acc

    def sqrt(self, branch) -> "TruncatedSeries":
        """Square root whose leading coefficient is ``branch``."""
        s = self.normalized()
        if not s.coeffs:
            return s
        v = s.min_exponent
        if v % 2:
            raise SeriesError("odd leading exponent has no square root")
        lead = s.coeffs[0]
        if not _eq(branch * branch, lead):
            raise SeriesError("branch is not a square root of the leading coefficient")
        prec = s.prec
        if prec == INF:
            raise SeriesError("square root of an exact polynomial needs a truncation order")
        n = prec - v  # terms of the unit part known
        u = s.coeffs
        out = [branch]
        inv2b = _inv(branch * 2)
        for k in range(1, n):
            acc = u[k] if k < len(u) else 0
            for j in range(1, k):
                acc = acc - out[j] * out[k - j]
            out.append(acc * inv2b)
        return TruncatedSeries(out, v // 2, prec - v // 2)

    # -- equality and printing ---------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._coerce(other)
        d = self - other
        return all(_eq(c, 0) for c in d.coeffs)

    def __hash__(self):  # pragma: no cover - series are not meant as keys
        raise TypeError("TruncatedSeries is unhashable")

    def __repr__(self):
        parts = []
        for k, c in self.terms():
            if k == 0:
                parts.append(f"{c}")
            elif k == 1:
                parts.append(f"{c}*t")
            else:
                parts.append(f"{c}*t^{k}")
        if self.prec != INF:
            parts.append(f"O(t^{self.prec})")
        return " + ".join(parts) if parts else "0"


def _inv(c):
    if isinstance(c, int):
        return Fraction(1, c)
    if isinstance(c, Fraction):
        return 1 / c
    return c.inverse()


def _eq(a, b) -> bool:
    d = a - b
    if isinstance(d, (int, Fraction)):
        return d == 0
    return d.is_indistinguishable_from_zero()


def series_sqrt(s: TruncatedSeries, branch) -> TruncatedSeries:
    return s.sqrt(branch)


def formal_integrate(s: TruncatedSeries) -> TruncatedSeries:
    return s.formal_integrate()


def tail_section(s: TruncatedSeries) -> TruncatedSeries:
    return s.tail_section()


def polynomial_series(coeffs: Sequence, prec=INF) -> TruncatedSeries:
    """Series from a coefficient list ``[c_0, c_1, ...]``."""
    return TruncatedSeries(list(coeffs), 0, prec)
