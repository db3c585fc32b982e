"""Capped-absolute p-adic numbers with per-element precision tracking.

A :class:`PadicElement` stores ``p^v * u + O(p^N)`` with ``u`` a unit reduced
modulo ``p^(N - v)``.  An element with no known nonzero digit is
*indistinguishable from zero* and is kept distinct from the exact zero
(``N = inf``).  Comparing against an indistinguishable zero raises
:class:`PrecisionError` instead of answering.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INF = math.inf
_EXACT_COERCION_DIGITS = 64


class PadicError(ArithmeticError):
    """Base class for p-adic arithmetic failures."""


class PrecisionError(PadicError):
    """Raised when the tracked precision is insufficient to answer."""


class ContextMismatch(PadicError):
    """Operands live in different primes."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def valuation(n: int, p: int) -> int | float:
    """p-adic valuation of an integer (``inf`` for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def rational_valuation(q, p: int) -> int | float:
    q = Fraction(q)
    if q == 0:
        return INF
    return valuation(q.numerator, p) - valuation(q.denominator, p)


@dataclass(frozen=True)
class PadicContext:
    """A prime ``p`` together with a default absolute precision ``N``."""

    p: int
    working_precision: int

    def __post_init__(self):
        if not is_prime(self.p) or self.p == 2:
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.working_precision < 1:
            raise ValueError("working precision must be positive")

    def __call__(self, value, prec: int | None = None) -> "PadicElement":
        return PadicElement.from_rational(value, self.p, self.working_precision if prec is None else prec)

    def zero(self) -> "PadicElement":
        return PadicElement(self.p, 0, 0, INF)

    def one(self) -> "PadicElement":
        return PadicElement(self.p, 0, 1, INF)


class PadicElement:
    """Immutable element ``p^valuation * unit + O(p^abs_precision)`` of Q_p."""

    __slots__ = ("p", "_v", "_u", "_N")

    def __init__(self, p: int, v: int, u: int, N):
        # internal constructor; use from_rational / normalize helpers publicly
        self.p = p
        self._v = v
        self._u = u
        self._N = N

    # -- construction -------------------------------------------------
    @classmethod
    def _make(cls, p: int, rep: int, shift: int, N) -> "PadicElement":
        """Build from ``rep * p^shift`` known modulo ``p^N`` (N may be inf)."""
        if rep == 0:
            return cls(p, 0, 0, N)
        v = shift
        while rep % p == 0:
            rep //= p
            v += 1
        if N != INF:
            if v >= N:
                return cls(p, 0, 0, N)
            rep %= p ** (N - v)
        return cls(p, v, rep, N)

    @classmethod
    def from_rational(cls, q, p: int, prec) -> "PadicElement":
        """Embed an exact rational with absolute precision ``prec``.

        Integers are exact when ``prec`` is ``inf``; other rationals need a
        finite precision because their expansion does not terminate.
        """
        q = Fraction(q)
        if q == 0:
            return cls(p, 0, 0, prec)
        num, den = q.numerator, q.denominator
        vn = valuation(num, p)
        vd = valuation(den, p)
        num //= p**vn
        den //= p**vd
        v = vn - vd
        if prec == INF:
            if den != 1:
                raise PrecisionError("non-integral unit part needs finite precision")
            return cls(p, v, num, INF)
        if v >= prec:
            return cls(p, 0, 0, prec)
        mod = p ** (prec - v)
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @classmethod
    def exact_zero(cls, p: int) -> "PadicElement":
        return cls(p, 0, 0, INF)

    # -- accessors ------------------------------------------------------
    @property
    def valuation(self):
        return INF if self._u == 0 else self._v

    @property
    def unit(self) -> int:
        return self._u

    @property
    def abs_precision(self):
        return self._N

    @property
    def rel_precision(self):
        if self._u == 0:
            return 0
        return self._N - self._v

    def is_exact_zero(self) -> bool:
        return self._u == 0 and self._N == INF

    def is_indistinguishable_from_zero(self) -> bool:
        return self._u == 0

    def is_zero(self) -> bool:
        """True for the exact zero; raises for an indistinguishable zero."""
        if self._u != 0:
            return False
        if self._N == INF:
            return True
        raise PrecisionError(f"value is O({self.p}^{self._N}); cannot decide equality with zero")

    def residue(self) -> int:
        """Reduction modulo p (requires valuation >= 0)."""
        if self._u == 0:
            if self._N < 1:
                raise PrecisionError("residue unknown")
            return 0
        if self._v < 0:
            raise ValueError("element is not integral")
        return self._u % self.p if self._v == 0 else 0

    def lift(self) -> int:
        """Canonical integer representative in [0, p^N) (requires v >= 0, N finite)."""
        if self._N == INF:
            if self._v < 0:
                raise ValueError("element is not integral")
            return self._u * self.p**self._v
        if self._u == 0:
            return 0
        if self._v < 0:
            raise ValueError("element is not integral")
        return (self._u * self.p**self._v) % self.p**self._N

    def rational_rep(self) -> Fraction:
        """``unit * p^v`` as an exact rational (the canonical representative)."""
        if self._u == 0:
            return Fraction(0)
        return Fraction(self._u) * Fraction(self.p) ** self._v

    def add_bigoh(self, N) -> "PadicElement":
        """Reduce the absolute precision to ``min(N, current)``."""
        N = min(N, self._N)
        if N == self._N:
            return self
        if self._u == 0 or self._v >= N:
            return PadicElement(self.p, 0, 0, N)
        return PadicElement(self.p, self._v, self._u % self.p ** (N - self._v), N)

    def digits(self) -> list[int]:
        """Base-p digits from p^v up to p^(N-1)."""
        if self._u == 0 or self._N == INF and self._u < 0:
            return []
        u = self._u
        n = (self._N - self._v) if self._N != INF else None
        out = []
        k = 0
        while (n is None and u) or (n is not None and k < n):
            out.append(u % self.p)
            u //= self.p
            k += 1
        return out

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "PadicElement":
        if isinstance(other, PadicElement):
            if other.p != self.p:
                raise ContextMismatch(f"primes {self.p} and {other.p} differ")
            return other
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q.denominator == 1:
                return PadicElement._make(self.p, q.numerator, 0, INF)
            vq = rational_valuation(q, self.p)
            # enough digits that the constant never limits the result
            if self._N == INF:
                prec = vq + _EXACT_COERCION_DIGITS
            else:
                prec = max(self._N, vq + self.rel_precision)
            return PadicElement.from_rational(q, self.p, prec)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __neg__(self):
        if self._u == 0:
            return self
        if self._N == INF:
            return PadicElement(self.p, self._v, -self._u, INF)
        return PadicElement(self.p, self._v, (-self._u) % self.p ** (self._N - self._v), self._N)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        N = min(self._N, other._N)
        if self._u == 0:
            return other.add_bigoh(N)
        if other._u == 0:
            return self.add_bigoh(N)
        e = min(self._v, other._v)
        rep = self._u * p ** (self._v - e) + other._u * p ** (other._v - e)
        return PadicElement._make(p, rep, e, N)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        va = self._v if self._u else self._N
        vb = other._v if other._u else other._N
        N = min(self._N + vb, other._N + va)
        if self._u == 0 or other._u == 0:
            return PadicElement(p, 0, 0, N)
        return PadicElement._make(p, self._u * other._u, self._v + other._v, N)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._N == INF and self._N != INF and self._u:
            return self * other.inverse(self.rel_precision)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def inverse(self, rel: int | None = None) -> "PadicElement":
        if self._u == 0:
            if self._N == INF:
                raise ZeroDivisionError("division by exact zero")
            raise PrecisionError(f"division by O({self.p}^{self._N})")
        p = self.p
        if self._N == INF:
            if abs(self._u) == 1:
                return PadicElement(p, -self._v, self._u, INF)
            r = _EXACT_COERCION_DIGITS if rel is None else rel
            return PadicElement(p, -self._v, pow(self._u, -1, p**r), r - self._v)
        r = self._N - self._v
        mod = p**r
        return PadicElement(p, -self._v, pow(self._u, -1, mod), r - self._v)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicElement(self.p, 0, 1, INF)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except ContextMismatch:
            return False
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.p, self._v, self._u, self._N))

    def equals(self, other, prec=None) -> bool:
        """Agreement modulo ``p^prec`` (default: the joint precision)."""
        other = self._coerce(other)
        d = self - other
        if prec is not None:
            if d.abs_precision < prec:
                raise PrecisionError("not enough precision for the requested comparison")
            return d._u == 0 or d._v >= prec
        return d._u == 0

    def identical(self, other: "PadicElement") -> bool:
        """Same digits and same precision (structural equality)."""
        return (self.p, self._v if self._u else 0, self._u, self._N) == (other.p, other._v if other._u else 0, other._u, other._N)

    # -- serialisation ----------------------------------------------------
    def __repr__(self):
        return str(self)

    def __str__(self):
        p = self.p
        big = "" if self._N == INF else f" + O({p}^{self._N})"
        if self._u == 0:
            return "0" if self._N == INF else f"O({p}^{self._N})"
        return f"{self._u}*{p}^{self._v}{big}"

    def series_str(self) -> str:
        """Human readable digit expansion, e.g. ``2*3^-1 + 1 + 3 + O(3^7)``."""
        p = self.p
        terms = []
        for k, d in enumerate(self.digits()):
            if d == 0:
                continue
            e = self._v + k
            mono = "1" if e == 0 else (f"{p}" if e == 1 else f"{p}^{e}")
            if e == 0:
                terms.append(f"{d}")
            else:
                terms.append(mono if d == 1 else f"{d}*{mono}")
        if self._N != INF:
            terms.append(f"O({p}^{self._N})")
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "valuation": None if self._u == 0 else self._v,
            "unit": self._u,
            "abs_precision": None if self._N == INF else self._N,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PadicElement":
        N = INF if obj["abs_precision"] is None else obj["abs_precision"]
        if obj["valuation"] is None:
            return cls(obj["p"], 0, 0, N)
        return cls(obj["p"], obj["valuation"], obj["unit"], N)

    _STR_RE = re.compile(r"^\s*(-?\d+)\*(\d+)\^(-?\d+)(?:\s*\+\s*O\((\d+)\^(-?\d+)\))?\s*$")
    _ZERO_RE = re.compile(r"^\s*O\((\d+)\^(-?\d+)\)\s*$")

    @classmethod
    def parse(cls, text: str) -> "PadicElement":
        """Inverse of ``str``: ``s*p^v + O(p^m)``, ``O(p^m)`` or ``0``."""
        if text.strip() == "0":
            raise ValueError("the prime of an exact zero is ambiguous; use from_json")
        m = cls._ZERO_RE.match(text)
        if m:
            return cls(int(m.group(1)), 0, 0, int(m.group(2)))
        m = cls._STR_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse p-adic string {text!r}")
        u, p, v = int(m.group(1)), int(m.group(2)), int(m.group(3))
        N = INF if m.group(4) is None else int(m.group(5))
        if m.group(4) is not None and int(m.group(4)) != p:
            raise ValueError("inconsistent primes")
        return cls._make(p, u, v, N)


# ---------------------------------------------------------------------------
# analytic helpers


def sqrt(a: PadicElement, residue: int) -> PadicElement:
    """Square root whose leading unit digit is ``residue`` modulo p.

    Requires even valuation and a quadratic-residue unit; Newton iteration
    doubles the number of correct digits per step.
    """
    p = a.p
    if a.is_indistinguishable_from_zero():
        if a.is_exact_zero():
            return a
        raise PrecisionError("square root of an indistinguishable zero")
    v = a.valuation
    if v % 2:
        raise ValueError("odd valuation has no square root in Q_p")
    u = a.unit
    r0 = residue % p
    if r0 == 0 or (r0 * r0 - u) % p:
        raise ValueError(f"{residue} is not a square root of the unit mod {p}")
    if a.abs_precision == INF:
        raise PrecisionError("square root of an exact element needs finite precision")
    rel = a.abs_precision - v
    mod = p**rel
    r = r0
    k = 1
    while k < rel:
        k = min(2 * k, rel)
        m = p**k
        r = (r - (r * r - u) * pow(2 * r, -1, m)) % m
    return PadicElement(p, v // 2, r % mod, v // 2 + rel)


def teichmuller(a: PadicElement, prec: int | None = None) -> PadicElement:
    """The (p-1)-th root of unity congruent to ``a`` modulo p."""
    p = a.p
    if a.is_indistinguishable_from_zero() or a.valuation != 0:
        raise ValueError("teichmuller lift needs a unit")
    if prec is None:
        prec = a.abs_precision
    if prec == INF:
        raise PrecisionError("teichmuller lift needs a finite precision")
    mod = p**prec
    r = a.unit % p
    # x -> x^p converges one digit per step; Newton on x^(p-1) = 1 is quadratic
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        m = p**k
        r = (r - (pow(r, p - 1, m) - 1) * pow((p - 1) * pow(r, p - 2, m), -1, m)) % m
    return PadicElement(p, 0, r % mod, prec)


def log(a: PadicElement) -> PadicElement:
    """Iwasawa logarithm (branch with log p = 0)."""
    p = a.p
    if a.is_indistinguishable_from_zero():
        raise PrecisionError("log of an indistinguishable zero")
    w = PadicElement(p, 0, a.unit, a.abs_precision - a.valuation)
    N = w.abs_precision
    z = w ** (p - 1) - 1  # valuation >= 1
    if z.is_indistinguishable_from_zero():
        return PadicElement(p, 0, 0, N)
    # sum z^k/k until the terms drop below the precision
    total = PadicElement(p, 0, 0, INF)
    term = z
    k = 1
    vz = z.valuation
    while True:
        if k * vz - valuation(k, p) >= N + 1 and k > 1:
            break
        t = term / k
        total = total + (t if k % 2 else -t)
        term = term * z
        k += 1
    return (total / (p - 1)).add_bigoh(N)


# ---------------------------------------------------------------------------
# matrices


class PadicMatrix:
    """Rectangular grid of :class:`PadicElement` with individual precisions."""

    def __init__(self, rows: Sequence[Sequence[PadicElement]]):
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix must be rectangular and nonempty")
        self.rows = rows

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, n: int, p: int) -> "PadicMatrix":
        return cls([[PadicElement(p, 0, int(i == j), INF) for j in range(n)] for i in range(n)])

    @classmethod
    def from_rationals(cls, rows, p: int, prec) -> "PadicMatrix":
        return cls([[PadicElement.from_rational(q, p, prec) for q in r] for r in rows])

    @classmethod
    def column(cls, entries: Iterable[PadicElement]) -> "PadicMatrix":
        return cls([[e] for e in entries])

    def transpose(self) -> "PadicMatrix":
        return PadicMatrix([list(c) for c in zip(*self.rows)])

    def __matmul__(self, other: "PadicMatrix") -> "PadicMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        out = []
        for r in self.rows:
            row = []
            for j in range(other.ncols):
                acc = r[0] * other.rows[0][j]
                for k in range(1, self.ncols):
                    acc = acc + r[k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return PadicMatrix(out)

    def __sub__(self, other):
        return PadicMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __add__(self, other):
        return PadicMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def trace(self) -> PadicElement:
        acc = self.rows[0][0]
        for i in range(1, min(self.nrows, self.ncols)):
            acc = acc + self.rows[i][i]
        return acc

    def determinant(self) -> PadicElement:
        n = self.nrows
        if n != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self.rows]
        det = PadicElement(a[0][0].p, 0, 1, INF)
        for c in range(n):
            piv = _pivot(a, c, c)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            pv = a[c][c]
            if pv.is_indistinguishable_from_zero():
                return det * pv
            det = det * pv
            inv = pv.inverse()
            for r in range(c + 1, n):
                if a[r][c].is_indistinguishable_from_zero():
                    continue
                m = a[r][c] * inv
                for k in range(c, n):
                    a[r][k] = a[r][k] - m * a[c][k]
        return det

    def charpoly(self) -> list[PadicElement]:
        """Coefficients c_0..c_n of det(t I - A) (Faddeev-LeVerrier)."""
        n = self.nrows
        p = self.rows[0][0].p
        ident = PadicMatrix.identity(n, p)
        coeffs = [None] * (n + 1)
        coeffs[n] = PadicElement(p, 0, 1, INF)
        Mk = PadicMatrix([[PadicElement(p, 0, 0, INF)] * n for _ in range(n)])
        for k in range(1, n + 1):
            Mk = self @ Mk + _scale(ident, coeffs[n - k + 1])
            ck = -(self @ Mk).trace() / k
            coeffs[n - k] = ck
        return coeffs

    def min_precision(self):
        return min(e.abs_precision for r in self.rows for e in r)

    def __repr__(self):
        return "PadicMatrix(" + repr(self.rows) + ")"


def _scale(m: PadicMatrix, c: PadicElement) -> PadicMatrix:
    return PadicMatrix([[c * e for e in r] for r in m.rows])


def _pivot(a, col: int, start: int) -> int:
    best, bv = start, INF
    for r in range(start, len(a)):
        e = a[r][col]
        v = e.valuation
        if v < bv:
            best, bv = r, v
    return best


def solve_linear(A: PadicMatrix, rhs: PadicMatrix) -> PadicMatrix:
    """Solve ``A x = rhs`` by Gaussian elimination with minimal-valuation pivots.

    Precision is tracked element by element, so the output precision reflects
    the valuations of the pivots actually used.
    """
    n = A.nrows
    if n != A.ncols or rhs.nrows != n:
        raise ValueError("solve_linear needs a square system")
    m = rhs.ncols
    a = [list(A.rows[i]) + list(rhs.rows[i]) for i in range(n)]
    for c in range(n):
        piv = _pivot(a, c, c)
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        if pv.is_indistinguishable_from_zero():
            raise PrecisionError(f"matrix is singular at working precision (pivot {pv})")
        inv = pv.inverse()
        a[c] = [e * inv for e in a[c]]
        for r in range(n):
            if r == c or a[r][c].is_exact_zero():
                continue
            f = a[r][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return PadicMatrix([row[n:] for row in a])


def padic_json_dumps(obj) -> str:
    def enc(o):
        if isinstance(o, PadicElement):
            return o.to_json()
        raise TypeError(type(o))

    return json.dumps(obj, default=enc, sort_keys=True)
