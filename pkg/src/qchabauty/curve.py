"""Even-degree hyperelliptic curves y^2 = f(x), their points and residue disks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .padic import INF, PadicElement, PrecisionError, is_prime, rational_valuation, sqrt, teichmuller
from .series import TruncatedSeries


class BadReductionError(ValueError):
    """The model does not have good reduction at p."""


def _poly_eval(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _discriminant(f: Sequence[Fraction]) -> Fraction:
    """Discriminant via the resultant of f and f' (Sylvester determinant)."""
    n = len(f) - 1
    df = [i * f[i] for i in range(1, n + 1)]
    m = n - 1
    size = n + m
    rows = []
    for i in range(m):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = Fraction(c)
        rows.append(row)
    for i in range(n):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(df)):
            row[i + j] = Fraction(c)
        rows.append(row)
    det = _det(rows)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * det / f[-1]


def _det(rows):
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                m = a[r][c] / a[c][c]
                for k in range(c, n):
                    a[r][k] -= m * a[c][k]
    return det


class HyperellipticCurve:
    """The model y^2 = f(x) with f monic of even degree 2g+2.

    ``f`` is given low degree first with rational coefficients.
    """

    def __init__(self, f: Sequence, name: str | None = None):
        f = [Fraction(c) for c in f]
        while f and f[-1] == 0:
            f.pop()
        if len(f) < 5 or (len(f) - 1) % 2:
            raise ValueError("need an even-degree model of degree at least 4")
        if f[-1] != 1:
            raise ValueError("the model must be monic")
        self.f = tuple(f)
        self.degree = len(f) - 1
        self.g = (self.degree - 2) // 2
        self.disc = _discriminant(self.f)
        if self.disc == 0:
            raise ValueError("f has a repeated root")
        self.name = name

    # -- construction ---------------------------------------------------------
    @classmethod
    def kms(cls, a) -> "HyperellipticCurve":
        a = Fraction(a)
        c = cls([1, 0, a, 0, a, 0, 1], name=f"KMS(a={a})")
        c.kms_parameter = a
        return c

    @classmethod
    def from_json(cls, obj) -> "HyperellipticCurve":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "a" in obj:
            return cls.kms(Fraction(str(obj["a"])))
        return cls([Fraction(str(c)) for c in obj["f"]])

    def to_json(self) -> dict:
        a = getattr(self, "kms_parameter", None)
        if a is not None:
            return {"a": str(a)}
        return {"f": [str(c) for c in self.f]}

    @property
    def is_kms(self) -> bool:
        return getattr(self, "kms_parameter", None) is not None

    def __repr__(self):
        terms = " + ".join(f"{c}*x^{i}" for i, c in enumerate(self.f) if c)
        return f"HyperellipticCurve(y^2 = {terms})"

    # -- reduction --------------------------------------------------------------
    def has_good_reduction(self, p: int) -> bool:
        if any(rational_valuation(c, p) < 0 for c in self.f):
            return False
        return rational_valuation(self.disc, p) == 0

    def check_good_reduction(self, p: int) -> None:
        if not is_prime(p) or p == 2:
            raise ValueError(f"p must be an odd prime, got {p}")
        if not self.has_good_reduction(p):
            raise BadReductionError(f"{self!r} has bad reduction at p = {p}")

    def f_mod_p(self, p: int) -> list[int]:
        return [c.numerator * pow(c.denominator, -1, p) % p for c in self.f]

    def count_points_mod_p(self, p: int) -> int:
        """#X(F_p) by brute force, including both points at infinity."""
        fp = self.f_mod_p(p)
        squares = [0] * p
        for y in range(p):
            squares[y * y % p] += 1
        total = 2  # monic: both points at infinity are rational
        for x in range(p):
            total += squares[_poly_eval(fp, x) % p]
        return total

    def enumerate_disks(self, p: int) -> list["ResidueDisk"]:
        """All residue disks of X(Q_p), ordered affine by (x, y), then infinite."""
        self.check_good_reduction(p)
        fp = self.f_mod_p(p)
        disks = []
        for x in range(p):
            v = _poly_eval(fp, x) % p
            if v == 0:
                disks.append(ResidueDisk("weierstrass", p, x, 0))
                continue
            for y in range(1, p):
                if y * y % p == v:
                    disks.append(ResidueDisk("affine", p, x, y))
        disks.append(ResidueDisk("infinite", p, None, 1))
        disks.append(ResidueDisk("infinite", p, None, p - 1))
        return disks

    # -- evaluation -------------------------------------------------------------
    def f_at(self, x):
        return _poly_eval(self.f, x)

    def reversed_f(self) -> list[Fraction]:
        """Coefficients of u^(2g+2) f(1/u)."""
        return list(reversed(self.f))

    def contains(self, P: "CurvePoint") -> bool:
        if P.is_infinite:
            return True
        d = P.y * P.y - self.f_at(P.x)
        if isinstance(d, PadicElement):
            return d.is_indistinguishable_from_zero()
        return d == 0

    def point(self, x, y) -> "CurvePoint":
        P = CurvePoint("affine", _as_number(x), _as_number(y))
        if not self.contains(P):
            raise ValueError(f"{P} is not on {self!r}")
        return P

    def infinity(self, sign: int = 1) -> "CurvePoint":
        return CurvePoint("infinity_plus" if sign > 0 else "infinity_minus")

    def lift_x(self, x, residue: int, p: int, prec: int) -> "CurvePoint":
        """The point with given x whose y reduces to ``residue`` mod p."""
        if not isinstance(x, PadicElement):
            x = PadicElement.from_rational(x, p, prec)
        y = sqrt(self.f_at(x).add_bigoh(prec), residue)
        return CurvePoint("affine", x, y)

    # -- local coordinates ------------------------------------------------
    def residue_at_infinity(self, i: int) -> Fraction:
        """Residue at the plus point of omega_i = x^i dx/(2y)."""
        s = self.omega_at_infinity(i, self.degree + 2)
        return s.residue()

    def omega_at_infinity(self, i: int, order: int, sign: int = 1) -> TruncatedSeries:
        """omega_i / du at infinity (u = 1/x) up to O(u^order), exact rationals.

        At the plus point y u^(g+1) -> 1; there omega_i = -u^(g-1-i) du / (2 sqrt(f~(u))).
        """
        g = self.g
        rev = TruncatedSeries(self.reversed_f(), 0, order + i + 2)
        inv_root = rev.sqrt(Fraction(1)).inverse()
        return inv_root.shift(g - 1 - i).scale(Fraction(-sign, 2)).truncate(order)

    def cohomology_basis(self) -> "CohomologyBasisChange":
        """A basis eta_0..eta_(2g-1) of H^1_dR(X) inside span(omega_0..omega_2g)."""
        g = self.g
        n = 2 * g + 1
        if self.is_kms:
            a = self.kms_parameter
            rows = [[0] * n for _ in range(2 * g)]
            rows[0][0] = Fraction(1)
            rows[1][1] = Fraction(1)
            rows[2][2] = a
            rows[2][4] = Fraction(2)
            rows[3][3] = Fraction(1)
            return CohomologyBasisChange([[Fraction(c) for c in r] for r in rows])
        res = [self.residue_at_infinity(i) for i in range(n)]
        rows = []
        for i in range(g):
            r = [Fraction(0)] * n
            r[i] = Fraction(1)
            rows.append(r)
        # kernel of the residue map on span(omega_g .. omega_2g)
        pivot = max(j for j in range(g, n) if res[j] != 0)
        for j in range(g, n):
            if j == pivot:
                continue
            r = [Fraction(0)] * n
            r[j] = Fraction(1)
            r[pivot] = -res[j] / res[pivot]
            rows.append(r)
        return CohomologyBasisChange(rows)

    def local_expansion(self, center, order: int, p: int | None = None, prec: int | None = None):
        """(x(t), y(t)) around a point or disk centre, up to O(t^order).

        Affine non-Weierstrass: t = x - x0.  Weierstrass: t = y.  Infinite:
        t = u = 1/x.  Coefficients are exact when the centre is rational and
        p-adic otherwise.
        """
        if isinstance(center, ResidueDisk):
            center = center.center(self, prec if prec is not None else 20)
        P = center
        if P.is_infinite:
            sign = 1 if P.kind == "infinity_plus" else -1
            rev = TruncatedSeries(self.reversed_f(), 0, order + self.g + 1)
            root = rev.sqrt(Fraction(1)).scale(sign)
            x = TruncatedSeries([Fraction(1)], -1, INF)
            y = root.shift(-(self.g + 1)).truncate(order - self.g - 1)
            return x, y
        x0, y0 = P.x, P.y
        if _is_zero(y0):
            return self._weierstrass_expansion(x0, order)
        fx = TruncatedSeries([self._taylor_coeff(x0, k) for k in range(self.degree + 1)], 0, order)
        x = TruncatedSeries([x0, 1], 0, INF)
        return x, fx.sqrt(y0)

    def _taylor_coeff(self, x0, k: int):
        from math import comb

        acc = 0
        for i in range(len(self.f) - 1, k - 1, -1):
            acc = acc * x0 + self.f[i] * comb(i, k)
        return acc

    def _weierstrass_expansion(self, x0, order: int):
        # solve f(x0 + s) = t^2 for s = s(t) by fixed-point iteration on s = (t^2 - h(s)) / f'(x0)
        taylor = [self._taylor_coeff(x0, k) for k in range(self.degree + 1)]
        d1 = taylor[1]
        t2 = TruncatedSeries([1], 2, order)
        s = t2.scale(_inv(d1))
        for _ in range(order):
            hs = TruncatedSeries([], 0, order)
            pw = s
            for k in range(2, len(taylor)):
                pw = pw * s
                hs = hs + pw.scale(taylor[k])
            s_new = (t2 - hs).scale(_inv(d1))
            if s_new == s:
                break
            s = s_new
        x = s + TruncatedSeries([x0], 0, INF)
        y = TruncatedSeries([1], 1, INF)
        return x, y

    # -- KMS maps ---------------------------------------------------------------
    def kms_quotient_maps(self, P: "CurvePoint"):
        """Images of P under (x,y) -> (x^2, y) and (x,y) -> (x^-2, y x^-3)."""
        if not self.is_kms:
            raise ValueError("quotient maps exist only for the KMS family")
        if P.is_infinite:
            raise ValueError("quotient maps are evaluated on affine points")
        x, y = P.x, P.y
        first = (x * x, y)
        if _is_zero(x):
            raise ZeroDivisionError("f_2 is undefined at x = 0")
        second = (1 / (x * x), y / (x * x * x))
        return first, second

    def elliptic_quotient_contains(self, Q) -> bool:
        a = self.kms_parameter
        X, Y = Q
        d = Y * Y - (X**3 + a * X * X + a * X + 1)
        if isinstance(d, PadicElement):
            return d.is_indistinguishable_from_zero()
        return d == 0


def _inv(c):
    if isinstance(c, int):
        return Fraction(1, c)
    if isinstance(c, Fraction):
        return 1 / c
    return c.inverse()


def _is_zero(c) -> bool:
    if isinstance(c, PadicElement):
        return c.is_indistinguishable_from_zero()
    return c == 0


def _as_number(v):
    if isinstance(v, (PadicElement, Fraction)):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        if "^" in v or "O(" in v:
            return PadicElement.parse(v)
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as a coordinate")


@dataclass(frozen=True)
class CohomologyBasisChange:
    """Rows give eta_k in terms of omega_0..omega_2g (exact rationals)."""

    rows: list

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))


@dataclass(frozen=True, eq=False)
class CurvePoint:
    """A point of X over Q or Q_p.  ``kind`` is affine, infinity_plus or infinity_minus."""

    kind: str
    x: object = None
    y: object = None

    def __post_init__(self):
        if self.kind not in ("affine", "infinity_plus", "infinity_minus"):
            raise ValueError(f"unknown point kind {self.kind}")
        if self.kind == "affine" and (self.x is None or self.y is None):
            raise ValueError("affine points need coordinates")

    @property
    def is_infinite(self) -> bool:
        return self.kind != "affine"

    @property
    def is_exact(self) -> bool:
        return not self.is_infinite and isinstance(self.x, Fraction) and isinstance(self.y, Fraction)

    def involution(self) -> "CurvePoint":
        if self.kind == "infinity_plus":
            return CurvePoint("infinity_minus")
        if self.kind == "infinity_minus":
            return CurvePoint("infinity_plus")
        return CurvePoint("affine", self.x, -self.y)

    def padic(self, p: int, prec: int) -> "CurvePoint":
        """Coordinates embedded into Q_p."""
        if self.is_infinite:
            return self
        return CurvePoint("affine", _to_padic(self.x, p, prec), _to_padic(self.y, p, prec))

    def same_as(self, other: "CurvePoint") -> bool:
        if self.kind != other.kind:
            return False
        if self.is_infinite:
            return True
        return _num_eq(self.x, other.x) and _num_eq(self.y, other.y)

    def __eq__(self, other):
        return isinstance(other, CurvePoint) and self.same_as(other)

    def __hash__(self):
        return hash((self.kind, str(self.x), str(self.y)))

    def __repr__(self):
        if self.kind == "infinity_plus":
            return "inf+"
        if self.kind == "infinity_minus":
            return "inf-"
        return f"({self.x}, {self.y})"

    def to_json(self) -> dict:
        if self.is_infinite:
            return {"kind": self.kind}
        return {"x": str(self.x), "y": str(self.y)}

    @classmethod
    def from_json(cls, obj) -> "CurvePoint":
        if obj.get("kind", "affine") != "affine":
            return cls(obj["kind"])
        return cls("affine", _as_number(obj["x"]), _as_number(obj["y"]))

    @classmethod
    def parse(cls, text: str) -> "CurvePoint":
        """``"(x,y)"`` with rational entries, or ``inf+`` / ``inf-``."""
        t = text.strip().replace(" ", "")
        if t in ("inf+", "infinity_plus", "oo+"):
            return cls("infinity_plus")
        if t in ("inf-", "infinity_minus", "oo-"):
            return cls("infinity_minus")
        if not (t.startswith("(") and t.endswith(")")):
            raise ValueError(f"cannot parse point {text!r}")
        xs, ys = t[1:-1].split(",")
        return cls("affine", _as_number(xs), _as_number(ys))


def _to_padic(v, p, prec):
    if isinstance(v, PadicElement):
        return v
    return PadicElement.from_rational(v, p, prec)


def _num_eq(a, b) -> bool:
    if isinstance(a, PadicElement) or isinstance(b, PadicElement):
        if isinstance(a, PadicElement):
            return a.equals(b)
        return b.equals(a)
    return a == b


@dataclass(frozen=True)
class ResidueDisk:
    """A residue disk of X(Q_p).

    Affine and Weierstrass disks are labelled by (xbar, ybar); infinite disks
    by ybar = +1 or -1 (mod p), the reduction of y u^(g+1).
    """

    kind: str
    p: int
    xbar: int | None
    ybar: int

    @property
    def sign(self) -> int:
        if self.kind != "infinite":
            raise ValueError("only infinite disks have a sign")
        return 1 if self.ybar == 1 else -1

    def local_parameter_spec(self) -> str:
        return {"affine": "t = x - x0", "weierstrass": "t = y", "infinite": "t = 1/x"}[self.kind]

    def label(self) -> str:
        if self.kind == "infinite":
            return "inf+" if self.sign > 0 else "inf-"
        return f"({self.xbar},{self.ybar})"

    def involution(self) -> "ResidueDisk":
        if self.kind == "infinite":
            return ResidueDisk("infinite", self.p, None, self.p - self.ybar)
        return ResidueDisk(self.kind, self.p, self.xbar, (-self.ybar) % self.p)

    def center(self, curve: HyperellipticCurve, prec: int) -> CurvePoint:
        """The Teichmueller point of an affine disk, or the point at infinity."""
        p = self.p
        if self.kind == "infinite":
            return curve.infinity(self.sign)
        if self.xbar == 0:
            x = PadicElement(p, 0, 0, INF)
        else:
            x = teichmuller(PadicElement.from_rational(self.xbar, p, prec))
        fx = curve.f_at(x).add_bigoh(prec)
        if self.kind == "weierstrass":
            raise ValueError("Weierstrass disks have no Frobenius-fixed centre in this implementation")
        return CurvePoint("affine", x, sqrt(fx, self.ybar))

    def __str__(self):
        return self.label()


def reduce_mod_p(P: CurvePoint, curve: HyperellipticCurve, p: int) -> ResidueDisk:
    """The residue disk containing P."""
    if P.kind == "infinity_plus":
        return ResidueDisk("infinite", p, None, 1)
    if P.kind == "infinity_minus":
        return ResidueDisk("infinite", p, None, p - 1)
    vx = _val(P.x, p)
    if vx < 0:
        # y u^(g+1) = y / x^(g+1) reduces to +-1
        s = P.y / P.x ** (curve.g + 1)
        return ResidueDisk("infinite", p, None, _residue(s, p))
    if _val(P.y, p) < 0:
        raise ValueError("affine point with non-integral y")
    xb = _residue(P.x, p)
    yb = _residue(P.y, p)
    return ResidueDisk("weierstrass" if yb == 0 else "affine", p, xb, yb)


def _val(c, p):
    if isinstance(c, PadicElement):
        return c.valuation
    return rational_valuation(c, p)


def _residue(c, p) -> int:
    if isinstance(c, PadicElement):
        return c.residue()
    c = Fraction(c)
    return c.numerator * pow(c.denominator, -1, p) % p


def kms_curve(a) -> HyperellipticCurve:
    return HyperellipticCurve.kms(a)
