"""Single and double Coleman integrals on Y = X - {inf+, inf-}.

Conventions.  For the basis omega_i = x^i dx/(2y) the double integral
D_ij(P, Q) = int_P^Q omega_i omega_j has Q-derivative omega_i(Q) int_P^Q omega_j.
Hence, for a path P -> Q -> R,

    D(P, R) = D(P, Q) + D(Q, R) + I(Q, R)_i I(P, Q)_j,

reversal sends (I, D) to (-I, D^T), and D_ij + D_ji = I_i I_j.

Integrals between disk anchors come from the Frobenius structure
(phi-equivariance linear systems); integrals inside one disk come from local
expansions.  Affine anchors are Teichmueller points and are fixed by the
lift.  Infinite disks are anchored at the point with u = 1/x = p; there the
local differentials have poles and logarithmic terms, handled by
:class:`LogSeries` with the Iwasawa branch (log p = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .curve import CurvePoint, HyperellipticCurve, ResidueDisk, reduce_mod_p
from .frobenius import FrobeniusData, frobenius_matrix, log_loss
from .padic import INF, PadicElement, PadicMatrix, PrecisionError, log as padic_log, solve_linear
from .reduction import (
    bivariate_mul,
    differential_of,
    evaluate_levels,
    poly_add_into,
    raise_level,
)
from .series import SeriesError, TruncatedSeries


class WeierstrassDiskError(PrecisionError):
    """Double integrals on Weierstrass disks are not supported."""


# ---------------------------------------------------------------------------
# series with logarithmic terms


class LogSeries:
    """Finite sum ``sum_k S_k(t) log(t)^k`` of truncated Laurent series."""

    __slots__ = ("parts",)

    def __init__(self, parts: dict):
        self.parts = {k: s for k, s in parts.items() if s.coeffs}
        if not self.parts:
            prec = min((s.prec for s in parts.values()), default=INF)
            self.parts = {0: TruncatedSeries([], 0, prec)}

    @classmethod
    def of(cls, s: TruncatedSeries) -> "LogSeries":
        return cls({0: s})

    @property
    def prec(self):
        return min(s.prec for s in self.parts.values())

    def __add__(self, other: "LogSeries") -> "LogSeries":
        out = dict(self.parts)
        for k, s in other.parts.items():
            out[k] = out[k] + s if k in out else s
        return LogSeries(out)

    def __neg__(self):
        return LogSeries({k: -s for k, s in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LogSeries":
        return LogSeries({k: s.scale(c) for k, s in self.parts.items()})

    def add_constant(self, c) -> "LogSeries":
        return self + LogSeries.of(TruncatedSeries([c], 0, INF))

    def mul_series(self, s: TruncatedSeries) -> "LogSeries":
        return LogSeries({k: v * s for k, v in self.parts.items()})

    def __mul__(self, other: "LogSeries") -> "LogSeries":
        out: dict = {}
        for a, sa in self.parts.items():
            for b, sb in other.parts.items():
                term = sa * sb
                out[a + b] = out[a + b] + term if a + b in out else term
        return LogSeries(out)

    def integrate(self) -> "LogSeries":
        """Antiderivative, using int t^n log^k = t^(n+1) log^k/(n+1) - k/(n+1) int t^n log^(k-1)."""
        pending = {k: s.as_dict() for k, s in self.parts.items()}
        precs = {k: s.prec for k, s in self.parts.items()}
        prec = min(precs.values())
        out: dict[int, dict] = {}
        for k in range(max(pending), -1, -1):
            terms = pending.get(k, {})
            for n, c in terms.items():
                if n == -1:
                    slot = out.setdefault(k + 1, {})
                    slot[0] = slot.get(0, 0) + _div(c, k + 1)
                    continue
                cn = _div(c, n + 1)
                out.setdefault(k, {})
                out[k][n + 1] = out[k].get(n + 1, 0) + cn
                if k:
                    lower = pending.setdefault(k - 1, {})
                    lower[n] = lower.get(n, 0) - cn * k
        return LogSeries({k: TruncatedSeries.from_dict(d, prec + 1) for k, d in out.items()})

    def __call__(self, t, logt=None):
        total = 0
        for k, s in self.parts.items():
            v = s(t)
            if k:
                if logt is None:
                    logt = padic_log(t)
                v = v * logt**k
            total = total + v
        if isinstance(total, PadicElement) and isinstance(t, PadicElement) and self.prec != INF:
            total = total.add_bigoh(_tail_bound(self.prec, t))
        return total

    def log_part_is_zero(self) -> bool:
        return all(_series_is_zero(s) for k, s in self.parts.items() if k)

    def polar_part_is_zero(self) -> bool:
        s = self.parts.get(0)
        if s is None:
            return True
        return all(_coeff_is_zero(c) for n, c in s.terms() if n < 0)

    def power_series(self) -> TruncatedSeries:
        """The log-free, pole-free part; raises if logs or poles survive."""
        if not self.log_part_is_zero():
            raise ArithmeticError("logarithmic terms did not cancel")
        if not self.polar_part_is_zero():
            raise ArithmeticError("polar terms did not cancel")
        s = self.parts.get(0, TruncatedSeries([], 0, self.prec))
        return TruncatedSeries.from_dict({n: c for n, c in s.terms() if n >= 0}, s.prec)

    def __repr__(self):
        return " + ".join(f"({s})*log^{k}" if k else f"({s})" for k, s in sorted(self.parts.items()))


def _tail_bound(prec: int, t: PadicElement):
    """Valuation bound for the dropped terms c_k t^k, k >= prec.

    Coefficients come from at most two integrations of p-integral series, so
    v(c_k) >= -2 log_p(k).
    """
    p = t.p
    vt = t.valuation if not t.is_indistinguishable_from_zero() else t.abs_precision
    if vt == INF:
        return INF
    if vt <= 0:
        raise PrecisionError("series evaluated outside its disk of convergence")
    lo = max(prec, 1)
    return min(k * vt - 2 * _floor_log(k, p) for k in range(lo, 2 * lo + 2 * p + 10))


def _floor_log(k: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= k:
        e += 1
    return e


def _div(c, n: int):
    return Fraction(c, n) if isinstance(c, int) else c / n


def _coeff_is_zero(c) -> bool:
    if isinstance(c, PadicElement):
        return c.is_indistinguishable_from_zero()
    return c == 0


def _series_is_zero(s: TruncatedSeries) -> bool:
    return all(_coeff_is_zero(c) for c in s.coeffs)


# ---------------------------------------------------------------------------
# disk-local integration


class DiskExpansion:
    """Local primitives of omega_i on one residue disk.

    ``Lam[i]`` is an antiderivative of omega_i and ``Psi[i][j]`` one of
    omega_i * Lam[j], both as :class:`LogSeries` in the disk parameter t
    (t = x - x_anchor for affine disks, t = 1/x for infinite ones).
    """

    def __init__(self, curve: HyperellipticCurve, disk: ResidueDisk, anchor: CurvePoint, order: int, prec: int):
        self.curve = curve
        self.disk = disk
        self.anchor = anchor
        self.order = order
        self.p = disk.p
        n = 2 * curve.g + 1
        if disk.kind == "weierstrass":
            raise WeierstrassDiskError("Weierstrass disks are not supported")
        if disk.kind == "infinite":
            forms = [curve.omega_at_infinity(i, order, disk.sign) for i in range(n)]
            self.anchor_t = PadicElement(self.p, 1, 1, INF)
        else:
            x, y = curve.local_expansion(anchor, order)
            yinv = y.inverse(order)
            forms = []
            xi = TruncatedSeries([1], 0, INF)
            half = Fraction(1, 2)
            for i in range(n):
                forms.append((xi * yinv).scale(half).truncate(order))
                xi = xi * x
            self.anchor_t = PadicElement(self.p, 0, 0, INF)
        self.forms = forms
        self.Lam = [LogSeries.of(w).integrate() for w in forms]
        self.Psi = [[LogSeries.of(forms[i]).__mul__(self.Lam[j]).integrate() for j in range(n)] for i in range(n)]
        self.prec = prec

    def parameter(self, P: CurvePoint) -> PadicElement:
        if P.is_infinite:
            return PadicElement(self.p, 0, 0, INF)
        x = _padic(P.x, self.p, self.prec)
        if self.disk.kind == "infinite":
            return 1 / x
        return x - self.anchor.x

    def point_at(self, t: PadicElement) -> CurvePoint:
        """The point with parameter t on this disk's sheet."""
        curve = self.curve
        if self.disk.kind == "infinite":
            x = 1 / t
            y = _any_sqrt(curve.f_at(x), self.p)
            # the sheet is fixed by y u^(g+1) = sign mod p
            return CurvePoint("affine", x, _fix_sheet(y, t, curve.g + 1, self.disk.sign, self.p))
        x = self.anchor.x + t
        from .padic import sqrt

        y = sqrt(curve.f_at(x), self.disk.ybar)
        return CurvePoint("affine", x, y)

    def _eval(self, s: LogSeries, t: PadicElement, logt=None):
        return s(t, logt)

    def single(self, t0: PadicElement, t1: PadicElement) -> list:
        l0 = padic_log(t0) if self.disk.kind == "infinite" else None
        l1 = padic_log(t1) if self.disk.kind == "infinite" else None
        return [L(t1, l1) - L(t0, l0) for L in self.Lam]

    def double(self, t0: PadicElement, t1: PadicElement):
        inf_disk = self.disk.kind == "infinite"
        l0 = padic_log(t0) if inf_disk else None
        l1 = padic_log(t1) if inf_disk else None
        lam0 = [L(t0, l0) for L in self.Lam]
        lam1 = [L(t1, l1) for L in self.Lam]
        n = len(lam0)
        I = [lam1[i] - lam0[i] for i in range(n)]
        D = [[self.Psi[i][j](t1, l1) - self.Psi[i][j](t0, l0) - lam0[j] * I[i] for j in range(n)] for i in range(n)]
        return I, D

    def as_functions(self, t0: PadicElement):
        """I(t0, t)_i and D(t0, t)_ij as LogSeries in the free endpoint t."""
        l0 = padic_log(t0) if self.disk.kind == "infinite" and not t0.is_indistinguishable_from_zero() else None
        if self.disk.kind != "infinite":
            l0 = None
        lam0 = [L(t0, l0) if not t0.is_exact_zero() else _const_term(L) for L in self.Lam]
        n = len(lam0)
        I = [self.Lam[i].add_constant(-lam0[i]) for i in range(n)]
        D = []
        for i in range(n):
            row = []
            for j in range(n):
                psi0 = self.Psi[i][j](t0, l0) if not t0.is_exact_zero() else _const_term(self.Psi[i][j])
                row.append(self.Psi[i][j].add_constant(-psi0) - I[i].scale(lam0[j]))
            D.append(row)
        return I, D


def _const_term(L: LogSeries):
    s = L.parts.get(0)
    if s is None:
        return 0
    return s._get(0) or 0


def _padic(v, p, prec):
    if isinstance(v, PadicElement):
        return v
    return PadicElement.from_rational(v, p, prec)


def _any_sqrt(v, p):
    from .padic import sqrt

    u = PadicElement(p, 0, v.unit, v.abs_precision - v.valuation)
    r = sqrt(u, _sqrt_mod_p(u.unit % p, p))
    return PadicElement(p, v.valuation // 2, r.unit, r.abs_precision + v.valuation // 2)


def _sqrt_mod_p(a, p):
    for r in range(1, p):
        if r * r % p == a % p:
            return r
    raise ValueError("not a square mod p")


def _fix_sheet(y, t, e, sign, p):
    # y u^e must reduce to sign
    s = y * t**e
    if s.residue() != sign % p:
        return -y
    return y


# ---------------------------------------------------------------------------
# global integration


@dataclass
class ColemanResult:
    value: PadicElement
    certified_precision: int
    path_note: str = ""


class ColemanIntegrator:
    """Coleman integrals on one curve at one prime and working precision."""

    def __init__(self, curve: HyperellipticCurve, p: int, precision: int, order: int | None = None):
        curve.check_good_reduction(p)
        self.curve = curve
        self.p = p
        self.W = precision
        self.frob: FrobeniusData = frobenius_matrix(curve, p, precision)
        fr = self.frob
        self.ring = fr.ring
        self.reducer = fr.reducer
        self.n = 2 * curve.g + 1
        self.order = order or (precision + 2 * log_loss(precision, p) + 6)
        top = max(max(pr.levels) for pr in fr.primitives if pr.levels)
        self.coeff_prec = precision - 2 * log_loss(2 * top + 4, p)
        self._products_ready = False
        self._disk_cache: dict = {}
        self._anchor_cache: dict = {}
        self._eval_cache: dict = {}
        self._pair_cache: dict = {}

    # -- global products ----------------------------------------------------
    def _prepare_products(self):
        if self._products_ready:
            return
        ring = self.ring
        mod = ring.mod
        red = self.reducer
        f, df = red.f, red.df
        n = self.n
        F = [pr.levels for pr in self.frob.primitives]
        half = ring.const(Fraction(1, 2))
        self.Fw = {}
        for j in range(n):
            for k in range(n):
                # F_j * x^k dx / (2y)
                w = {1: [0] * k + [half]}
                prod = bivariate_mul(F[j], w, ring, scaled=False)
                self.Fw[j, k] = red.reduce(prod)
        dF = [differential_of(Fi, ring, f, df) for Fi in F]
        self.FdF = {}
        for j in range(n):
            for i in range(n):
                if i < j:
                    prod = bivariate_mul(F[j], dF[i], ring, scaled=True)
                    self.FdF[j, i] = red.reduce(prod)
        self._products_ready = True

    # -- anchors -------------------------------------------------------------
    def disk_of(self, P: CurvePoint) -> ResidueDisk:
        return reduce_mod_p(P, self.curve, self.p)

    def anchor(self, disk: ResidueDisk) -> CurvePoint:
        key = ("anchor", disk)
        if key in self._anchor_cache:
            return self._anchor_cache[key]
        E = self.ring.E + 4
        if disk.kind == "weierstrass":
            raise WeierstrassDiskError(f"disk {disk} is a Weierstrass disk")
        if disk.kind == "infinite":
            u = PadicElement(self.p, 1, 1, INF)
            A = self._infinite_point(disk, u, E)
        else:
            A = disk.center(self.curve, E)
        self._anchor_cache[key] = A
        return A

    def _infinite_point(self, disk: ResidueDisk, u: PadicElement, prec: int) -> CurvePoint:
        g = self.curve.g
        rev = self.curve.reversed_f()
        fu = sum((PadicElement.from_rational(c, self.p, prec) * u**k for k, c in enumerate(rev)), PadicElement(self.p, 0, 0, INF))
        from .padic import sqrt

        root = sqrt(fu, disk.sign % self.p)
        x = 1 / u
        y = root / u ** (g + 1)
        return CurvePoint("affine", x, y)

    def disk_expansion(self, disk: ResidueDisk) -> DiskExpansion:
        if disk not in self._disk_cache:
            self._disk_cache[disk] = DiskExpansion(self.curve, disk, self.anchor(disk), self.order, self.ring.E)
        return self._disk_cache[disk]

    def _frobenius_image_tiny(self, disk: ResidueDisk):
        """(I, D) from the anchor A to phi(A), plus the nu-integrals."""
        n = self.n
        p = self.p
        zero = PadicElement(p, 0, 0, INF)
        if disk.kind != "infinite":
            return [zero] * n, [[zero] * n for _ in range(n)], [zero] * (n + 1)
        key = ("phi", disk)
        if key in self._eval_cache:
            return self._eval_cache[key]
        ex = self.disk_expansion(disk)
        u0 = PadicElement(p, 1, 1, INF)
        u1 = PadicElement(p, p, 1, INF)
        I, D = ex.double(u0, u1)
        # nu_m = x^m dx / f in u: -u^(2g-m) / f~(u) du
        g = self.curve.g
        rev = TruncatedSeries(self.curve.reversed_f(), 0, self.order + 2)
        inv = rev.inverse(self.order + 2)
        J = []
        for m in range(2 * g + 2):
            s = inv.shift(2 * g - m).scale(Fraction(-1)).truncate(self.order)
            L = LogSeries.of(s).integrate()
            J.append(L(u1, padic_log(u1)) - L(u0, padic_log(u0)))
        out = (I, D, J)
        self._eval_cache[key] = out
        return out

    def _evaluations(self, A: CurvePoint, key):
        """Values at an anchor of F_i, nu-primitives and product primitives."""
        if key in self._eval_cache:
            return self._eval_cache[key]
        self._prepare_products()
        ring = self.ring
        x = A.x
        yinv = 1 / A.y
        cp = self.coeff_prec
        ev = lambda levels: evaluate_levels(levels, ring, x, yinv, cp)
        Fv = [ev(pr.levels) for pr in self.frob.primitives]
        Hv = [ev(pr.levels) for pr in self.frob.even_primitives]
        Fw = {k: ev(r.primitive) for k, r in self.Fw.items()}
        FdF = {k: ev(r.primitive) for k, r in self.FdF.items()}
        out = (Fv, Hv, Fw, FdF)
        self._eval_cache[key] = out
        return out

    def _anchor_pair(self, dA: ResidueDisk, dB: ResidueDisk):
        """(I, D) between the anchors of two disks via Frobenius."""
        key = (dA, dB)
        if key in self._pair_cache:
            return self._pair_cache[key]
        p = self.p
        n = self.n
        zero = PadicElement(p, 0, 0, INF)
        if dA == dB:
            res = ([zero] * n, [[zero] * n for _ in range(n)])
            self._pair_cache[key] = res
            return res
        A = self.anchor(dA)
        B = self.anchor(dB)
        FA, HA, FwA, FdFA = self._evaluations(A, ("ev", dA))
        FB, HB, FwB, FdFB = self._evaluations(B, ("ev", dB))
        Ia, Da, Ja = self._frobenius_image_tiny(dA)
        Ib, Db, Jb = self._frobenius_image_tiny(dB)
        M = self.frob.matrix
        Me = self.frob.even_matrix
        # single integrals: (1 - M^T) I = F(B) - F(A) + Ia - Ib
        one = PadicElement(p, 0, 1, INF)
        A1 = PadicMatrix([[(one if i == j else zero) - M[j, i] for j in range(n)] for i in range(n)])
        rhs = PadicMatrix([[FB[i] - FA[i] + Ia[i] - Ib[i]] for i in range(n)])
        I = [r[0] for r in solve_linear(A1, rhs).rows]
        # nu integrals
        ne = len(HA)
        A2 = PadicMatrix([[(one if i == j else zero) - Me[j, i] for j in range(ne)] for i in range(ne)])
        rhs2 = PadicMatrix([[HB[m] - HA[m] + Ja[m] - Jb[m]] for m in range(ne)])
        J = [r[0] for r in solve_linear(A2, rhs2).rows]

        def prod_integral(res, vA, vB):
            val = vB - vA
            for m, c in enumerate(res.coefficients):
                if c:
                    val = val + self.ring.to_padic(c, self.coeff_prec) * J[m]
            return val

        Fw = {k: prod_integral(self.Fw[k], FwA[k], FwB[k]) for k in self.Fw}
        FdF = {}
        for j in range(n):
            for i in range(n):
                if i < j:
                    FdF[j, i] = prod_integral(self.FdF[j, i], FdFA[j, i], FdFB[j, i])
        for j in range(n):
            for i in range(n):
                if i > j:
                    FdF[j, i] = FB[i] * FB[j] - FA[i] * FA[j] - FdF[i, j]
                elif i == j:
                    FdF[j, i] = (FB[i] * FB[i] - FA[i] * FA[i]) / 2
        # double integrals
        idx = [(i, j) for i in range(n) for j in range(n)]
        rows = []
        rhs3 = []
        for (i, j) in idx:
            row = []
            for (k, l) in idx:
                v = M[k, i] * M[l, j]
                row.append((one if (k, l) == (i, j) else zero) - v)
            rows.append(row)
            c = FdF[j, i] - FA[j] * (FB[i] - FA[i])
            s1 = zero
            s2 = zero
            for l in range(n):
                s1 = s1 + M[l, j] * I[l]
                s2 = s2 + M[l, j] * Fw[i, l]
            c = c + FB[i] * s1 - s2
            s3 = zero
            s4 = zero
            for k in range(n):
                s3 = s3 + M[k, i] * Fw[j, k]
                s4 = s4 + M[k, i] * I[k]
            c = c + s3 - FA[j] * s4
            c = c - Da[j][i] + I[i] * Ia[j] - Db[i][j] - Ib[i] * (I[j] - Ia[j])
            rhs3.append([c])
        sol = solve_linear(PadicMatrix(rows), PadicMatrix(rhs3))
        D = [[sol.rows[i * n + j][0] for j in range(n)] for i in range(n)]
        res = (I, D)
        self._pair_cache[key] = res
        return res

    # -- public API --------------------------------------------------------
    def local_parameter(self, P: CurvePoint) -> PadicElement:
        disk = self.disk_of(P)
        return self.disk_expansion(disk).parameter(P)

    def _to_anchor(self, P: CurvePoint):
        """(I, D) from the anchor of P's disk to P."""
        disk = self.disk_of(P)
        if disk.kind == "weierstrass":
            raise WeierstrassDiskError(f"{P} lies in a Weierstrass disk")
        if P.is_infinite:
            raise ValueError("integrals with an endpoint at infinity diverge")
        ex = self.disk_expansion(disk)
        return ex.double(ex.anchor_t, ex.parameter(P))

    def integrals(self, P: CurvePoint, Q: CurvePoint):
        """(I, D): all single and double integrals from P to Q."""
        dP = self.disk_of(P)
        dQ = self.disk_of(Q)
        if dP == dQ:
            ex = self.disk_expansion(dP)
            return ex.double(ex.parameter(P), ex.parameter(Q))
        leg1 = reverse(self._to_anchor(P))
        mid = self._anchor_pair(dP, dQ)
        leg3 = self._to_anchor(Q)
        return compose(compose(leg1, mid), leg3)

    def single_integrals(self, P: CurvePoint, Q: CurvePoint) -> list[PadicElement]:
        return self.integrals(P, Q)[0]

    def double_integral(self, i: int, j: int, P: CurvePoint, Q: CurvePoint) -> PadicElement:
        return self.integrals(P, Q)[1][i][j]

    def integral_between_conjugates(self, i: int, b: CurvePoint) -> PadicElement:
        """int_{w(b)}^b omega_i."""
        return self.single_integrals(b.involution(), b)[i]

    def tiny_integral(self, i: int, P: CurvePoint, Q: CurvePoint) -> PadicElement:
        dP = self.disk_of(P)
        if dP != self.disk_of(Q):
            raise ValueError("tiny integrals need both points in one residue disk")
        ex = self.disk_expansion(dP)
        return ex.single(ex.parameter(P), ex.parameter(Q))[i]

    def from_base_functions(self, b: CurvePoint, disk: ResidueDisk):
        """I(b, z), D(b, z) as LogSeries in the parameter t of ``disk``."""
        ex = self.disk_expansion(disk)
        dB = self.disk_of(b)
        if b.is_infinite:
            raise ValueError("the base point must be affine")
        leg1 = reverse(self._to_anchor(b))
        base = compose(leg1, self._anchor_pair(dB, disk))
        Ib, Db = base
        It, Dt = ex.as_functions(ex.anchor_t)
        n = self.n
        I = [It[i].add_constant(Ib[i]) for i in range(n)]
        D = [[(Dt[i][j] + It[i].scale(Ib[j])).add_constant(Db[i][j]) for j in range(n)] for i in range(n)]
        return I, D

    @property
    def certified_precision(self) -> int:
        return self.coeff_prec


def compose(a, b):
    """Path composition: (I1, D1) then (I2, D2)."""
    I1, D1 = a
    I2, D2 = b
    n = len(I1)
    I = [I1[i] + I2[i] for i in range(n)]
    D = [[D1[i][j] + D2[i][j] + I2[i] * I1[j] for j in range(n)] for i in range(n)]
    return I, D


def reverse(a):
    I, D = a
    n = len(I)
    return [-v for v in I], [[D[j][i] for j in range(n)] for i in range(n)]
