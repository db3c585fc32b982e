"""Quadratic Chabauty for y^2 = x^6 + a x^4 + a x^2 + 1.

With c_i = int_{w(b)}^b omega_i the two local height coordinates are

    F1(z) = int_b^z (w0 w1 - w1 w0) + 1/2 int_b^z w0 * c_1
    F2(z) = 2 int_b^z (-w0 w3 + a w1 w2 + 2 w1 w4) - r(z) - int_b^z w0 * c_3

with r = (x - x(b))/2 the Hodge correction computed in :mod:`qchabauty.hodge`.
Rational points lie in the zero set of

    G(z) = det [[F1(z) + l(alpha),  F2(z0) + m(z0)],
                [F1(z0) + l(z0),    F2(z) + m(alpha)]]

where l, m collect the optional bad-prime corrections (zero by default).
G is expanded as a power series on every residue disk and its zeros in the
disk are isolated by residue-class recursion and Hensel lifting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coleman import ColemanIntegrator, LogSeries, WeierstrassDiskError
from .curve import CurvePoint, HyperellipticCurve, ResidueDisk, reduce_mod_p
from .frobenius import log_loss
from .hodge import hodge_constants
from .padic import INF, PadicElement, PrecisionError, rational_valuation
from .series import TruncatedSeries


class DegenerateInputError(PrecisionError):
    """The auxiliary point makes G vanish identically."""


@dataclass
class BadPrimeData:
    """Constants at primes of potential type V reduction, keyed by prime.

    ``alpha`` fixes the component class of the points sought; ``pi_b`` and
    ``pi_z0`` are the component positions of b and z0.
    """

    lam: dict = field(default_factory=dict)
    mu: dict = field(default_factory=dict)
    alpha: dict = field(default_factory=dict)
    pi_b: dict = field(default_factory=dict)
    pi_z0: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = set(self.lam) | set(self.mu)
        if set(self.lam) != set(self.mu):
            raise ValueError("lambda and mu must be indexed by the same primes")
        for name in ("alpha", "pi_b", "pi_z0"):
            missing = keys - set(getattr(self, name))
            if missing:
                raise ValueError(f"{name} is missing primes {sorted(missing)}")

    def corrections(self):
        """(l(alpha), l(z0), m(z0), m(alpha)) as rationals or p-adic numbers."""
        la = sum((self.lam[v] * (Fraction(self.alpha[v]) - Fraction(self.pi_b[v])) for v in self.lam), Fraction(0))
        lz = sum((self.lam[v] * (Fraction(self.pi_z0[v]) - Fraction(self.pi_b[v])) for v in self.lam), Fraction(0))
        mz = sum((self.mu[v] * (Fraction(self.pi_z0[v]) - Fraction(self.pi_b[v])) for v in self.mu), Fraction(0))
        ma = sum((self.mu[v] * (Fraction(self.alpha[v]) - Fraction(self.pi_b[v])) for v in self.mu), Fraction(0))
        return la, lz, mz, ma

    @classmethod
    def from_json(cls, obj: dict) -> "BadPrimeData":
        def conv(d):
            return {int(k): Fraction(v) for k, v in d.items()}

        return cls(*(conv(obj.get(k, {})) for k in ("lambda", "mu", "alpha", "pi_b", "pi_z0")))


@dataclass
class CandidatePoint:
    """One zero of G in a residue disk.

    ``x_value`` is None for the points at infinity themselves.
    ``multiplicity`` is "simple" for Hensel-certified roots and "flagged"
    otherwise; ``precision`` is the absolute precision of x (or of the disk
    parameter for a point at infinity).
    """

    disk: ResidueDisk
    t_value: PadicElement
    x_value: PadicElement | None
    precision: int
    multiplicity: str = "simple"
    matched: CurvePoint | None = None

    @property
    def is_infinite_point(self) -> bool:
        return self.x_value is None

    def x_digits(self, prec: int | None = None) -> str:
        if self.x_value is None:
            return self.disk.label()
        x = self.x_value if prec is None else self.x_value.add_bigoh(min(prec, self.precision))
        return x.series_str()

    def to_json(self, prec: int | None = None) -> dict:
        if self.x_value is None:
            x = self.disk.label()
        else:
            x = self.x_value if prec is None else self.x_value.add_bigoh(min(prec, self.precision))
            x = str(x)
        return {
            "x": x,
            "precision": self.precision if prec is None else min(prec, self.precision),
            "multiplicity": self.multiplicity,
            "matched": None if self.matched is None else _point_label(self.matched),
        }


def _point_label(P: CurvePoint) -> str:
    if P.is_infinite:
        return "inf+" if P.kind == "infinity_plus" else "inf-"
    return f"({P.x},{P.y})"


@dataclass
class DiskReport:
    disk: ResidueDisk
    roots: list
    error: str | None = None

    def to_json(self, prec: int | None = None) -> dict:
        out = {"center": self.disk.label(), "roots": [r.to_json(prec) for r in self.roots]}
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class QCReport:
    problem: "QCProblem"
    working_precision: int
    disks: list

    @property
    def candidates(self) -> list:
        return [r for d in self.disks for r in d.roots]

    def x_values(self, disk_label: str, prec: int) -> list:
        for d in self.disks:
            if d.disk.label() == disk_label:
                return [r.x_value.add_bigoh(prec) if r.x_value is not None else None for r in d.roots]
        raise KeyError(disk_label)

    def to_json(self, prec: int | None = None) -> dict:
        pb = self.problem
        return {
            "curve": pb.curve.to_json(),
            "p": pb.p,
            "precision": prec if prec is not None else self.working_precision,
            "working_precision": self.working_precision,
            "basepoint": _point_label(pb.b),
            "z0": None if pb.z0 is None else _point_label(pb.z0),
            "disks": [d.to_json(prec) for d in self.disks],
        }

    def to_text(self, prec: int | None = None) -> str:
        lines = [f"{'disk':<10} x(z) in Z_{self.problem.p}"]
        for d in self.disks:
            if d.error:
                lines.append(f"{d.disk.label():<10} error: {d.error}")
                continue
            for k, r in enumerate(d.roots):
                tag = f"  [{_point_label(r.matched)}]" if r.matched is not None else ""
                flag = "  (flagged)" if r.multiplicity != "simple" else ""
                label = d.disk.label() if k == 0 else ""
                lines.append(f"{label:<10} {r.x_digits(prec)}{tag}{flag}")
        return "\n".join(lines)


class QCProblem:
    """Input of one quadratic Chabauty computation.

    The working precision is the precision requested from the Coleman
    integrator; results carry their own (smaller) certified precision.
    """

    def __init__(
        self,
        curve: HyperellipticCurve,
        p: int,
        precision: int,
        b: CurvePoint | None = None,
        z0: CurvePoint | None = None,
        bad_prime_data: BadPrimeData | None = None,
        known_points: Iterable[CurvePoint] = (),
        validate: bool = True,
    ):
        if not curve.is_kms:
            raise ValueError("quadratic Chabauty is implemented for y^2 = x^6 + a x^4 + a x^2 + 1")
        curve.check_good_reduction(p)
        if precision < 3:
            raise ValueError("precision must be at least 3")
        self.curve = curve
        self.a = Fraction(curve.kms_parameter)
        self.p = p
        self.precision = precision
        self.b = b if b is not None else curve.point(0, 1)
        self.bad = bad_prime_data or BadPrimeData()
        self.known_points = list(known_points)
        self.z0 = z0 if z0 is not None else self._default_z0()
        for P in (self.b, self.z0):
            if P is None:
                continue
            if P.is_infinite:
                raise ValueError("b and z0 must be affine points")
            if not curve.contains(P):
                raise ValueError(f"{P} is not on the curve")
            if reduce_mod_p(P, curve, p).kind == "weierstrass":
                raise ValueError(f"{P} reduces to a Weierstrass point")
        if validate and self.z0 is not None:
            self._check_admissible(self.z0)
        self._ci = None
        self._rH = None
        self._consts = None
        self._z0_values = None

    def _check_admissible(self, z0: CurvePoint) -> None:
        if z0.same_as(self.b):
            raise DegenerateInputError("z0 = b makes G vanish identically")
        if z0.same_as(self.b.involution()):
            raise DegenerateInputError("z0 = w(b) is not an admissible auxiliary point")
        if self._quotients_dependent(z0):
            raise DegenerateInputError("f1(z0) and f2(z0) are dependent; G vanishes identically")

    def _default_z0(self):
        """Smallest-height admissible rational point, or None."""

        def key(P):
            x = Fraction(P.x)
            return (max(abs(x.numerator), x.denominator), x.denominator, x < 0, P.y < 0)

        for P in sorted((P for P in search_rational_points(self.curve, 12) if not P.is_infinite), key=key):
            if reduce_mod_p(P, self.curve, self.p).kind == "weierstrass":
                continue
            try:
                self._check_admissible(P)
            except DegenerateInputError:
                continue
            return P
        return None

    def _quotients_dependent(self, z: CurvePoint) -> bool:
        # f2 sends x = 0 to the origin; x^2 = x^-2 gives f1(z) = +-f2(z)
        if not z.is_exact:
            return False
        x = Fraction(z.x)
        return x == 0 or x * x == 1

    def check_nondegenerate(self) -> None:
        """Raise if F1(z0) and F2(z0) both vanish to their precision."""
        F1, F2 = self.z0_values()
        if F1.is_indistinguishable_from_zero() and F2.is_indistinguishable_from_zero():
            raise DegenerateInputError("F1(z0) = F2(z0) = 0; choose another z0")

    @property
    def integrator(self) -> ColemanIntegrator:
        if self._ci is None:
            self._ci = ColemanIntegrator(self.curve, self.p, self.precision)
        return self._ci

    def with_precision(self, precision: int) -> "QCProblem":
        return QCProblem(self.curve, self.p, precision, self.b, self.z0, self.bad, self.known_points, validate=False)

    # -- constants ------------------------------------------------------
    def conjugate_integrals(self):
        """(c_1, c_3) with c_i = int_{w(b)}^b omega_i."""
        if self._consts is None:
            c = self.integrator.single_integrals(self.b.involution(), self.b)
            self._consts = (c[1], c[3])
        return self._consts

    def _padic(self, v):
        if isinstance(v, PadicElement):
            return v
        N = self.precision + 10
        return PadicElement.from_rational(Fraction(v), self.p, N)

    # -- pointwise evaluation ---------------------------------------------
    @property
    def r_hodge(self) -> list:
        """Coefficients in x of r^H on S_1 (r^H on S_0 vanishes)."""
        if self._rH is None:
            hc = hodge_constants(self.curve, self.b)
            if not hc.c_is_zero() or not hc.xi_is_zero() or not hc.r_H[0].is_zero():
                raise ArithmeticError("unexpected Hodge constants for this family")
            self._rH = hc.r_H[1].x_polynomial()
        return self._rH

    def _r_at(self, x):
        acc = self._padic(0)
        for c in reversed(self.r_hodge):
            acc = acc * x + self._padic(c)
        return acc

    def _combine(self, I, D, xz):
        c1, c3 = self.conjugate_integrals()
        a = self.a
        F1 = D[0][1] - D[1][0] + I[0] * c1 / 2
        F2 = 2 * (-D[0][3] + D[1][2] * a + 2 * D[1][4]) - self._r_at(xz) - I[0] * c3
        return F1, F2

    def F_values(self, z: CurvePoint):
        """(F1(z), F2(z))."""
        if z.is_infinite:
            disk = reduce_mod_p(z, self.curve, self.p)
            S1, S2 = self.disk_series(disk)
            return S1._get(0) or self._padic(0), S2._get(0) or self._padic(0)
        I, D = self.integrator.integrals(self.b, z)
        return self._combine(I, D, self._padic(z.x))

    def z0_values(self):
        if self.z0 is None:
            raise ValueError("no auxiliary point z0 was given or found")
        if self._z0_values is None:
            self._z0_values = self.F_values(self.z0)
        return self._z0_values

    def G_from_F(self, F1, F2):
        la, lz, mz, ma = self.bad.corrections()
        F1z0, F2z0 = self.z0_values()
        return (F1 + la) * (F2z0 + mz) - (F1z0 + lz) * (F2 + ma)

    def G(self, z: CurvePoint) -> PadicElement:
        return self.G_from_F(*self.F_values(z))

    # -- series -----------------------------------------------------------
    def disk_series(self, disk: ResidueDisk):
        """(F1, F2) as power series in the disk parameter."""
        ci = self.integrator
        I, D = ci.from_base_functions(self.b, disk)
        c1, c3 = self.conjugate_integrals()
        a = self.a
        if disk.kind == "infinite":
            x = LogSeries.of(TruncatedSeries([1], -1, INF))
        else:
            x = LogSeries.of(TruncatedSeries([ci.anchor(disk).x, 1], 0, INF))
        F1 = D[0][1] - D[1][0] + I[0].scale(c1 / 2)
        F2 = (D[0][3].scale(-1) + D[1][2].scale(a) + D[1][4].scale(2)).scale(2)
        r = LogSeries.of(TruncatedSeries([], 0, INF))
        for c in reversed(self.r_hodge):
            r = (r * x).add_constant(self._padic(c))
        F2 = F2 - r - I[0].scale(c3)
        return F1.power_series(), F2.power_series()

    def expand_G_on_disk(self, disk: ResidueDisk) -> TruncatedSeries:
        S1, S2 = self.disk_series(disk)
        la, lz, mz, ma = self.bad.corrections()
        F1z0, F2z0 = self.z0_values()
        G = (S1 + TruncatedSeries([la], 0, INF)).scale(F2z0 + mz) - (S2 + TruncatedSeries([ma], 0, INF)).scale(F1z0 + lz)
        return G

    # -- roots -------------------------------------------------------------
    def disk_roots(self, disk: ResidueDisk) -> list:
        G = self.expand_G_on_disk(disk)
        ci = self.integrator
        roots = find_roots(G, self.p, tail_loss=2 * log_loss(ci.order, self.p))
        out = []
        for s, digits, simple in roots:
            t_prec = digits + 1
            t = PadicElement.from_rational(self.p * s, self.p, t_prec)
            out.append(self._candidate(disk, t, t_prec, simple))
        return out

    def _candidate(self, disk, t, t_prec, simple) -> CandidatePoint:
        p = self.p
        mult = "simple" if simple else "flagged"
        if disk.kind == "infinite":
            if t.is_indistinguishable_from_zero():
                P = self.curve.infinity(disk.sign)
                return CandidatePoint(disk, t, None, t_prec, mult, P)
            x = 1 / t
            prec = x.abs_precision
        else:
            x = (self.integrator.anchor(disk).x + t).add_bigoh(t_prec)
            prec = t_prec
        cand = CandidatePoint(disk, t, x, prec, mult)
        cand.matched = self._match(cand)
        return cand

    def _match(self, cand: CandidatePoint):
        for P in self.known_points:
            if P.is_infinite:
                continue
            if reduce_mod_p(P, self.curve, self.p) != cand.disk:
                continue
            if cand.x_value.equals(PadicElement.from_rational(Fraction(P.x), self.p, cand.precision + 5), cand.precision):
                return P
        return None

    def _disk_report(self, disk: ResidueDisk):
        """(report, nonzero) for one disk."""
        try:
            return DiskReport(disk, self.disk_roots(disk)), True
        except WeierstrassDiskError as exc:
            return DiskReport(disk, [], f"unsupported: {exc}"), False
        except IdenticallyZeroError as exc:
            return DiskReport(disk, [], f"precision: {exc}"), False
        except (PrecisionError, ArithmeticError) as exc:
            return DiskReport(disk, [], f"precision: {exc}"), True

    def _state(self):
        return (self.curve.to_json(), self.p, self.precision, self.b, self.z0, self.bad, self.known_points)

    def solve_once(self, jobs: int = 1) -> QCReport:
        """One pass over all residue disks; ``jobs`` > 1 uses worker processes
        (disk order, and hence the output, does not depend on ``jobs``)."""
        self.check_nondegenerate()
        disks = self.curve.enumerate_disks(self.p)
        if jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            chunks = [disks[i::jobs] for i in range(jobs) if disks[i::jobs]]
            with ProcessPoolExecutor(max_workers=len(chunks)) as ex:
                parts = list(ex.map(_disk_worker, [(self._state(), c) for c in chunks]))
            by_disk = {str(r.disk): (r, nz) for part in parts for r, nz in part}
            results = [by_disk[str(d)] for d in disks]
        else:
            results = [self._disk_report(d) for d in disks]
        if not any(nz for _, nz in results):
            raise DegenerateInputError("G vanishes identically on every disk at this precision")
        return QCReport(self, self.precision, [r for r, _ in results])


def _disk_worker(args):
    (cj, p, prec, b, z0, bad, known), disks = args
    pb = QCProblem(HyperellipticCurve.from_json(cj), p, prec, b, z0, bad, known, validate=False)
    return [pb._disk_report(d) for d in disks]


class IdenticallyZeroError(PrecisionError):
    """A series is zero to its known precision."""


def default_working_precision(target: int, p: int, g: int = 2) -> int:
    return target + g * math.ceil(math.log(max(target, 2), p)) + 4


def solve(problem: QCProblem, target: int | None = None, max_precision: int | None = None, jobs: int = 1) -> QCReport:
    """Run the solver, raising the working precision until every simple root
    is known to ``target`` digits (or ``max_precision`` is reached)."""
    if target is None:
        return problem.solve_once(jobs)
    max_precision = max_precision or max(6 * target + 40, problem.precision)
    pb = problem
    while True:
        report = pb.solve_once(jobs)
        short = [
            r
            for d in report.disks
            for r in d.roots
            if r.multiplicity == "simple" and r.precision < target and not r.is_infinite_point
        ]
        errors = [d for d in report.disks if d.error and d.error.startswith("precision")]
        if (not short and not errors) or pb.precision >= max_precision:
            return report
        step = max(3, target // 2)
        pb = pb.with_precision(min(pb.precision + step, max_precision))


def search_rational_points(curve: HyperellipticCurve, bound: int) -> list:
    """Affine points with x = r/s, |r|, s <= bound, plus the points at infinity."""
    pts = [curve.infinity(1), curve.infinity(-1)]
    seen = set()
    for s in range(1, bound + 1):
        for r in range(-bound, bound + 1):
            if math.gcd(r, s) != 1:
                continue
            x = Fraction(r, s)
            if x in seen:
                continue
            seen.add(x)
            v = curve.f_at(x)
            num, den = v.numerator, v.denominator
            rn, rd = math.isqrt(num) if num >= 0 else -1, math.isqrt(den)
            if rn >= 0 and rn * rn == num and rd * rd == den:
                y = Fraction(rn, rd)
                pts.append(CurvePoint("affine", x, y))
                if y:
                    pts.append(CurvePoint("affine", x, -y))
    return pts


# ---------------------------------------------------------------------------
# root isolation


def _to_integer_series(G: TruncatedSeries, p: int, tail_loss: int):
    """Coefficients of G(p s) as integers A_k with G(ps) = p^e sum A_k s^k + O(p^N)."""
    coeffs = {}
    N = INF
    vmin = INF
    for k, c in G.terms():
        if k < 0:
            raise ArithmeticError("series has a pole")
        if not isinstance(c, PadicElement):
            c = PadicElement.from_rational(Fraction(c), p, 10**6)
        coeffs[k] = c
        N = min(N, c.abs_precision + k)
        if not c.is_indistinguishable_from_zero():
            vmin = min(vmin, c.valuation)
    if G.prec != INF:
        base = vmin if vmin != INF else 0
        N = min(N, G.prec + base - tail_loss)
    if N == INF:
        raise IdenticallyZeroError("series is exactly zero")
    e = min((c.valuation + k for k, c in coeffs.items() if not c.is_indistinguishable_from_zero()), default=N)
    e = min(e, N)
    mod = p ** (N - e)
    A = []
    top = max(coeffs) if coeffs else 0
    for k in range(top + 1):
        c = coeffs.get(k)
        if c is None or c.is_indistinguishable_from_zero() or c.valuation + k >= N:
            A.append(0)
            continue
        sh = c.valuation + k - e
        A.append((c.unit * p**sh) % mod)
    return A, N - e


def find_roots(G: TruncatedSeries, p: int, tail_loss: int = 0) -> list:
    """Zeros t in pZ_p of a series in t.

    Returns triples (s, digits, simple) with t = p s and s known modulo
    p^digits.  Simple roots are Hensel-lifted; others are flagged with the
    depth at which the precision ran out.
    """
    A, M = _to_integer_series(G, p, tail_loss)
    if M <= 0 or all(a == 0 for a in A):
        raise IdenticallyZeroError("series vanishes to its known precision; raise the precision")
    roots = _roots_rec(A, M, p)
    roots.sort(key=lambda r: _digits(r[0], p, r[1]))
    return roots


def _digits(s: int, p: int, n: int) -> list:
    # little-endian digits: a prefix-stable order across precisions
    out = []
    for _ in range(n):
        s, d = divmod(s, p)
        out.append(d)
    return out


def _val_int(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def _eval_mod(A, s, mod):
    acc = 0
    for c in reversed(A):
        acc = (acc * s + c) % mod
    return acc


def _deriv(A):
    return [k * A[k] for k in range(1, len(A))]


def _taylor_shift(A, r, p, mod, keep):
    """Coefficients of A(r + p s) modulo mod, degree < keep."""
    n = len(A)
    B = list(A)
    # Horner-style shift by r
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            B[j] = (B[j] + r * B[j + 1]) % mod
    out = []
    pk = 1
    for k in range(min(n, keep)):
        out.append(B[k] * pk % mod)
        pk *= p
    return out


def _roots_rec(A, M, p, depth=0):
    mod = p**M
    A = [a % mod for a in A]
    nz = [a for a in A if a]
    if not nz:
        return [(0, 0, False)]
    v = min(_val_int(a, p) for a in nz)
    if v >= M:
        return [(0, 0, False)]
    if v:
        A = [a // p**v for a in A]
        M -= v
        mod = p**M
    while A and A[-1] == 0:
        A.pop()
    dA = _deriv(A)
    out = []
    for r in range(p):
        if _eval_mod(A, r, p):
            continue
        if _eval_mod(dA, r, p):
            out.append((_hensel(A, dA, r, p, M), M, True))
            continue
        if M <= 1:
            out.append((r, 1, False))
            continue
        B = _taylor_shift(A, r, p, mod, M + 1)
        for s2, k, simple in _roots_rec(B, M, p, depth + 1):
            out.append((r + p * s2, k + 1, simple))
    return out


def _hensel(A, dA, r, p, M):
    s = r
    prec = 1
    mod = p**M
    while prec < M:
        prec = min(2 * prec, M)
        m = p**prec
        fs = _eval_mod(A, s, m)
        ds = _eval_mod(dA, s, m)
        s = (s - fs * pow(ds, -1, m)) % m
    return s % mod
