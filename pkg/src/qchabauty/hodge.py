"""Hodge filtration data at the points at infinity of an even-degree model.

Everything here is exact over the rationals.  At x = inf+/- the parameter is
u = 1/x, and for the basis eta_0..eta_(2g-1) of H^1_dR(X) we compute

    f_{i,x} = I(S(loc eta_i)),     h_{ik,x} = sum_j tau_ijk f_{j,x},
    g_{k,x} = -I(S(sum_i (df_i - eta_i) h_ik + sum_ij tau_ijk f_i eta_j - xi_k)),

where S keeps the exponents <= -2 and I integrates termwise.  The sign of
the tau term is the one for which the residue obstruction vanishes exactly
when tau respects the cup product.  The pair
(c, r) of a tuple of principal parts (w_x) is the unique choice of a function
r on Y with r(b) = 0 and constants c_i (g <= i < 2g) such that
w_x - r - sum c_i f_{i,x} has no pole at every x.  Then c^H_ik = c_i(g_k)
and r^H_k = r(g_k).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curve import CurvePoint, HyperellipticCurve
from .series import TruncatedSeries


class HodgeError(ArithmeticError):
    """Raised when tau is inconsistent with the cup product or a solve is singular."""


# ---------------------------------------------------------------------------
# tau


@dataclass
class PairingConstants:
    """tau[i][j][k] with tau(T_i (x) T_j) = sum_k tau_ijk S_k."""

    tau: list
    labels: tuple = ()

    @property
    def n(self) -> int:
        return len(self.tau)

    @property
    def d(self) -> int:
        return len(self.tau[0][0]) if self.tau else 0

    def __getitem__(self, idx):
        i, j, k = idx
        return self.tau[i][j][k]

    @classmethod
    def from_wedges(cls, n: int, d: int, wedges: dict, labels=()) -> "PairingConstants":
        """Build from {(i, j): {k: value}} for i < j, extended antisymmetrically."""
        tau = [[[Fraction(0)] * d for _ in range(n)] for _ in range(n)]
        for (i, j), vals in wedges.items():
            for k, v in vals.items():
                tau[i][j][k] = Fraction(v)
                tau[j][i][k] = -Fraction(v)
        return cls(tau, tuple(labels))

    def check_antisymmetric(self) -> None:
        n, d = self.n, self.d
        for i in range(n):
            for j in range(n):
                for k in range(d):
                    if self.tau[i][j][k] + self.tau[j][i][k] != 0:
                        raise HodgeError(f"tau is not antisymmetric at ({i},{j},{k})")

    def to_json(self) -> dict:
        out = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                vals = {k: str(v) for k, v in enumerate(self.tau[i][j]) if v}
                if vals:
                    out[f"T{i}^T{j}"] = {f"S{k}": v for k, v in vals.items()}
        return out


def kms_tau() -> PairingConstants:
    """tau(T0^T1) = -S0, tau(T0^T3) = -tau(T1^T2) = -S1, tau(T2^T3) = -S2."""
    return PairingConstants.from_wedges(
        4,
        3,
        {(0, 1): {0: -1}, (0, 3): {1: -1}, (1, 2): {1: 1}, (2, 3): {2: -1}},
        labels=("S0", "S1", "S2"),
    )


# ---------------------------------------------------------------------------
# functions on Y


class YFunction:
    """A function sum c_(k,e) x^k y^e (e in {0, 1}) on Y = X - {inf+, inf-}."""

    def __init__(self, terms: dict | None = None):
        self.terms = {key: Fraction(c) for key, c in (terms or {}).items() if c}

    def __call__(self, P: CurvePoint):
        if P.is_infinite:
            raise ValueError("functions on Y are not evaluated at infinity")
        total = 0
        for (k, e), c in self.terms.items():
            total = total + c * P.x**k * (P.y if e else 1)
        return total

    def __add__(self, other: "YFunction") -> "YFunction":
        t = dict(self.terms)
        for key, c in other.terms.items():
            t[key] = t.get(key, 0) + c
        return YFunction(t)

    def scale(self, c) -> "YFunction":
        return YFunction({key: v * c for key, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def x_polynomial(self) -> list:
        """Coefficients in x when no y-terms occur."""
        if any(e for (_, e) in self.terms):
            raise ValueError("function involves y")
        top = max((k for k, _ in self.terms), default=0)
        return [self.terms.get((k, 0), Fraction(0)) for k in range(top + 1)]

    def pole_order(self, g: int) -> int:
        return max((k + (g + 1) * e for (k, e) in self.terms), default=0)

    def local(self, curve: HyperellipticCurve, sign: int, order: int) -> TruncatedSeries:
        """Expansion in u = 1/x at the point at infinity with the given sign."""
        g = curve.g
        out = TruncatedSeries([], 0, order)
        ysr = None
        for (k, e), c in self.terms.items():
            term = TruncatedSeries([c], -k, order)
            if e:
                if ysr is None:
                    rev = TruncatedSeries(curve.reversed_f(), 0, order + 2 * g + 4)
                    ysr = rev.sqrt(Fraction(1)).shift(-(g + 1)).scale(sign)
                term = term * ysr
            out = out + term
        return out.truncate(order)

    def __eq__(self, other):
        return isinstance(other, YFunction) and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (k, e), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = "*".join(m for m in (f"x^{k}" if k > 1 else ("x" if k == 1 else ""), "y" if e else "") if m)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


# ---------------------------------------------------------------------------
# charts


def _S(s: TruncatedSeries) -> TruncatedSeries:
    return s.tail_section()


def _I(s: TruncatedSeries) -> TruncatedSeries:
    return s.formal_integrate()


def _polar(s: TruncatedSeries) -> dict:
    return {k: c for k, c in s.terms() if k < 0}


@dataclass
class ChartFunctions:
    """f_{i,x}, h_{ik,x}, g_{k,x} and loc_x(eta_i) at one point at infinity."""

    sign: int
    eta: list
    f: list
    h: list
    g: list


class HodgeComputation:
    """Exact Hodge data for an even-degree hyperelliptic curve and a tau."""

    def __init__(self, curve: HyperellipticCurve, tau: PairingConstants | None = None, order: int | None = None):
        if curve.degree % 2:
            raise ValueError("only even-degree models are supported")
        self.curve = curve
        self.g = curve.g
        if tau is None:
            if not curve.is_kms:
                raise ValueError("tau must be given for curves outside the KMS family")
            tau = kms_tau()
        self.tau = tau
        if tau.n != 2 * self.g:
            raise ValueError("tau must be indexed by T_0..T_(2g-1)")
        self.order = order or (4 * self.g + 8)
        self.basis = curve.cohomology_basis()
        self._charts: dict = {}

    # -- local expansions ---------------------------------------------------
    def loc_eta(self, i: int, sign: int) -> TruncatedSeries:
        row = self.basis.rows[i]
        out = TruncatedSeries([], 0, self.order)
        for j, c in enumerate(row):
            if c:
                out = out + self.curve.omega_at_infinity(j, self.order, sign).scale(Fraction(c))
        return out

    def third_kind(self) -> tuple:
        """(index, residue at inf+) of the omega spanning C(Y/X)."""
        for j in range(2 * self.g + 1):
            r = self.curve.residue_at_infinity(j)
            if r:
                return j, r
        raise HodgeError("no differential with a residue at infinity")

    def charts(self, sign: int, xi: Sequence | None = None) -> ChartFunctions:
        key = (sign, None if xi is None else tuple(xi))
        if key in self._charts:
            return self._charts[key]
        n = 2 * self.g
        d = self.tau.d
        tau = self.tau
        eta = [self.loc_eta(i, sign) for i in range(n)]
        f = [_I(_S(e)) for e in eta]
        h = [[sum((f[j].scale(tau[i, j, k]) for j in range(n) if tau[i, j, k]), TruncatedSeries([], 0)) for k in range(d)] for i in range(n)]
        gs = []
        for k in range(d):
            acc = self._g_integrand(eta, f, h, k)
            if xi is not None and xi[k]:
                jx, _ = self.third_kind()
                acc = acc - self.curve.omega_at_infinity(jx, self.order, sign).scale(xi[k])
            gs.append(_I(_S(acc)).scale(-1))
        ch = ChartFunctions(sign, eta, f, h, gs)
        self._charts[key] = ch
        return ch

    def _g_integrand(self, eta, f, h, k) -> TruncatedSeries:
        n = 2 * self.g
        tau = self.tau
        acc = TruncatedSeries([], 0)
        for i in range(n):
            acc = acc + (f[i].derivative() - eta[i]) * h[i][k]
            for j in range(n):
                if tau[i, j, k]:
                    acc = acc + (f[i] * eta[j]).scale(tau[i, j, k])
        return acc.truncate(self.order - 2 * self.g)

    # -- cup products and xi --------------------------------------------------
    def cup_product(self, i: int, j: int) -> Fraction:
        """[eta_i] u [eta_j] = sum_x res_x(F_i eta_j), F_i a local primitive."""
        total = Fraction(0)
        for sign in (1, -1):
            Fi = _I(self.loc_eta(i, sign))
            total += Fraction((Fi * self.loc_eta(j, sign)).residue())
        return total

    def cup_matrix(self) -> list:
        n = 2 * self.g
        return [[self.cup_product(i, j) for j in range(n)] for i in range(n)]

    def check_tau(self) -> None:
        """Antisymmetry and sum_{i<j} [eta_i]u[eta_j] tau_ijk = 0."""
        self.tau.check_antisymmetric()
        C = self.cup_matrix()
        n = 2 * self.g
        for k in range(self.tau.d):
            s = sum(C[i][j] * self.tau[i, j, k] for i in range(n) for j in range(i + 1, n))
            if s:
                raise HodgeError(f"tau violates the cup-product relation for S{k} (sum = {s})")

    def xi_residues(self) -> list:
        """Residue at each point at infinity of the obstruction for each k."""
        out = []
        for k in range(self.tau.d):
            res = {}
            for sign in (1, -1):
                ch = self.charts(sign)
                integrand = self._g_integrand(ch.eta, ch.f, ch.h, k)
                res[sign] = Fraction(integrand.residue())
            out.append(res)
        return out

    def solve_xi(self) -> list:
        """Coefficients of xi_k on the third-kind differential; zero when residues vanish."""
        self.check_tau()
        jx, r = self.third_kind()
        out = []
        for k, res in enumerate(self.xi_residues()):
            if res[1] + res[-1] != 0:
                raise HodgeError(f"residues for S{k} do not sum to zero")
            # xi_k kills the residue of the integrand at each point
            out.append(res[1] / r)
        return out

    # -- (c, r) ---------------------------------------------------------------
    def compute_cr(self, tails: dict, b: CurvePoint) -> tuple:
        """(c, r) for principal parts ``tails`` = {+1: series, -1: series}.

        c has 2g entries (zero below g); r is a YFunction with r(b) = 0.
        """
        g = self.g
        M = max([g] + [-min(_polar(s), default=0) for s in tails.values()])
        fs = {sign: self.charts(sign).f for sign in (1, -1)}
        # unknowns: x^1..x^M, x^k y (k + g + 1 <= M), c_g..c_(2g-1)
        basis = [(k, 0) for k in range(1, M + 1)] + [(k, 1) for k in range(0, M - g)]
        nunk = len(basis) + g
        rows, rhs = [], []
        locs = {sign: [YFunction({key: 1}).local(self.curve, sign, self.order) for key in basis] for sign in (1, -1)}
        for sign in (1, -1):
            w = tails.get(sign, TruncatedSeries([], 0))
            for e in range(-M, 0):
                row = [Fraction(locs[sign][u][e]) for u in range(len(basis))]
                row += [Fraction(fs[sign][i][e]) for i in range(g, 2 * g)]
                rows.append(row)
                rhs.append(Fraction(w[e]))
        sol = _solve_exact(rows, rhs, nunk)
        r = YFunction({key: sol[u] for u, key in enumerate(basis)})
        if not b.is_infinite:
            r = r + YFunction({(0, 0): -Fraction(r(b))})
        c = [Fraction(0)] * g + sol[len(basis):]
        return c, r

    def hodge_constants(self, b: CurvePoint) -> "HodgeConstants":
        xi = self.solve_xi()
        ch = {sign: self.charts(sign, xi if any(xi) else None) for sign in (1, -1)}
        cH, rH = [], []
        for k in range(self.tau.d):
            c, r = self.compute_cr({sign: ch[sign].g[k] for sign in (1, -1)}, b)
            cH.append(c)
            rH.append(r)
        n = 2 * self.g
        # c^H_ik, indexed [i][k]
        c_table = [[cH[k][i] for k in range(self.tau.d)] for i in range(n)]
        return HodgeConstants(c_table, rH, xi, b, self.tau)


@dataclass
class HodgeConstants:
    c_H: list
    r_H: list
    xi: list
    basepoint: CurvePoint
    tau: PairingConstants

    def c_is_zero(self) -> bool:
        return all(v == 0 for row in self.c_H for v in row)

    def xi_is_zero(self) -> bool:
        return all(v == 0 for v in self.xi)

    def to_json(self) -> dict:
        return {
            "basepoint": str(self.basepoint),
            "tau": self.tau.to_json(),
            "c_H": [[str(v) for v in row] for row in self.c_H],
            "r_H": [str(r) for r in self.r_H],
            "xi": [str(v) for v in self.xi],
        }


def _solve_exact(rows, rhs, n):
    """Solve a square (or consistent overdetermined) rational system."""
    a = [list(r) + [v] for r, v in zip(rows, rhs)]
    m = len(a)
    piv_cols = []
    rank = 0
    for c in range(n):
        p = next((r for r in range(rank, m) if a[r][c] != 0), None)
        if p is None:
            raise HodgeError("singular matching system for (c, r)")
        a[rank], a[p] = a[p], a[rank]
        pv = a[rank][c]
        a[rank] = [x / pv for x in a[rank]]
        for r in range(m):
            if r != rank and a[r][c]:
                fct = a[r][c]
                a[r] = [x - fct * y for x, y in zip(a[r], a[rank])]
        piv_cols.append(c)
        rank += 1
    for r in range(rank, m):
        if a[r][n] != 0:
            raise HodgeError("inconsistent matching system for (c, r)")
    return [a[i][n] for i in range(n)]


def hodge_constants(curve: HyperellipticCurve, b: CurvePoint | None = None, tau: PairingConstants | None = None) -> HodgeConstants:
    """c^H, r^H and xi for ``curve`` with base point ``b`` (default (0,1) when on the curve)."""
    if b is None:
        b = curve.point(0, 1)
    return HodgeComputation(curve, tau).hodge_constants(b)
