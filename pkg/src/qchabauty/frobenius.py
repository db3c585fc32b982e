"""Frobenius on the de Rham cohomology of Y = X - {inf+, inf-}.

The lift is phi(x) = x^p with phi(y) = y^p (1 + E/y^(2p))^(1/2) where
E = f(x^p) - f(x)^p.  Pulling back omega_i = x^i dx/(2y) and reducing gives

    phi^* omega_i = dF_i + sum_j M[j][i] omega_j.

The even differentials nu_m = x^m dx/f, m = 0..2g+1, are handled the same way
(they live on the x-line minus the roots of f); they are needed for the
iterated integrals.

Precision.  Terms of the lift are truncated at E^K; the k-th term has
valuation at least k+1.  Reductions use the fixed-point ring of
:mod:`qchabauty.reduction` with a modulus large enough that the tracked
chain loss never wraps around, so the computed reduction is exact for the
truncated input.  The certified precision is then bounded by the truncation
error after the logarithmic denominator bound for pole reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .curve import CohomologyBasisChange, CurvePoint, HyperellipticCurve
from .padic import INF, PadicElement, PadicMatrix, PrecisionError
from .reduction import FixedPointRing, Reducer, poly_add_into, poly_mul


def log_loss(n: int, p: int) -> int:
    """Denominator bound for reducing a pole of order n: floor(log_p n) + 1."""
    if n <= 1:
        return 1
    return int(math.floor(math.log(n, p) + 1e-12)) + 1


def truncation_order(W: int, p: int, even: bool = False) -> int:
    """Smallest K with (k+1) - loss(level_k) >= W for every dropped k > K."""
    K = 0
    while True:
        ok = True
        for k in range(K + 1, K + 60):
            level = 2 * p * (k + 1) if even else p * (2 * k + 1)
            if k + 1 - log_loss(level, p) < W:
                ok = False
                break
        if ok:
            return K
        K += 1


def _binom_minus_half(k: int) -> Fraction:
    return Fraction((-1) ** k * comb(2 * k, k), 4**k)


@dataclass
class Primitive:
    """A function ``sum_n G_n(x) y^-n`` with scaled fixed-point coefficients.

    Level -1 means ``G(x) * y``, level 0 a polynomial in x.
    """

    levels: dict
    ring: FixedPointRing

    def __call__(self, P: CurvePoint, prec: int) -> PadicElement:
        return evaluate_primitive(self, P, prec)


def _yinv_powers(P: CurvePoint, levels, p: int, prec: int):
    y = P.y
    yi = 1 / y
    out = {}
    if -1 in levels:
        out[-1] = y
    if 0 in levels:
        out[0] = PadicElement(p, 0, 1, INF)
    pos = sorted(n for n in levels if n > 0)
    if pos:
        cur = yi
        k = 1
        for n in pos:
            while k < n:
                cur = cur * yi
                k += 1
            out[n] = cur
    return out


def evaluate_primitive(F: Primitive, P: CurvePoint, prec: int) -> PadicElement:
    """Evaluate at an affine p-adic point to absolute precision ``prec``."""
    if P.is_infinite:
        raise ValueError("primitives are evaluated at affine points")
    ring = F.ring
    p = ring.p
    x = P.x if isinstance(P.x, PadicElement) else PadicElement.from_rational(P.x, p, prec + 10)
    y = P.y if isinstance(P.y, PadicElement) else PadicElement.from_rational(P.y, p, prec + 10)
    P = CurvePoint("affine", x, y)
    powers = _yinv_powers(P, F.levels, p, prec)
    total = PadicElement(p, 0, 0, INF)
    for n, G in F.levels.items():
        if not G:
            continue
        acc = PadicElement(p, 0, 0, INF)
        for c in reversed(G):
            acc = acc * x + ring.to_padic(c, INF)
        total = total + acc * powers[n]
    return total.add_bigoh(prec)


class FrobeniusData:
    """Frobenius matrices and primitives for one curve, prime and precision.

    ``matrix`` is the (2g+1)x(2g+1) PadicMatrix M with
    phi^* omega_i = dF_i + sum_j M[j][i] omega_j; ``even_matrix`` is the
    analogue for nu_m = x^m dx / f; ``certified_precision`` bounds the
    absolute precision of every entry and of the primitives.
    """

    def __init__(self, curve, p, working_precision, ring, M, Me, prims, eprims, certified, loss):
        self.curve = curve
        self.p = p
        self.working_precision = working_precision
        self.ring = ring
        self.M_int = M
        self.Me_int = Me
        self.primitives = [Primitive(lv, ring) for lv in prims]
        self.even_primitives = [Primitive(lv, ring) for lv in eprims]
        self.certified_precision = certified
        self.tracked_loss = loss
        N = certified
        self.matrix = PadicMatrix([[ring.to_padic(c, N) for c in row] for row in M])
        self.even_matrix = PadicMatrix([[ring.to_padic(c, N) for c in row] for row in Me])
        self.reducer = None

    @property
    def g(self) -> int:
        return self.curve.g

    def entry(self, j: int, i: int) -> PadicElement:
        return self.matrix[j, i]

    def h1_block(self, basis: CohomologyBasisChange | None = None) -> PadicMatrix:
        """Matrix of Frobenius on H^1_dR(X) in the eta basis."""
        if basis is None:
            basis = self.curve.cohomology_basis()
        C = [[Fraction(c) for c in r] for r in basis.rows]  # eta_k = sum_i C[k][i] omega_i
        n = len(C[0])
        d = len(C)
        p = self.p
        N = self.certified_precision
        # left inverse: choose d coordinates on which C is invertible
        cols = _independent_columns(C)
        sub = [[C[k][c] for c in cols] for k in range(d)]
        inv = _invert_fraction_matrix(sub)  # sub^-1 : coords -> eta
        out = []
        for l in range(d):
            row = []
            for k in range(d):
                # phi^* eta_k in omega coordinates
                acc = PadicElement(p, 0, 0, INF)
                for ci, c in enumerate(cols):
                    coord = PadicElement(p, 0, 0, INF)
                    for i in range(n):
                        if C[k][i]:
                            coord = coord + self.matrix[c, i] * PadicElement.from_rational(C[k][i], p, N + 5)
                    if inv[ci][l]:
                        acc = acc + coord * PadicElement.from_rational(inv[ci][l], p, N + 5)
                row.append(acc)
            out.append(row)
        return PadicMatrix(out)

    def to_json(self) -> dict:
        return {
            "curve": self.curve.to_json(),
            "p": self.p,
            "certified_precision": self.certified_precision,
            "matrix": [[str(e) for e in r] for r in self.matrix.rows],
        }


def _independent_columns(C):
    d = len(C)
    n = len(C[0])
    chosen = []
    for c in range(n):
        trial = chosen + [c]
        sub = [[C[k][j] for j in trial] for k in range(d)]
        if _rank(sub) == len(trial):
            chosen = trial
        if len(chosen) == d:
            break
    return chosen


def _rank(rows):
    a = [list(r) for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][c]:
                m = a[r][c] / a[rank][c]
                a[r] = [x - m * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def _invert_fraction_matrix(m):
    n = len(m)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


def _poly_f_of_xp(f_int: Sequence[int], p: int) -> list[int]:
    out = [0] * ((len(f_int) - 1) * p + 1)
    for i, c in enumerate(f_int):
        out[i * p] = c
    return out


def _pullback_forms(reducer: Reducer, ring: FixedPointRing, K: int, Ke: int):
    """phi^* omega_i and phi^* nu_m as level dictionaries of scaled residues."""
    mod = ring.mod
    p = ring.p
    f = reducer.f
    g = reducer.g
    fp = [1]
    for _ in range(p):
        fp = poly_mul(fp, f, mod)
    fxp = _poly_f_of_xp(f, p)
    E = [((fxp[i] if i < len(fxp) else 0) - (fp[i] if i < len(fp) else 0)) % mod for i in range(max(len(fxp), len(fp)))]
    powers = [[1]]
    for _ in range(max(K, Ke)):
        powers.append(poly_mul(powers[-1], E, mod))
    # common sums; the x^(p(i+1)-1) factor is a shift
    odd_base = {}
    for k in range(K + 1):
        c = ring.value(Fraction(p, 2) * _binom_minus_half(k))
        odd_base[p * (2 * k + 1)] = [c * e % mod for e in powers[k]]
    even_base = {}
    for k in range(Ke + 1):
        c = ring.value(Fraction(p * (-1) ** k))
        even_base[2 * p * (k + 1)] = [c * e % mod for e in powers[k]]
    odd = []
    for i in range(2 * g + 1):
        sh = p * (i + 1) - 1
        odd.append({n: [0] * sh + A for n, A in odd_base.items()})
    even = []
    for m in range(2 * g + 2):
        sh = p * (m + 1) - 1
        even.append({n: [0] * sh + A for n, A in even_base.items()})
    return odd, even


_CACHE: dict = {}


def frobenius_matrix(curve: HyperellipticCurve, p: int, precision: int, *, extra_scale: int = 0) -> FrobeniusData:
    """Frobenius data certified to absolute precision ``precision`` (or better)."""
    curve.check_good_reduction(p)
    key = (curve.f, p, precision)
    if key in _CACHE:
        return _CACHE[key]
    W = precision
    K = truncation_order(W, p)
    Ke = truncation_order(W, p, even=True)
    top = max(p * (2 * K + 1), 2 * p * (Ke + 1))
    S = log_loss(top, p) + 2 + extra_scale
    L = _chain_loss_estimate(top, p)
    for _attempt in range(8):
        ring = FixedPointRing(p, S, W + S + L)
        reducer = Reducer(curve.f, ring)
        try:
            odd, even = _pullback_forms(reducer, ring, K, Ke)
            M = [[0] * len(odd) for _ in range(len(odd))]
            prims = []
            loss = 0
            for i, form in enumerate(odd):
                res = reducer.reduce(form)
                for j, c in enumerate(res.coefficients):
                    M[j][i] = c
                prims.append(res.primitive)
                loss = max(loss, res.loss)
            Me = [[0] * len(even) for _ in range(len(even))]
            eprims = []
            for m, form in enumerate(even):
                res = reducer.reduce(form)
                for j, c in enumerate(res.coefficients):
                    Me[j][m] = c
                eprims.append(res.primitive)
                loss = max(loss, res.loss)
        except PrecisionError:
            S += 3
            continue
        if loss > L:
            L = loss + 2
            continue
        data = FrobeniusData(curve, p, W, ring, M, Me, prims, eprims, W, loss)
        data.reducer = reducer
        data.truncation = (K, Ke)
        _CACHE[key] = data
        return data
    raise PrecisionError("could not find a stable fixed-point scale for the reduction")


def _chain_loss_estimate(top_level: int, p: int) -> int:
    total = 0
    for n in range(top_level, 2, -2):
        m = n - 2
        while m % p == 0:
            total += 1
            m //= p
    return total + 6


def clear_cache() -> None:
    _CACHE.clear()
