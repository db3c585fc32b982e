"""Cohomological reduction on y^2 = f(x) in fixed-point p-adic arithmetic.

Differentials are dicts ``{n: A_n}`` meaning ``sum_n A_n(x) y^(-n) dx`` where
each ``A_n`` is a coefficient list (low degree first).  Odd ``n`` gives
differentials on the curve, even ``n`` gives differentials pulled back from
the x-line minus the roots of f and infinity.

Numbers are stored as integers ``X = value * p^S`` modulo ``p^E``; exact
p-integral constants (coefficients of f, inverses of units) are stored
unscaled.  Dividing by ``p^e`` is an exact integer division guarded by an
assertion; a failed assertion means the scale ``S`` was too small and raises
:class:`~qchabauty.padic.PrecisionError` so the caller can retry.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Sequence

from .padic import INF, PadicElement, PrecisionError


def _strip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_add_into(dst: list[int], src: Sequence[int], mod: int, shift: int = 0, scale: int = 1) -> None:
    """dst += scale * x^shift * src (in place, reduced mod ``mod``)."""
    need = len(src) + shift
    if len(dst) < need:
        dst.extend([0] * (need - len(dst)))
    if scale == 1:
        for i, c in enumerate(src):
            if c:
                dst[i + shift] = (dst[i + shift] + c) % mod
    else:
        for i, c in enumerate(src):
            if c:
                dst[i + shift] = (dst[i + shift] + scale * c) % mod


def poly_mul(a: Sequence[int], b: Sequence[int], mod: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return [c % mod for c in out]


def poly_deriv(a: Sequence[int], mod: int) -> list[int]:
    return [(i * a[i]) % mod for i in range(1, len(a))]


class FixedPointRing:
    """Integers modulo ``p^E`` representing values scaled by ``p^S``."""

    def __init__(self, p: int, S: int, E: int):
        if E <= S:
            raise ValueError("modulus exponent must exceed the scale")
        self.p = p
        self.S = S
        self.E = E
        self.mod = p**E
        self.scale = p**S

    def const(self, q) -> int:
        """An exact p-integral rational as an unscaled residue."""
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise ValueError(f"{q} is not {self.p}-integral")
        return q.numerator * pow(q.denominator, -1, self.mod) % self.mod

    def value(self, q) -> int:
        """A rational (or p-adic) value as a scaled residue."""
        if isinstance(q, PadicElement):
            if q.is_indistinguishable_from_zero():
                return 0
            sh = q.valuation + self.S
            if sh < 0:
                raise PrecisionError("value below the fixed-point scale")
            return q.unit * self.p**sh % self.mod
        q = Fraction(q)
        if q == 0:
            return 0
        num, den = q.numerator, q.denominator
        v = 0
        while den % self.p == 0:
            den //= self.p
            v += 1
        if v > self.S:
            raise PrecisionError("value below the fixed-point scale")
        return num * self.p ** (self.S - v) * pow(den, -1, self.mod) % self.mod

    def div_p(self, X: int, e: int) -> int:
        """Exact division of a scaled residue by ``p^e``."""
        if e == 0:
            return X
        q, r = divmod(X % self.mod, self.p**e)
        if r:
            raise PrecisionError("fixed-point scale too small for an exact division")
        return q

    def div_int(self, X: int, n: int) -> tuple[int, int]:
        """``X / n`` as a scaled residue plus the p-power divided out."""
        e = 0
        while n % self.p == 0:
            n //= self.p
            e += 1
        return self.div_p(X * pow(n, -1, self.mod) % self.mod, e), e

    def to_padic(self, X: int, prec) -> PadicElement:
        """Decode ``X`` as ``X / p^S`` with absolute precision ``prec``."""
        X %= self.mod
        return PadicElement._make(self.p, X, -self.S, prec) if X else PadicElement(self.p, 0, 0, prec)

    def mul_values(self, X: int, Y: int) -> int:
        """Product of two scaled residues."""
        return self.div_p(X * Y % self.mod, self.S)


def inverse_mod_f(h: list[int], f: list[int], ring: FixedPointRing) -> list[int]:
    """b with b*h = 1 modulo (f, p^E), for h coprime to f modulo p."""
    p = ring.p
    # extended Euclid over F_p, then Newton lifting b <- b(2 - b h)
    b0 = _inverse_mod_f_fp(h, f, p)
    b = b0
    k = 1
    while k < ring.E:
        k = min(2 * k, ring.E)
        mk = p**k
        bh = polymod(poly_mul(b, h, mk), f, mk)
        two_minus = [(-c) % mk for c in bh]
        if not two_minus:
            two_minus = [0]
        two_minus[0] = (two_minus[0] + 2) % mk
        b = polymod(poly_mul(b, two_minus, mk), f, mk)
    return [c % ring.mod for c in b]


def polymod(a: list[int], f: list[int], mod: int) -> list[int]:
    return poly_divmod(a, f, mod)[1]


def poly_divmod(a: Sequence[int], f: Sequence[int], mod: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder by f (leading coefficient a unit)."""
    d = len(f) - 1
    a = [c % mod for c in a]
    _strip(a)
    if len(a) <= d:
        return [], a
    lcinv = pow(f[-1], -1, mod)
    q = [0] * (len(a) - d)
    fl = f[:-1]
    for k in range(len(a) - 1, d - 1, -1):
        c = a[k] % mod
        if not c:
            continue
        c = c * lcinv % mod
        q[k - d] = c
        base = k - d
        for i, fi in enumerate(fl):
            if fi:
                a[base + i] -= c * fi
    r = [c % mod for c in a[:d]]
    return q, _strip(r)


def _inverse_mod_f_fp(h: list[int], f: list[int], p: int) -> list[int]:
    def norm(a):
        return _strip([c % p for c in a])

    def dm(a, b):
        a = norm(list(a))
        q = [0] * max(len(a) - len(b) + 1, 1)
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b) and a:
            c = a[-1] * inv % p
            s = len(a) - len(b)
            q[s] = c
            for i, bi in enumerate(b):
                a[s + i] = (a[s + i] - c * bi) % p
            a = norm(a)
        return norm(q), a

    def sub(a, b):
        n = max(len(a), len(b))
        return norm([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])

    def mul(a, b):
        return norm(poly_mul(a, b, p))

    r0, r1 = norm(list(f)), norm(list(h))
    s0, s1 = [], [1]
    while r1:
        q, r = dm(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
    if len(r0) != 1:
        raise ValueError("polynomials are not coprime modulo p")
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0]


class ReductionResult:
    """Output of :meth:`Reducer.reduce`.

    ``coefficients`` are the coordinates on the basis (omega_m = x^m dx/(2y)
    for odd inputs, nu_m = x^m dx/f for even inputs), as scaled residues;
    ``primitive`` maps level n to the polynomial G_n of the function
    ``sum G_n(x) y^(-n)`` (level -1 means ``G(x) * y``); ``loss`` is the
    largest p-power divided out along any reduction chain.
    """

    def __init__(self, coefficients, primitive, loss):
        self.coefficients = coefficients
        self.primitive = primitive
        self.loss = loss


class Reducer:
    """Pole reduction for a fixed model and fixed-point ring."""

    def __init__(self, f: Sequence, ring: FixedPointRing):
        self.ring = ring
        self.p = ring.p
        mod = ring.mod
        self.f = [ring.const(c) for c in f]
        self.deg = len(self.f) - 1
        if self.deg % 2:
            raise ValueError("reducer expects an even-degree model")
        self.g = (self.deg - 2) // 2
        self.df = poly_deriv(self.f, mod)
        self.lcinv = pow(self.f[-1], -1, mod)
        self.b = inverse_mod_f(self.df, self.f, ring)
        self.half = ring.const(Fraction(1, 2))

    # -- one reduction step -----------------------------------------------
    def _step(self, n: int, A: list[int], work, prim, loss) -> None:
        ring = self.ring
        mod = ring.mod
        Q, R = poly_divmod(A, self.f, mod)
        if Q:
            poly_add_into(work[n - 2], Q, mod)
            loss[n - 2] = max(loss[n - 2], loss[n])
        if not R:
            return
        # R = U f + V f', then V f' y^-n dx = (2/(n-2)) (V' y^-(n-2) dx - d(V y^-(n-2)))
        V = polymod(poly_mul(R, self.b, mod), self.f, mod)
        Vdf = poly_mul(V, self.df, mod)
        diff = [((R[i] if i < len(R) else 0) - (Vdf[i] if i < len(Vdf) else 0)) % mod for i in range(max(len(R), len(Vdf)))]
        U, rem = poly_divmod(diff, self.f, mod)
        if rem:
            raise ArithmeticError("internal error: R - V f' not divisible by f")
        e_max = 0
        V2 = []
        for c in V:
            q, e = ring.div_int(2 * c, n - 2)
            V2.append(q)
            e_max = max(e_max, e)
        poly_add_into(work[n - 2], U, mod)
        poly_add_into(work[n - 2], poly_deriv(V2, mod), mod)
        poly_add_into(prim[n - 2], V2, mod, scale=-1)
        loss[n - 2] = max(loss[n - 2], loss[n] + e_max)

    def reduce(self, form: dict[int, Sequence[int]]) -> ReductionResult:
        ring = self.ring
        mod = ring.mod
        work = defaultdict(list)
        for n, A in form.items():
            if A:
                poly_add_into(work[n], A, mod)
        if not work:
            return ReductionResult([0] * (2 * self.g + 1), {}, 0)
        parities = {n % 2 for n in work}
        if len(parities) != 1:
            raise ValueError("mixed parities in one differential")
        odd = parities.pop() == 1
        prim = defaultdict(list)
        loss = defaultdict(int)
        n = max(work)
        floor = 3 if odd else 4
        lowest = min(work)
        if lowest < (1 if odd else 0):
            raise ValueError("levels below the base level must be rewritten first")
        while n >= floor:
            A = work.pop(n, None)
            if A:
                _strip(A)
                if A:
                    self._step(n, A, work, prim, loss)
            n -= 2
        if odd:
            coeffs, base_loss = self._base_odd(work.pop(1, []), prim, loss[1])
        else:
            coeffs, base_loss = self._base_even(work.pop(2, []), work.pop(0, []), prim, max(loss[2], loss[0]))
        total = max([base_loss] + list(loss.values()))
        return ReductionResult(coeffs, {k: _strip(v) for k, v in prim.items() if _strip(v)}, total)

    def _base_odd(self, A: list[int], prim, loss_in):
        ring = self.ring
        mod = ring.mod
        g = self.g
        A = [c % mod for c in A]
        _strip(A)
        loss = loss_in
        # d(x^j y) = (j x^(j-1) f + x^j f'/2) dx/y, leading coeff lc (j+g+1) x^(j+2g+1)
        for k in range(len(A) - 1, 2 * g, -1):
            c = A[k]
            if not c:
                continue
            j = k - (2 * g + 1)
            coef, e = ring.div_int(c * self.lcinv % mod, j + g + 1)
            loss += e  # pessimistic: later terms may descend from this one
            exact = [0] * (j + len(self.f))
            if j:
                poly_add_into(exact, self.f, mod, shift=j - 1, scale=j)
            poly_add_into(exact, self.df, mod, shift=j, scale=self.half)
            poly_add_into(A, exact, mod, scale=-coef)
            pm = prim[-1]
            if len(pm) <= j:
                pm.extend([0] * (j + 1 - len(pm)))
            pm[j] = (pm[j] + coef) % mod
            if A[k] % mod:
                raise ArithmeticError("internal error in level-1 reduction")
        coeffs = [(2 * (A[m] if m < len(A) else 0)) % mod for m in range(2 * g + 1)]
        return coeffs, loss

    def _base_even(self, A2: list[int], A0: list[int], prim, loss_in):
        ring = self.ring
        mod = ring.mod
        Q, R = poly_divmod(A2, self.f, mod)
        P = [0] * max(len(Q), len(A0))
        poly_add_into(P, Q, mod)
        poly_add_into(P, A0, mod)
        loss = loss_in
        integ = [0]
        for k, c in enumerate(P):
            q, e = ring.div_int(c, k + 1)
            integ.append(q)
            if c:
                loss = max(loss, loss_in + e)
        poly_add_into(prim[0], integ, mod)
        coeffs = [(R[m] if m < len(R) else 0) for m in range(self.deg)]
        return coeffs, loss


def evaluate_function(prim: dict[int, Sequence[int]], ring: FixedPointRing, x: PadicElement, yinv_powers) -> PadicElement:
    """Evaluate ``sum G_n(x) y^-n`` given scaled-residue polynomials.

    ``yinv_powers`` maps n to y^-n as p-adic elements (n = -1 gives y).
    Returns an unrounded p-adic value at the ring's nominal precision.
    """
    total = None
    for n, G in prim.items():
        if not G:
            continue
        acc = None
        for c in reversed(G):
            term = ring.to_padic(c, INF if c == 0 else ring.E - ring.S)
            acc = term if acc is None else acc * x + term
        val = acc * yinv_powers[n]
        total = val if total is None else total + val
    return total if total is not None else PadicElement(ring.p, 0, 0, INF)


def bivariate_mul(A: dict, B: dict, ring: FixedPointRing, scaled: bool = True) -> dict:
    """Product of two level dictionaries by Kronecker substitution.

    Level n of A times level m of B lands on level n + m.  With ``scaled``
    both inputs carry the factor p^S and the product is rescaled once.
    """
    mod = ring.mod
    A = {n: a for n, a in A.items() if a}
    B = {n: b for n, b in B.items() if b}
    if not A or not B:
        return {}
    amin, amax = min(A), max(A)
    bmin, bmax = min(B), max(B)
    da = max(len(a) for a in A.values())
    db = max(len(b) for b in B.values())
    xw = da + db - 1  # x-slots per level
    # levels of one parity step by 2; keep a generic stride
    step = 2 if all((n - amin) % 2 == 0 for n in A) and all((n - bmin) % 2 == 0 for n in B) else 1
    terms = min(da, db) * (min(len(A), len(B)) + 1)
    width = 2 * mod.bit_length() + terms.bit_length() + 1
    width = (width + 7) // 8 * 8
    nbytes = width // 8

    def pack(D, lo, dmax):
        nl = (max(D) - lo) // step + 1
        buf = bytearray(nl * xw * nbytes)
        for n, poly in D.items():
            base = (n - lo) // step * xw
            for k, c in enumerate(poly):
                if c:
                    off = (base + k) * nbytes
                    buf[off:off + nbytes] = (c % mod).to_bytes(nbytes, "little")
        return int.from_bytes(bytes(buf), "little")

    prod = pack(A, amin, da) * pack(B, bmin, db)
    nla = (amax - amin) // step + 1
    nlb = (bmax - bmin) // step + 1
    nl = nla + nlb - 1
    raw = prod.to_bytes(nl * xw * nbytes + nbytes, "little")
    out = {}
    lo = amin + bmin
    for li in range(nl):
        poly = []
        for k in range(xw):
            off = (li * xw + k) * nbytes
            c = int.from_bytes(raw[off:off + nbytes], "little")
            if c:
                c %= mod
                if scaled and c:
                    c = ring.div_p(c, ring.S)
            poly.append(c)
        _strip(poly)
        if poly:
            out[lo + li * step] = poly
    return out


def differential_of(levels: dict, ring: FixedPointRing, f: Sequence[int], df: Sequence[int]) -> dict:
    """dF for F = sum G_n y^-n as an odd differential with levels >= 1."""
    mod = ring.mod
    out = defaultdict(list)
    half = ring.const(Fraction(1, 2))
    for n, G in levels.items():
        if not G:
            continue
        dG = poly_deriv(G, mod)
        if n == -1:
            # d(G y) = (G' f + G f'/2) y^-1 dx
            poly_add_into(out[1], poly_mul(dG, f, mod), mod)
            poly_add_into(out[1], poly_mul(G, df, mod), mod, scale=half)
            continue
        if n % 2 == 0:
            raise ValueError("differential_of expects an odd function")
        poly_add_into(out[n], dG, mod)
        c = ring.const(Fraction(-n, 2))
        poly_add_into(out[n + 2], poly_mul(G, df, mod), mod, scale=c)
    return {n: _strip(v) for n, v in out.items() if _strip(v)}


def raise_level(levels: dict, f: Sequence[int], mod: int) -> dict:
    """Rewrite the level -1 part G y as (G f) y^-1."""
    out = {n: list(v) for n, v in levels.items() if n != -1}
    if levels.get(-1):
        acc = out.setdefault(1, [])
        poly_add_into(acc, poly_mul(levels[-1], f, mod), mod)
    return out


def evaluate_levels(levels: dict, ring: FixedPointRing, x: PadicElement, yinv: PadicElement, coeff_prec) -> PadicElement:
    """Evaluate ``sum G_n(x) yinv^n`` (level -1 uses y = 1/yinv).

    Coefficients are scaled residues known to absolute precision
    ``coeff_prec``; the result's precision accounts for the valuations of
    the monomials.  Works in integer arithmetic after factoring out powers
    of p from x and yinv.
    """
    p = ring.p
    mod = ring.mod
    vx = x.valuation if not x.is_indistinguishable_from_zero() else 0
    xu = x.unit if not x.is_indistinguishable_from_zero() else 0
    vy = yinv.valuation
    yu = yinv.unit
    y_inv_unit = pow(yu, -1, mod)
    items = [(n, G) for n, G in levels.items() if G]
    if not items:
        return PadicElement(p, 0, 0, INF)
    emin = None
    for n, G in items:
        for k, c in enumerate(G):
            if c:
                e = k * vx + n * vy
                emin = e if emin is None else min(emin, e)
    if emin is None:
        return PadicElement(p, 0, 0, coeff_prec)
    total = 0
    for n, G in items:
        yn = pow(yu, n, mod) if n >= 0 else pow(y_inv_unit, -n, mod)
        acc = 0
        xpow = 1
        for k, c in enumerate(G):
            if c:
                e = k * vx + n * vy - emin
                acc += c * xpow * p**e
            xpow = xpow * xu % mod
        total = (total + acc % mod * yn) % mod
    prec = coeff_prec + emin
    return PadicElement._make(p, total, emin - ring.S, prec) if total else PadicElement(p, 0, 0, prec)
