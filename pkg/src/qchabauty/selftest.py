"""Quick invariant checks used by ``qchabauty selftest``.

Each check returns ``(name, ok, detail)``.  The suite is small enough to run
in a few seconds: Frobenius trace against a point count, shuffle and path
composition for Coleman integrals, and the exact Hodge constants.
"""

from __future__ import annotations

from fractions import Fraction

from .coleman import ColemanIntegrator
from .curve import HyperellipticCurve
from .frobenius import frobenius_matrix
from .hodge import hodge_constants
from .padic import PadicElement


def check_trace(a=31, p=5, prec=8):
    curve = HyperellipticCurve.kms(a)
    block = frobenius_matrix(curve, p, prec).h1_block()
    expected = p + 1 - curve.count_points_mod_p(p)
    tr = block.trace()
    det = block.determinant()
    ok = tr.equals(PadicElement.from_rational(expected, p, prec), tr.abs_precision) and det.equals(
        PadicElement.from_rational(p * p, p, prec), min(prec, det.abs_precision)
    )
    return (f"frobenius trace a={a} p={p}", ok, f"trace={tr} expected {expected} mod {p}; det={det}")


def check_shuffle(a=31, p=3, prec=20):
    curve = HyperellipticCurve.kms(a)
    ci = ColemanIntegrator(curve, p, prec)
    P, Q, R = curve.point(0, 1), curve.point(1, 8), curve.point(-1, -8)
    I, D = ci.integrals(P, Q)
    I2, D2 = ci.integrals(Q, R)
    I3, D3 = ci.integrals(P, R)
    worst = prec
    ok = True
    for i in range(len(I)):
        for j in range(len(I)):
            lhs = D[i][j] + D[j][i]
            rhs = I[i] * I[j]
            n = min(lhs.abs_precision, rhs.abs_precision, 6)
            ok &= lhs.equals(rhs, n)
            comp = D[i][j] + D2[i][j] + I2[i] * I[j]
            n2 = min(comp.abs_precision, D3[i][j].abs_precision, 6)
            ok &= comp.equals(D3[i][j], n2)
            worst = min(worst, n, n2)
    return (f"coleman shuffle/composition a={a} p={p}", bool(ok), f"checked to {worst} digits")


def check_hodge(a=31):
    hc = hodge_constants(HyperellipticCurve.kms(a))
    r1 = hc.r_H[1].x_polynomial()
    ok = hc.c_is_zero() and hc.xi_is_zero() and hc.r_H[0].is_zero()
    ok = ok and len(r1) >= 2 and Fraction(r1[1]) == Fraction(1, 2)
    return (f"hodge constants a={a}", bool(ok), f"r_H = ({hc.r_H[0]}, {hc.r_H[1]})")


def run_selftest(verbose: bool = False):
    results = []
    for fn in (check_trace, check_shuffle, check_hodge):
        try:
            res = fn()
        except Exception as exc:  # report rather than abort the suite
            res = (fn.__name__, False, f"{type(exc).__name__}: {exc}")
        results.append(res)
        if verbose:
            print(("PASS" if res[1] else "FAIL"), res[0], res[2])
    return results
