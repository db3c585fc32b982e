"""Coleman integrals: functoriality, shuffle, composition, tiny integrals."""

import itertools
import random
from fractions import Fraction

import pytest

from qchabauty.coleman import ColemanIntegrator
from qchabauty.curve import HyperellipticCurve
from qchabauty.padic import PadicElement

F = Fraction
P3 = 3
W = 24


@pytest.fixture(scope="module")
def ci():
    return ColemanIntegrator(HyperellipticCurve.kms(31), P3, W)


@pytest.fixture(scope="module")
def pts():
    C = HyperellipticCurve.kms(31)
    return [C.point(0, 1), C.point(1, 8), C.point(-1, -8), C.point(7, 440), C.point(F(1, 7), F(-440, 343)), C.point(-7, 440)]


def agree(a, b, cap=None):
    n = min(a.abs_precision, b.abs_precision)
    if cap is not None:
        n = min(n, cap)
    assert n >= 3, "too little precision to compare"
    return a.equals(b, n)


def sigma(P):
    # the extra automorphism (x, y) -> (-x, y)
    return type(P)("affine", -P.x, P.y)


def test_parity_under_extra_automorphism(ci, pts):
    # sigma^* omega_i = (-1)^(i+1) omega_i and sigma fixes b = (0, 1)
    b = pts[0]
    eps = [(-1) ** (i + 1) for i in range(5)]
    for P in pts[1:4]:
        I, D = ci.integrals(b, P)
        Is, Ds = ci.integrals(b, sigma(P))
        for i in range(5):
            assert agree(Is[i], I[i] * eps[i])
            for j in range(5):
                assert agree(Ds[i][j], D[i][j] * (eps[i] * eps[j]))


def test_hyperelliptic_involution(ci, pts):
    P, Q = pts[1], pts[3]
    I = ci.single_integrals(P, Q)
    Iw = ci.single_integrals(P.involution(), Q.involution())
    for i in range(5):
        assert agree(Iw[i], -I[i])


def test_shuffle_and_composition_random(ci, pts):
    rng = random.Random(7)
    for P, Q, R in rng.sample(list(itertools.permutations(pts, 3)), 6):
        I1, D1 = ci.integrals(P, Q)
        I2, D2 = ci.integrals(Q, R)
        I3, D3 = ci.integrals(P, R)
        for i in range(5):
            assert agree(I1[i] + I2[i], I3[i])
            for j in range(5):
                assert agree(D1[i][j] + D1[j][i], I1[i] * I1[j])
                assert agree(D1[i][j] + D2[i][j] + I2[i] * I1[j], D3[i][j])


def test_reversal(ci, pts):
    I, D = ci.integrals(pts[1], pts[3])
    Ir, Dr = ci.integrals(pts[3], pts[1])
    for i in range(5):
        assert agree(Ir[i], -I[i])
        for j in range(5):
            assert agree(Dr[i][j], D[j][i])


def naive_tiny(i, x0, y0, t1, p, N, terms):
    # int_{t=0}^{t1} (x0+t)^i dt / (2 sqrt(f(x0+t))) with exact rational series
    f = [1, 0, 31, 0, 31, 0, 1]
    ft = [sum(F(f[k]) * F(__binom(k, m)) * x0 ** (k - m) for k in range(m, 7)) for m in range(7)]
    # 1/sqrt(ft) with leading term 1/y0
    inv = [F(1, y0)]
    sq = [F(y0)]
    for k in range(1, terms):
        acc = (ft[k] if k < 7 else 0) - sum(sq[j] * sq[k - j] for j in range(1, k))
        sq.append(acc / (2 * y0))
    for k in range(1, terms):
        inv.append(-sum(sq[j] * inv[k - j] for j in range(1, k + 1)) / y0)
    xi = [F(__binom(i, m)) * x0 ** (i - m) for m in range(i + 1)]
    integrand = [sum(xi[m] * inv[k - m] for m in range(min(k, i) + 1)) / 2 for k in range(terms)]
    total = sum(c * F(t1) ** (k + 1) / (k + 1) for k, c in enumerate(integrand))
    return PadicElement.from_rational(total, p, N)


def __binom(n, k):
    from math import comb

    return comb(n, k)


def test_tiny_integral_against_rational_series(ci, pts):
    # (1, 8) and (7, 440) lie in the same residue disk mod 3
    P, Q = pts[1], pts[3]
    I = ci.single_integrals(P, Q)
    for i in range(5):
        want = naive_tiny(i, F(1), F(8), F(6), P3, 10, 60)
        assert agree(I[i], want, cap=8)


def test_precision_stability():
    C = HyperellipticCurve.kms(31)
    P, Q = C.point(0, 1), C.point(F(1, 7), F(440, 343))
    lo = ColemanIntegrator(C, 3, 20).integrals(P, Q)
    hi = ColemanIntegrator(C, 3, 28).integrals(P, Q)
    for i in range(5):
        assert agree(lo[0][i], hi[0][i])
        for j in range(5):
            assert agree(lo[1][i][j], hi[1][i][j])


def test_other_prime_example():
    # a = 19, p = 11: points over Q_11 with sqrt(3)
    from qchabauty.padic import sqrt

    C = HyperellipticCurve.kms(19)
    p, N = 11, 20
    r3 = sqrt(PadicElement.from_rational(3, p, N), 5)
    z1 = type(C.point(0, 1))("affine", r3, PadicElement.from_rational(16, p, N))
    assert C.contains(z1)
    ci = ColemanIntegrator(C, p, N)
    b = C.point(0, 1)
    I, D = ci.integrals(b, z1)
    for i in range(5):
        for j in range(5):
            assert agree(D[i][j] + D[j][i], I[i] * I[j])
