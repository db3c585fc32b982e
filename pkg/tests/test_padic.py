"""p-adic arithmetic against an integer-modulus oracle."""

import random
from fractions import Fraction

import pytest

from qchabauty.padic import (
    INF,
    PadicContext,
    PadicElement,
    PadicMatrix,
    PrecisionError,
    log,
    rational_valuation,
    sqrt,
    teichmuller,
)


def oracle(q, p, N):
    # q as an integer mod p^N after clearing the p-part of the denominator
    q = Fraction(q)
    return q.numerator * pow(q.denominator, -1, p**N) % p**N


def test_valuation_of_rationals():
    assert rational_valuation(Fraction(18, 5), 3) == 2
    assert rational_valuation(Fraction(5, 27), 3) == -3
    assert rational_valuation(0, 3) == INF


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_ring_operations_match_oracle(p):
    rng = random.Random(p)
    N = 12
    for _ in range(50):
        a = Fraction(rng.randint(-999, 999), rng.choice([1, 2, 4, 13, 17]))
        b = Fraction(rng.randint(1, 999), rng.choice([1, 2, 4, 13]))
        A = PadicElement.from_rational(a, p, N)
        B = PadicElement.from_rational(b, p, N)
        for got, want in ((A + B, a + b), (A - B, a - b), (A * B, a * b)):
            n = min(N, got.abs_precision)
            assert got.lift() % p**n == oracle(want, p, n)
        if b % p:
            q = A / B
            assert q.equals(PadicElement.from_rational(a / b, p, N), q.abs_precision)


def test_precision_tracking():
    p = 5
    x = PadicElement.from_rational(25, p, 10)  # 5^2 + O(5^10)
    y = PadicElement.from_rational(1, p, 6)
    assert (x + y).abs_precision == 6
    assert (x * y).abs_precision == 8  # v(x) + N(y)
    assert x.valuation == 2 and x.rel_precision == 8
    z = x - x
    assert z.is_indistinguishable_from_zero() and z.abs_precision == 10


def test_division_by_nonunit_loses_relative_precision():
    p = 3
    a = PadicElement.from_rational(1, p, 10)
    b = PadicElement.from_rational(9, p, 10)
    c = a / b
    assert c.valuation == -2
    assert c.rel_precision == 8


def test_division_by_zero_is_an_error():
    p = 3
    with pytest.raises((PrecisionError, ZeroDivisionError)):
        PadicElement.from_rational(1, p, 5) / PadicElement.from_rational(0, p, 5)


def test_parse_roundtrip():
    p = 3
    x = PadicElement.from_rational(Fraction(7, 9), p, 6)
    assert PadicElement.parse(str(x)).identical(x)
    y = PadicElement.parse("2*3^1 + O(3^10)")
    assert y.valuation == 1 and y.abs_precision == 10


def test_context_helper():
    K = PadicContext(7, 10)
    assert (K(3) * K(5)).equals(K(15), 10)
    assert K.zero().is_indistinguishable_from_zero()


def test_sqrt_and_teichmuller():
    p, N = 11, 12
    three = PadicElement.from_rational(3, p, N)
    r = sqrt(three, 5)
    assert (r * r).equals(three, N)
    assert r.residue() == 5
    w = teichmuller(PadicElement.from_rational(2, p, N))
    assert (w**p).equals(w, N)
    assert w.residue() == 2


def test_log_is_additive_on_one_units():
    p, N = 5, 12
    a = PadicElement.from_rational(1 + 5, p, N)
    b = PadicElement.from_rational(1 + 10, p, N)
    assert log(a * b).equals(log(a) + log(b), 10)
    # log(1 + p) = p - p^2/2 + ...  to first order
    assert log(a).valuation == 1


def test_matrix_det_and_charpoly():
    p, N = 7, 10
    rows = [[2, 1, 0], [0, 3, 4], [5, 0, 6]]
    M = PadicMatrix.from_rationals(rows, p, N)
    det = 2 * (18 - 0) - 1 * (0 - 20) + 0
    assert M.determinant().equals(PadicElement.from_rational(det, p, N), N)
    assert M.trace().equals(PadicElement.from_rational(11, p, N), N)
    cp = M.charpoly()
    # constant term of det(T - M) is -det(M) for 3x3
    assert any(c.equals(PadicElement.from_rational(-det, p, N), N) for c in cp)
