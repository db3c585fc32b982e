"""Truncated Laurent series over Q and Q_p."""

from fractions import Fraction
from math import comb, factorial

import pytest

from qchabauty.padic import PadicElement
from qchabauty.series import SeriesError, TruncatedSeries, polynomial_series

F = Fraction


def geometric(n):
    return TruncatedSeries([F(1)] * n, 0, n)


def test_inverse_of_one_minus_t():
    s = TruncatedSeries([F(1), F(-1)], 0, 10)
    assert s.inverse() == geometric(10)
    assert (s * s.inverse()) == TruncatedSeries([F(1)], 0, 10)


def test_precision_of_products_with_laurent_terms():
    a = TruncatedSeries([F(1), F(2)], -1, 5)  # t^-1 + 2 + O(t^5)
    b = TruncatedSeries([F(3)], 0, 4)
    c = a * b
    # first known missing term of b (t^4) times t^-1 bounds the result
    assert c.prec == 3
    assert c[-1] == 3 and c[0] == 6


def test_binomial_sqrt_matches_closed_form():
    n = 8
    s = TruncatedSeries([F(1), F(1)], 0, n).sqrt(F(1))
    for k in range(n):
        # coefficient of t^k in (1 + t)^(1/2)
        c = F(1)
        for j in range(k):
            c *= F(1, 2) - j
        c /= factorial(k)
        assert s[k] == c


def test_sqrt_rejects_wrong_branch():
    with pytest.raises(SeriesError):
        TruncatedSeries([F(4)], 0, 5).sqrt(F(3))


def test_integrate_and_differentiate():
    s = TruncatedSeries([F(k + 1) for k in range(6)], 0, 6)
    assert s.formal_integrate().derivative() == s
    assert s.formal_integrate().prec == 7


def test_residue_and_log_term_detection():
    s = TruncatedSeries([F(5), F(0), F(2)], -1, 4)
    assert s.residue() == 5


def test_compose():
    # (1 + t)^2 evaluated at t -> 2t + t^2
    outer = polynomial_series([F(1), F(2), F(1)], prec=6)
    inner = TruncatedSeries([F(2), F(1)], 1, 6)
    got = outer.compose(inner)
    # (1 + 2t + t^2)^2 = (1 + t)^4
    want = TruncatedSeries([F(comb(4, k)) for k in range(5)], 0, 6)
    assert got == want


def test_padic_coefficients_and_evaluation():
    p, N = 5, 10
    one = PadicElement.from_rational(1, p, N)
    s = TruncatedSeries([one, one, one], 0, 3)
    t = PadicElement.from_rational(5, p, N)
    assert s(t).equals(PadicElement.from_rational(31, p, N), 3)
