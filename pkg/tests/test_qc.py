"""Quadratic Chabauty: root isolation, admissibility, vanishing at rational points."""

from fractions import Fraction

import pytest

from qchabauty.curve import BadReductionError, HyperellipticCurve
from qchabauty.padic import PadicElement
from qchabauty.qc import (
    BadPrimeData,
    DegenerateInputError,
    IdenticallyZeroError,
    QCProblem,
    find_roots,
    search_rational_points,
)
from qchabauty.series import TruncatedSeries

F = Fraction
C31 = HyperellipticCurve.kms(31)


def poly_from_roots(roots, p, N, unit=1):
    coeffs = [F(unit)]
    for r in roots:
        nxt = [F(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= c * r
        coeffs = nxt
    return TruncatedSeries([PadicElement.from_rational(c, 3, N) for c in coeffs], 0, N + 5)


def test_find_roots_simple():
    G = poly_from_roots([3, 6, -9, F(1, 2)], 3, 20, unit=2)
    roots = find_roots(G, 3)
    got = sorted((s * 3) % 3**10 for s, digits, simple in roots if simple)
    assert len(roots) == 3  # 1/2 is outside the disk 3Z_3
    assert got == sorted(r % 3**10 for r in (3, 6, -9))


def test_find_roots_flags_double_root():
    G = poly_from_roots([3, 3, 1], 3, 20)
    roots = find_roots(G, 3)
    assert len(roots) == 1 and roots[0][2] is False
    assert (3 * roots[0][0] - 3) % 27 == 0


def test_find_roots_without_zeros():
    G = TruncatedSeries([PadicElement.from_rational(c, 3, 20) for c in (-2, 0, 1)], 0, 25)
    assert find_roots(G, 3) == []


def test_zero_series_requests_more_precision():
    G = TruncatedSeries([PadicElement(3, 0, 0, 10)], 0, 10)
    with pytest.raises(IdenticallyZeroError):
        find_roots(G, 3)


def test_rational_point_search():
    pts = search_rational_points(C31, 10)
    xs = {P.x for P in pts if not P.is_infinite}
    assert {0, 1, -1, 7, -7, F(1, 7), F(-1, 7)} <= xs
    assert all(C31.contains(P) for P in pts)


def test_default_z0_and_admissibility():
    pb = QCProblem(C31, 3, 20)
    assert (pb.z0.x, pb.z0.y) == (7, 440)
    for bad in [(0, 1), (0, -1), (1, 8), (-1, -8)]:
        with pytest.raises(DegenerateInputError):
            QCProblem(C31, 3, 20, z0=C31.point(*bad))


def test_input_validation():
    with pytest.raises(BadReductionError):
        QCProblem(C31, 7, 20)
    with pytest.raises(ValueError):
        QCProblem(C31, 3, 2)
    with pytest.raises(ValueError):
        QCProblem(HyperellipticCurve([1, 1, 0, 0, 0, 0, 1]), 3, 20)
    with pytest.raises(ValueError):
        QCProblem(C31, 3, 20, z0=C31.infinity(1))


def test_bad_prime_data():
    with pytest.raises(ValueError):
        BadPrimeData(lam={5: 1}, mu={})
    d = BadPrimeData.from_json({"lambda": {"5": "1/2"}, "mu": {"5": 3}, "alpha": {"5": 1}, "pi_b": {"5": 0}, "pi_z0": {"5": 2}})
    assert d.corrections() == (F(1, 2), F(1), F(6), F(3))
    assert BadPrimeData().corrections() == (0, 0, 0, 0)


@pytest.fixture(scope="module")
def pb30():
    return QCProblem(C31, 3, 30)


def test_G_vanishes_at_rational_points(pb30):
    for xy in [(1, 8), (-1, -8), (-7, 440), (F(1, 7), F(-440, 343)), (F(-1, 7), F(440, 343))]:
        g = pb30.G(C31.point(*xy))
        assert g.is_indistinguishable_from_zero() or g.valuation >= 8, (xy, g)


def test_G_is_not_identically_zero(pb30):
    # a 3-adic point in the (0,1) disk that is not rational
    x = PadicElement.from_rational(F(3, 2), 3, 30)
    z = C31.lift_x(x, 1, 3, 30)
    assert pb30.G(z).valuation < 8


def test_disk_series_matches_pointwise_values(pb30):
    disk = C31.enumerate_disks(3)[3]  # (1,2), the disk of z0
    S1, S2 = pb30.disk_series(disk)
    z = C31.point(F(1, 7), F(440, 343))
    t = PadicElement.from_rational(F(1, 7), 3, 30) - pb30.integrator.anchor(disk).x
    F1, F2 = pb30.F_values(z)
    assert (S1(t) - F1).valuation >= 10
    assert (S2(t) - F2).valuation >= 10
