"""Curve models, residue disks and local expansions."""

from fractions import Fraction

import pytest

from qchabauty.curve import BadReductionError, CurvePoint, HyperellipticCurve, ResidueDisk, reduce_mod_p
from qchabauty.padic import PadicElement
from qchabauty.series import TruncatedSeries

F = Fraction


def brute_count(f, p):
    # independent count: both points at infinity plus affine solutions
    n = 2
    for x in range(p):
        v = sum(int(c) * x**i for i, c in enumerate(f)) % p
        n += sum(1 for y in range(p) if (y * y - v) % p == 0)
    return n


def test_kms_model_and_json_roundtrip():
    C = HyperellipticCurve.kms(31)
    assert C.g == 2 and C.is_kms
    assert C.f == (1, 0, 31, 0, 31, 0, 1)
    assert HyperellipticCurve.from_json(C.to_json()).f == C.f
    assert HyperellipticCurve.from_json({"f": ["1", "0", "2", "0", "3", "0", "1"]}).is_kms is False


def test_model_validation():
    with pytest.raises(ValueError):
        HyperellipticCurve([1, 0, 0, 1])  # odd degree
    with pytest.raises(ValueError):
        HyperellipticCurve([1, 0, 2, 0, 1])  # (x^2 + 1)^2
    with pytest.raises(ValueError):
        HyperellipticCurve([1, 0, 0, 0, 0, 0, 2])  # not monic


@pytest.mark.parametrize("a,p,good", [(31, 3, True), (31, 7, False), (31, 5, True), (19, 11, True), (2, 3, False)])
def test_good_reduction(a, p, good):
    C = HyperellipticCurve.kms(a)
    assert C.has_good_reduction(p) is good
    if not good:
        with pytest.raises(BadReductionError):
            C.check_good_reduction(p)


def test_point_count_matches_brute_force():
    for a in (2, 5, 31, 19):
        C = HyperellipticCurve.kms(a)
        for p in (3, 5, 7, 11, 13):
            if C.has_good_reduction(p):
                assert C.count_points_mod_p(p) == brute_count(C.f, p)


def test_disks_for_a31_p3():
    C = HyperellipticCurve.kms(31)
    labels = [d.label() for d in C.enumerate_disks(3)]
    assert labels == ["(0,1)", "(0,2)", "(1,1)", "(1,2)", "(2,1)", "(2,2)", "inf+", "inf-"]
    assert len(labels) == C.count_points_mod_p(3)


def test_reduction_of_points():
    C = HyperellipticCurve.kms(31)
    assert reduce_mod_p(C.point(7, 440), C, 3) == ResidueDisk("affine", 3, 1, 2)
    z = C.point(F(1, 7), F(440, 343))
    assert reduce_mod_p(z, C, 3).label() == "(1,2)"
    assert reduce_mod_p(C.infinity(-1), C, 3).label() == "inf-"


def test_point_parse_and_involution():
    P = CurvePoint.parse("(7, 440)")
    assert P.x == 7 and P.y == 440
    assert P.involution().y == -440
    assert CurvePoint.parse("inf+").involution().kind == "infinity_minus"
    with pytest.raises(ValueError):
        HyperellipticCurve.kms(31).point(2, 3)


def test_local_expansion_satisfies_equation():
    C = HyperellipticCurve.kms(31)
    order = 10
    x, y = C.local_expansion(C.point(1, 8), order)
    acc = TruncatedSeries([], 0, order)
    pw = TruncatedSeries([F(1)], 0, order)
    for c in C.f:
        acc = acc + pw.scale(c)
        pw = pw * x
    assert y * y == acc


def test_expansion_at_infinity():
    C = HyperellipticCurve.kms(31)
    x, y = C.local_expansion(C.infinity(1), 8)
    # y u^3 -> 1 at the plus point
    assert y[-3] == 1


def test_teichmuller_centre_is_on_curve():
    C = HyperellipticCurve.kms(31)
    for d in C.enumerate_disks(3):
        if d.kind == "affine":
            P = d.center(C, 15)
            assert C.contains(P)
            assert reduce_mod_p(P, C, 3) == d


def test_quotient_maps_land_on_elliptic_curve():
    C = HyperellipticCurve.kms(31)
    for P in (C.point(7, 440), C.point(F(1, 7), F(440, 343)), C.point(1, 8)):
        Q1, Q2 = C.kms_quotient_maps(P)
        assert C.elliptic_quotient_contains(Q1)
        assert C.elliptic_quotient_contains(Q2)


def test_lift_x_in_Qp():
    C = HyperellipticCurve.kms(19)
    P = C.lift_x(2, 4, 11, 12)  # f(2) = 445 = 4^2 mod 11
    assert C.contains(P) and P.y.residue() == 4
    assert P.x.equals(PadicElement.from_rational(2, 11, 12), 12)
