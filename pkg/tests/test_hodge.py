"""Exact Hodge filtration constants at infinity."""

from fractions import Fraction

import pytest

from qchabauty.curve import HyperellipticCurve
from qchabauty.hodge import HodgeComputation, HodgeError, PairingConstants, YFunction, hodge_constants, kms_tau

F = Fraction


def polar(s):
    return {e: c for e, c in s.terms() if e < 0 and c != 0}


@pytest.fixture(scope="module")
def hc31():
    return HodgeComputation(HyperellipticCurve.kms(31))


def test_kms_tau_is_antisymmetric():
    t = kms_tau()
    t.check_antisymmetric()
    assert t[0, 1, 0] == -1 and t[1, 0, 0] == 1
    assert t[1, 2, 1] == 1 and t[0, 3, 1] == -1 and t[2, 3, 2] == -1
    assert set(t.to_json()) == {"T0^T1", "T0^T3", "T1^T2", "T2^T3"}


def test_cup_matrix(hc31):
    C = hc31.cup_matrix()
    for i in range(4):
        for j in range(4):
            assert C[i][j] == -C[j][i]
    assert C[0][2] == F(1, 2) and C[1][3] == F(1, 2)
    assert C[0][1] == C[0][3] == C[1][2] == C[2][3] == 0


def test_tau_must_respect_cup_product():
    bad = PairingConstants.from_wedges(4, 1, {(0, 2): {0: 1}})
    with pytest.raises(HodgeError):
        HodgeComputation(HyperellipticCurve.kms(31), tau=bad).check_tau()


def test_kms_constants(hc31):
    C = hc31.curve
    hc = hc31.hodge_constants(C.point(0, 1))
    assert hc.c_is_zero() and hc.xi_is_zero()
    assert hc.r_H[0].is_zero()
    assert hc.r_H[1].x_polynomial() == [0, F(1, 2)]
    r2 = hc.r_H[2].x_polynomial()
    assert r2[1] == F(-31, 4) and r2[3] == F(-1, 12)


@pytest.mark.parametrize("a", [5, 19, 31, F(7, 2)])
def test_constants_across_family(a):
    C = HyperellipticCurve.kms(a)
    hc = hodge_constants(C)
    assert hc.c_is_zero() and hc.xi_is_zero()
    assert hc.r_H[1].x_polynomial() == [0, F(1, 2)]


def test_basepoint_shifts_r_by_a_constant():
    C = HyperellipticCurve.kms(31)
    hc = hodge_constants(C, C.point(7, 440))
    assert hc.r_H[1].x_polynomial() == [F(-7, 2), F(1, 2)]
    for r in hc.r_H:
        assert r(C.point(7, 440)) == 0


def test_principal_parts_are_matched(hc31):
    # w_x - r - sum c_i f_i must be regular at both points at infinity
    C = hc31.curve
    hc = hc31.hodge_constants(C.point(0, 1))
    for k in range(3):
        for sign in (1, -1):
            ch = hc31.charts(sign)
            rest = ch.g[k] - hc.r_H[k].local(C, sign, hc31.order)
            for i in range(4):
                rest = rest - ch.f[i].scale(hc.c_H[i][k])
            assert polar(rest) == {}


def test_compute_cr_recovers_a_known_function(hc31):
    C = hc31.curve
    b = C.point(0, 1)
    r0 = YFunction({(2, 0): F(3), (0, 1): F(5), (1, 0): F(-1)})
    tails = {s: r0.local(C, s, hc31.order) for s in (1, -1)}
    c, r = hc31.compute_cr(tails, b)
    assert all(v == 0 for v in c)
    shifted = r0 + YFunction({(0, 0): -F(r0(b))})
    assert r == shifted


def test_compute_cr_recovers_c(hc31):
    b = hc31.curve.point(0, 1)
    tails = {s: hc31.charts(s).f[3] for s in (1, -1)}
    c, r = hc31.compute_cr(tails, b)
    assert c == [0, 0, 0, 1]
    assert r.is_zero()
