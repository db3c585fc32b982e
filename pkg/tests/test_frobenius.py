"""Frobenius on H^1_dR against point counts over F_p and F_p^2."""

import random

import pytest

from qchabauty.curve import HyperellipticCurve
from qchabauty.frobenius import frobenius_matrix
from qchabauty.padic import PadicElement


def count_fp2(f, p):
    # F_p^2 = F_p[s]/(s^2 - n) with n a non-residue
    n = next(c for c in range(2, p) if pow(c, (p - 1) // 2, p) == p - 1)

    def mul(a, b):
        return ((a[0] * b[0] + n * a[1] * b[1]) % p, (a[0] * b[1] + a[1] * b[0]) % p)

    def is_square(a):
        if a == (0, 0):
            return None
        # a is a square iff a^((p^2 - 1)/2) = 1
        e, r, base = (p * p - 1) // 2, (1, 0), a
        while e:
            if e & 1:
                r = mul(r, base)
            base = mul(base, base)
            e >>= 1
        return r == (1, 0)

    total = 2
    coeffs = [int(c) % p for c in f]
    for u in range(p):
        for v in range(p):
            x, acc = (u, v), (0, 0)
            for c in reversed(coeffs):
                acc = mul(acc, x)
                acc = ((acc[0] + c) % p, acc[1])
            sq = is_square(acc)
            total += 1 if sq is None else (2 if sq else 0)
    return total


def as_int(x, p):
    n = x.abs_precision
    v = x.lift() % p**n
    return v - p**n if v > p**n // 2 else v


@pytest.mark.parametrize("a,p", [(31, 3), (31, 5), (19, 11), (2, 5), (4, 7), (6, 13)])
def test_charpoly_matches_zeta_function(a, p):
    C = HyperellipticCurve.kms(a)
    N = 8
    block = frobenius_matrix(C, p, N).h1_block()
    N1, N2 = C.count_points_mod_p(p), count_fp2(C.f, p)
    s1 = p + 1 - N1
    s2 = (s1 * s1 - (p * p + 1 - N2)) // 2  # trace of wedge^2
    assert as_int(block.trace(), p) == s1
    det = block.determinant()
    assert det.equals(PadicElement.from_rational(p * p, p, N), min(N, det.abs_precision))
    cp = block.charpoly()  # monic, highest degree last or first
    coeffs = [as_int(c, p) for c in cp]
    want = [p * p, -p * s1, s2, -s1, 1]
    assert coeffs == want or coeffs == want[::-1]


def test_random_trace_against_count():
    rng = random.Random(2024)
    done = 0
    while done < 6:
        a = rng.randint(-40, 40)
        p = rng.choice([3, 5, 7, 11])
        try:
            C = HyperellipticCurve.kms(a)
        except ValueError:
            continue
        if not C.has_good_reduction(p):
            continue
        tr = frobenius_matrix(C, p, 6).h1_block().trace()
        assert as_int(tr, p) == p + 1 - C.count_points_mod_p(p)
        done += 1


def test_precision_is_stable_when_raised():
    C = HyperellipticCurve.kms(31)
    lo = frobenius_matrix(C, 3, 10)
    hi = frobenius_matrix(C, 3, 16)
    n = lo.certified_precision
    assert n >= 8
    for i in range(5):
        for j in range(5):
            assert lo.matrix[i, j].equals(hi.matrix[i, j], n)


def test_bad_reduction_rejected():
    from qchabauty.curve import BadReductionError

    with pytest.raises(BadReductionError):
        frobenius_matrix(HyperellipticCurve.kms(31), 7, 8)
