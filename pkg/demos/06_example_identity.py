# An identity among values of F1, F2 at points over Q(sqrt 3)
# -----------------------------------------------------------
# For a = 19 and p = 11 the local heights satisfy
#     3 F_i(z2) + F_i(z3) - 6 F_i(z1) = 0
# at three points defined over Q(sqrt 3), embedded in Q_11 with sqrt 3 = 5 mod 11.

from fractions import Fraction

from qchabauty import CurvePoint, HyperellipticCurve, PadicElement, QCProblem
from qchabauty.padic import sqrt

p, W = 11, 23
C = HyperellipticCurve.kms(19)
N = W + 10
r3 = sqrt(PadicElement.from_rational(3, p, N), 5)


def q(c):
    return PadicElement.from_rational(Fraction(c), p, N)


z1 = CurvePoint("affine", r3, q(16))
z2 = CurvePoint("affine", -r3 + q(2), q(-24) * r3 + q(40))
z3 = CurvePoint(
    "affine",
    q(Fraction(-39, 71)) * r3 + q(Fraction(98, 71)),
    q(Fraction(-2736216, 357911)) * r3 + q(Fraction(5551000, 357911)),
)
print("points on the curve:", all(C.contains(z) for z in (z1, z2, z3)))

pb = QCProblem(C, p, W)
F = [pb.F_values(z) for z in (z1, z2, z3)]
for i in range(2):
    v = F[1][i] * 3 + F[2][i] - F[0][i] * 6
    print(f"3F{i + 1}(z2) + F{i + 1}(z3) - 6F{i + 1}(z1) =", v)
