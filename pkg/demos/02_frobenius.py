# Frobenius on de Rham cohomology
# -------------------------------
# For y^2 = x^6 + a x^4 + a x^2 + 1 with good reduction at p, the matrix
# of Frobenius on H^1_dR encodes the zeta function of the reduction.

from qchabauty import HyperellipticCurve, frobenius_matrix

C = HyperellipticCurve.kms(31)
p = 5
fr = frobenius_matrix(C, p, 10)
print("certified precision:", fr.certified_precision)

block = fr.h1_block()
print("Frobenius on H^1_dR:")
for row in block.rows:
    print("   ", [e.series_str() for e in row])

# the trace is an integer: p + 1 - #X(F_p)
n = C.count_points_mod_p(p)
print("#X(F_5) =", n, "  p + 1 - #X(F_p) =", p + 1 - n)
print("trace  =", block.trace())
print("det    =", block.determinant(), " (should be p^2 = 25)")

# a prime of bad reduction is refused
try:
    frobenius_matrix(C, 7, 10)
except ValueError as exc:
    print("p = 7:", exc)
