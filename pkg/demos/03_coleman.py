# Single and double Coleman integrals
# -----------------------------------
# The integrator solves the Frobenius-equivariance systems once and then
# answers integrals between any two points of X(Q_p) minus infinity.

from qchabauty import ColemanIntegrator, HyperellipticCurve

C = HyperellipticCurve.kms(31)
ci = ColemanIntegrator(C, 3, 24)
b = C.point(0, 1)
P = C.point(7, 440)
Q = C.point(1, 8)

I, D = ci.integrals(b, P)
print("int_b^P omega_i:")
for i, v in enumerate(I):
    print(f"  i={i}:", v)

# shuffle: D_ij + D_ji = I_i I_j
print("shuffle for (0,1):", (D[0][1] + D[1][0]).equals(I[0] * I[1], 10))

# the points (1,8) and (7,440) share a residue disk, so this one is "tiny"
print("tiny integral of omega_0 from (1,8) to (7,440):", ci.tiny_integral(0, Q, P))

# the involution (x, y) -> (x, -y) negates every omega_i
Iw = ci.single_integrals(b.involution(), P.involution())
print("w-symmetry:", all(Iw[i].equals(-I[i], 10) for i in range(5)))
