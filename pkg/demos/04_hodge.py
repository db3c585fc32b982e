# Hodge filtration constants
# --------------------------
# These are exact rational data computed from local expansions at the two
# points at infinity.

from qchabauty import HodgeComputation, HyperellipticCurve

C = HyperellipticCurve.kms(31)
hc = HodgeComputation(C)

print("cup product matrix on the eta basis:")
for row in hc.cup_matrix():
    print("   ", [str(v) for v in row])

consts = hc.hodge_constants(C.point(0, 1))
print("c^H zero:", consts.c_is_zero())
print("xi zero:", consts.xi_is_zero())
for k, r in enumerate(consts.r_H):
    print(f"r^H_{k} =", r)

# moving the base point only shifts r^H by a constant
other = hc.hodge_constants(C.point(7, 440))
print("with b = (7,440): r^H_1 =", other.r_H[1])
