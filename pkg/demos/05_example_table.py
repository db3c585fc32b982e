# Rational points on y^2 = x^6 + 31 x^4 + 31 x^2 + 1 via 3-adic quadratic Chabauty
# ---------------------------------------------------------------------------------
# The auxiliary point z0 defaults to the smallest admissible rational point,
# (7, 440).  Points with x^2 = 1 or x = 0 are not admissible: there the two
# elliptic quotient maps give dependent images and G vanishes identically.

from qchabauty import HyperellipticCurve, QCProblem, search_rational_points, solve

C = HyperellipticCurve.kms(31)
known = search_rational_points(C, 10)
print(len(known), "rational points of height <= 10")

pb = QCProblem(C, 3, 30, known_points=known)
print("z0 =", pb.z0)
report = solve(pb, target=7)
print(report.to_text(7))

rational = [c for c in report.candidates if c.matched is not None]
print(len(report.candidates), "candidates,", len(rational), "rational")
