# p-adic numbers with tracked precision
# -------------------------------------
# Every PadicElement carries an absolute precision N, meaning the value is
# known modulo p^N.  Arithmetic propagates that precision automatically.

from fractions import Fraction

from qchabauty import PadicElement
from qchabauty.padic import log, sqrt, teichmuller

p = 3
x = PadicElement.from_rational(Fraction(1, 7), p, 10)
y = PadicElement.from_rational(18, p, 6)
print("x =", x, "   digits:", x.series_str())
print("y =", y)

# sums keep the smaller absolute precision, products gain the valuation
print("x + y =", x + y)
print("x * y =", x * y)

# dividing by p^2 costs two digits of absolute precision
print("x / 9 =", x / 9)

# square roots need a residue to pick the branch
three = PadicElement.from_rational(3, 11, 12)
r = sqrt(three, 5)
print("sqrt(3) in Q_11 with residue 5:", r.series_str())

# Teichmueller representatives satisfy w^p = w
w = teichmuller(PadicElement.from_rational(2, 5, 10))
print("Teichmueller lift of 2 in Z_5:", w.series_str(), " w^5 == w:", (w**5).equals(w, 10))

# the logarithm on 1 + pZ_p
print("log(1 + 3) =", log(PadicElement.from_rational(4, p, 12)).series_str())
