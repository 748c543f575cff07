"""Low-order moments determine all the others.

Moments of the unit disk up to order 6 pin down g = |x|^2; integrating
monomials over {g < 1} then reproduces every higher moment.  The same
works for exp(-g) weights on R^n, where moments up to order 2d suffice.
"""
from math import pi, sqrt

from algmoments import extend_moments, extend_moments_expglobal, gaussian_moments_oracle, moments_indicator
from algmoments.regions import disk

y = moments_indicator(disk(), 6)
ref = moments_indicator(disk(), 12)
res = extend_moments(y, 2, [(8, 0), (6, 6), (12, 0)], oracle=lambda a: ref[a])
for a, (ext, orc, rel) in res.checked.items():
    print(f"y_{a} = {ext:.15f}  exact {orc:.15f}  rel {rel:.1e}")
print(f"7 pi / 128 = {7 * pi / 128:.15f}")

g = gaussian_moments_oracle([[1.0]], 4)
res = extend_moments_expglobal(g, 2, [(6,), (8,)])
print("recovered g:", res.recovered.polynomial.terms(1e-9))
print(f"y_6 = {res.targets[(6,)]:.15f}  (15 sqrt(pi)/8 = {15 * sqrt(pi) / 8:.15f})")
