"""Origin on the boundary: the coordinate-wise systems.

For the disk centred at (1, 0) the origin sits on the circle, so the
kernel of the renormalized system cannot be scaled to (-1, g).  Stacking
the n coordinate systems instead yields the vanishing polynomial
h = 2 x1 - x1^2 - x2^2 directly.  The literal transcription of those
systems (shifted moment index) has no kernel here.
"""
import numpy as np

from algmoments import RecoveryError, moments_indicator, recover_singular
from algmoments.regions import disk

y = moments_indicator(disk(center=[1.0, 0.0]), 6)
rep = recover_singular(y, 2)
print("normalization:", rep.extras["normalization"])
print("h =", {a: round(c, 12) for a, c in rep.polynomial.terms(1e-10).items()})
print(f"residual {rep.residual:.2e}")

try:
    recover_singular(y, 2, variant="paper-literal")
except RecoveryError as err:
    print("literal variant:", err)
    print("  singular values", np.round(err.report.spectrum, 6))
