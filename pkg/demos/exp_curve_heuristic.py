"""A region whose boundary is not algebraic.

G = {u1 > 0, 1 < u2 < exp(1 - u1)} (the region x1 >= -1, 1 <= x2 <= exp(-x1)
after u1 = x1 + 1) has a transcendental edge.  M^d_d still has an
eigenvalue close to zero, and the matching eigenvector gives a polynomial
whose zero set hugs the boundary.  Going from d = 3 to d = 4 improves the fit.
"""
import numpy as np

from algmoments import approx_boundary, boundary_fit, moments_indicator
from algmoments.regions import exp_curve, exp_curve_boundary

y = moments_indicator(exp_curve(), 8, tol=1e-10)
print(f"mass {y.mass:.12f}  (e - 2 = {np.e - 2:.12f})")

pts = exp_curve_boundary()
for d in (3, 4):
    rep = approx_boundary(y, d)
    ev = np.sort(np.abs(rep.eigenvalues))
    print(f"d={d}: |lambda| smallest {ev[0]:.3e}, next {ev[1]:.3e}, largest {ev[-1]:.6g}")
    print(f"      boundary fit {boundary_fit(rep.polynomial, pts):.4f}")
