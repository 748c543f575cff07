"""Recover g from moments of exp(-g(x)) dx on R^2.

For g = x^T S x + c the moments are known in closed form.  The square
system Theta (-1, v) = Delta0 y^d gives the non-constant part of g, and
the constant follows from the mass.  Every moment satisfies the Euler-type
identity (n + |a|) y_a = sum_b |b| g_b y_{a+b}.
"""
import numpy as np

from algmoments import euler_identity_check, gaussian_moments_oracle, recover_exp_weight

S = np.array([[1.0, 0.3], [0.3, 0.5]])
y = gaussian_moments_oracle(S, 4, constant=1.0)
rep = recover_exp_weight(y, 2)
print("g =", {a: round(c, 12) for a, c in rep.polynomial.terms(1e-12).items()})
print(f"condition of Theta {rep.extras['condition']:.3g}")

z = gaussian_moments_oracle(S, 8, constant=1.0)
res = euler_identity_check(z, rep.polynomial, 6)
print(f"max Euler residual / y0: {max(abs(v) for v in res.values()) / z.mass:.2e}")
