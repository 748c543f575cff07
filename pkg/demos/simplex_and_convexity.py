"""The unit triangle: a degree-1 kernel that describes only part of the boundary.

M^1_1 built from moments of the triangle {x1, x2 > 0, x1 + x2 < 1} is
singular with kernel (-1, 1, 1), i.e. g = x1 + x2.  The sublevel set
{g < 1} is an unbounded half-plane: 1 - g vanishes on the hypotenuse
only, while the two legs pass through the origin where <x, n_x> = 0.
"""
import numpy as np

from algmoments import assemble_renorm, kernel_solve, moments_indicator, recover_convex
from algmoments.regions import simplex

y = moments_indicator(simplex(), 2)
M = assemble_renorm(y, 1, 1)
print("M^1_1 =\n", np.array2string(M.entries, precision=6))
rep = kernel_solve(M)
print("rank", rep.rank_profile[0]["rank"], "kernel", np.round(rep.kernel, 12))
print("eigenvalues", np.round(np.sort(rep.eigenvalues.real)[::-1], 8))

conv = recover_convex(y, 1, recenter=False)
for note in conv.notes:
    print("note:", note)
