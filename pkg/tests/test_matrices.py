from fractions import Fraction

import numpy as np
import pytest

from algmoments import (DensePolynomial, MissingMomentError, MomentMatrix, assemble_coordinate, assemble_expdensity,
                        assemble_expglobal, assemble_plain, assemble_renorm, diagonal_factors, gaussian_moments_oracle,
                        moments_indicator, theta_matrix)
from algmoments.core import enumerate_basis
from algmoments.regions import annulus, disk, ellipsoid, exp_curve, simplex

# reference eigenvalues of M^4_4 on the exp-curve fixture, listed at 1/100
# of the values the matrix definition gives
EXP_CURVE_EIGS_REFERENCE = [
    2.554403541590561, 0.029721326859401, 0.004701287525356, -0.001205165323011,
    0.000501376438286, 0.000034728492891, -0.000014265137533, 0.000004783118091,
    0.000000553859294, -0.000000246021037, 0.000000011479566, 0.000000004666064,
    -0.000000001994621, 0.000000000000000, 0.000000000003563,
]


def test_simplex_matrix_is_exact():
    y = moments_indicator(simplex(), 2)
    M = assemble_renorm(y, 1, 1)
    F = Fraction
    ref = [[F(1, 2), F(1, 4), F(1, 4)], [F(1, 6), F(1, 9), F(1, 18)], [F(1, 6), F(1, 18), F(1, 9)]]
    assert np.abs(M.entries - np.array(ref, dtype=float)).max() <= 1e-15
    assert M.rows == ((0, 0), (1, 0), (0, 1))


def test_renorm_shape_and_labels():
    y = moments_indicator(disk(), 6)
    M = assemble_renorm(y, 2, 4)
    assert M.shape == (15, 6)
    assert M.source_order == 6
    assert M.params == {"d": 2, "k": 4}


def test_renorm_missing_moment():
    y = moments_indicator(disk(), 5)
    with pytest.raises(MissingMomentError) as info:
        assemble_renorm(y, 2, 4)
    assert info.value.alpha == (6, 0)


def test_renorm_kernel_on_disk():
    y = moments_indicator(disk(), 4)
    M = assemble_renorm(y, 2, 2)
    v = np.array([-1.0, 0, 0, 1.0, 0, 1.0])
    assert np.abs(M.entries @ v).max() < 1e-14


def test_annulus_rank_profile():
    y = moments_indicator(annulus(2 / 3), 12)
    sv = np.linalg.svd(assemble_renorm(y, 4, 4).entries, compute_uv=False)
    assert np.sum(sv < 1e-8 * sv[0]) == 1
    for d in (2, 3):
        sv = np.linalg.svd(assemble_renorm(y, d, d).entries, compute_uv=False)
        assert np.sum(sv < 1e-8 * sv[0]) == 0


def test_kernel_scale_invariance():
    # scaling every moment by c scales the matrix but keeps its kernel
    y = moments_indicator(ellipsoid([[2.0, 0.3], [0.3, 1.0]]), 6)
    M1 = assemble_renorm(y, 2, 4).entries
    M2 = assemble_renorm(y.scaled(37.0), 2, 4).entries
    assert np.allclose(M2, 37.0 * M1, rtol=1e-15)


def test_csv_roundtrip():
    y = moments_indicator(simplex(), 4)
    M = assemble_renorm(y, 2, 2)
    text = M.to_csv()
    assert text.splitlines()[0] == ',"0,0","1,0","0,1","2,0","1,1","0,2"'
    back = MomentMatrix.from_csv(text)
    assert np.array_equal(back.entries, M.entries)
    assert back.rows == M.rows


def test_coordinate_rows_sum_to_renorm():
    # sum_j of the x_j e_j identities, reweighted, is the Euler/Stokes identity
    y = moments_indicator(annulus(0.5), 8)
    d, k = 2, 3
    rows = enumerate_basis(2, k)
    cols = enumerate_basis(2, d)
    total = sum((1.0 + rows.exponents[:, None, j]) * assemble_coordinate(y, d, j, k=k).entries for j in range(2))
    R = assemble_renorm(y, d, k).entries
    assert np.allclose(total, (2 + rows.degrees[:, None]) * R, rtol=1e-14)
    assert cols.size == R.shape[1]


def test_coordinate_kernel_on_shifted_disk():
    y = moments_indicator(disk(center=[1.0, 0.0]), 6)
    h = np.array([0.0, 2.0, 0.0, -1.0, 0.0, -1.0])  # 2 x1 - x1^2 - x2^2 vanishes on the circle
    for j in range(2):
        M = assemble_coordinate(y, 2, j)
        assert np.abs(M.entries @ h).max() < 1e-13


def test_coordinate_paper_literal_entries():
    y = moments_indicator(disk(), 4)
    M = assemble_coordinate(y, 1, 0, variant="paper-literal", k=1)
    # alpha = (0,0), beta = (0,0): a_j + b_j = 0 -> 0
    assert M.entries[0, 0] == 0.0
    # alpha = (1,0), beta = (1,0): (1+1+1)/(1+1) * y_(1,0)
    assert M.entries[1, 1] == pytest.approx(1.5 * y[(1, 0)], abs=0)
    assert M.source_order == 1


def test_coordinate_bad_arguments():
    y = moments_indicator(disk(), 6)
    with pytest.raises(ValueError):
        assemble_coordinate(y, 2, 2)
    with pytest.raises(ValueError):
        assemble_coordinate(y, 2, 0, variant="other")


def test_expdensity_with_zero_exponent():
    y = moments_indicator(disk(), 6)
    zero = DensePolynomial.zero(2, 1)
    E = assemble_expdensity(y, 2, 2, zero).entries
    R = assemble_renorm(y, 2, 2).entries
    rows = enumerate_basis(2, 2).degrees
    # column 0 and other columns both scale by (n + |alpha|)
    assert np.allclose(E, (2 + rows[:, None]) * R, rtol=1e-15)


def test_expglobal_factorization_identity():
    S = np.array([[1.0, 0.2], [0.2, 0.7]])
    y = gaussian_moments_oracle(S, 4)
    d = 2
    M = assemble_expglobal(y, d).entries
    T = theta_matrix(y, d)
    f = diagonal_factors(2, d)
    ycol = y.values[: enumerate_basis(2, d).size]
    E0 = np.zeros_like(M)
    E0[:, 0] = f.delta0 * ycol
    assert np.allclose(M - T, E0, rtol=1e-14, atol=1e-15)
    # off column 0 the two agree entry-wise
    assert np.allclose(M[:, 1:], T[:, 1:], rtol=1e-14)


def test_plain_moment_matrix_is_symmetric_psd():
    y = moments_indicator(ellipsoid([[1.0, 0.4], [0.4, 2.0]]), 6)
    P = assemble_plain(y, 3).entries
    assert np.allclose(P, P.T)
    assert np.linalg.eigvalsh(P).min() > 0


def test_exp_curve_spectrum_matches_reference_up_to_scale():
    y = moments_indicator(exp_curve(), 8, tol=1e-12)
    ev = np.linalg.eigvals(assemble_renorm(y, 4, 4).entries)
    assert np.abs(ev.imag).max() == 0
    ours = np.sort(ev.real / 100.0)
    ref = np.sort(EXP_CURVE_EIGS_REFERENCE)
    assert np.abs(ours - ref).max() < 1e-11


def test_annulus_matrix_matches_reference_up_to_scale():
    # 4-digit reference listing of M^4_4 / pi
    y = moments_indicator(annulus(2 / 3), 8)
    M = assemble_renorm(y, 4, 4).entries / np.pi
    assert M[0, 0] == pytest.approx(0.3333, abs=5e-5)
    assert M[0, 3] == pytest.approx(0.2778, abs=5e-5)
    assert M[3, 0] == pytest.approx(0.1389, abs=5e-5)
    assert M[6, 1] == pytest.approx(0.1056, abs=5e-5)
    assert M[10, 10] == pytest.approx(0.0791, abs=5e-5)
    assert M[14, 12] == pytest.approx(0.0113, abs=5e-5)
    ref = [0.6562, -0.0595, 0.1624, 0.2941, 0.2941, 0.0053, 0, 0.0628,
               -0.0021, 0.0178, 0.0178, -0.0063, -0.0063, -0.0007, 0.0045]
    ev = np.linalg.eigvals(M)
    assert np.abs(np.sort(ev.real) - np.sort(ref)).max() < 5e-5


def test_annulus_null_eigenvector_matches_reference():
    y = moments_indicator(annulus(2 / 3), 8)
    w, V = np.linalg.eig(assemble_renorm(y, 4, 4).entries)
    v = V[:, np.argmin(np.abs(w))].real
    v = v / np.linalg.norm(v) * np.sign(v[0])
    ref = [0.1925, 0, 0, -0.4811, 0, -0.4811, 0, 0, 0, 0, 0.2887, 0, 0.5774, 0, 0.2887]
    assert np.abs(v - ref).max() < 5e-5


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_simplex_kernel_is_multiples_of_the_hypotenuse(d):
    # <x, n> vanishes on the legs, so the kernel of M^d_d is (1 - x1 - x2) * (degree d - 1)
    y = moments_indicator(simplex(), 2 * d)
    M = assemble_renorm(y, d, d).entries
    sv = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(sv > 1e-8 * sv[0]))
    assert rank == enumerate_basis(2, d).size - enumerate_basis(2, d - 1).size
    v = np.zeros(M.shape[1])
    v[:3] = [-1.0, 1.0, 1.0]
    assert np.abs(M @ v).max() < 1e-15
