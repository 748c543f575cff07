from math import gamma, pi, sqrt, e

import numpy as np
import pytest

from algmoments import (DensePolynomial, MissingMomentError, MomentSequence, NotInConeError, gaussian_moments_oracle,
                        moments_exp_density, moments_exp_global, moments_indicator)
from algmoments.core import enumerate_basis
from algmoments.momentgen import ball_moment, simplex_moment
from algmoments.regions import annulus, box, disk, ellipsoid, exp_curve, parse_fixture, simplex
from algmoments.sequence import affine_pushforward, translate_moments


def test_disk_closed_forms():
    y = moments_indicator(disk(), 8)
    assert y[(0, 0)] == pytest.approx(pi, rel=1e-15)
    assert y[(2, 0)] == pytest.approx(pi / 4, rel=1e-15)
    assert y[(8, 0)] == pytest.approx(7 * pi / 128, rel=1e-14)
    assert y[(1, 0)] == 0.0


def test_ball_volume_in_3d():
    assert ball_moment((0, 0, 0)) == pytest.approx(4 * pi / 3, rel=1e-15)


def test_simplex_rationals():
    y = moments_indicator(simplex(), 2)
    assert y.values.tolist() == pytest.approx([1 / 2, 1 / 6, 1 / 6, 1 / 12, 1 / 24, 1 / 12], rel=1e-15)
    assert simplex_moment((1, 1, 1)) == pytest.approx(1 / 720, rel=1e-15)


def test_annulus_mass():
    y = moments_indicator(annulus(2 / 3), 4)
    assert y.mass == pytest.approx(pi / 3, rel=1e-14)


@pytest.mark.parametrize("region", [
    disk(), annulus(0.5), simplex(), box([-1.0, 0.0], [2.0, 0.5]),
    ellipsoid([[2.0, 0.5], [0.5, 1.0]], center=[0.3, -0.2]),
    disk(center=[1.0, 0.0]),
], ids=["disk", "annulus", "simplex", "box", "ellipsoid", "shifted-disk"])
def test_quadrature_matches_closed_form(region):
    exact = moments_indicator(region, 8, method="closed-form")
    quad = moments_indicator(region, 8, method="quadrature", tol=1e-12)
    assert np.allclose(quad.values, exact.values, rtol=1e-10, atol=1e-12)


def test_scaling_covariance():
    # moments of lambda * G are lambda^(n + |alpha|) times those of G
    lam = 1.7
    y = moments_indicator(ellipsoid([[3.0, 1.0], [1.0, 2.0]]), 6)
    z = affine_pushforward(y, lam * np.eye(2), None)
    deg = enumerate_basis(2, 6).degrees
    assert np.allclose(z.values, lam ** (2 + deg) * y.values, rtol=1e-13)


def test_translation_consistency():
    shift = np.array([0.4, -0.3])
    direct = moments_indicator(disk(center=shift), 7)
    moved = translate_moments(moments_indicator(disk(), 7), shift)
    assert np.allclose(direct.values, moved.values, rtol=1e-13, atol=1e-15)


def test_monte_carlo_within_four_standard_errors():
    y = moments_indicator(annulus(0.5), 4, method="monte-carlo", samples=100_000, seed=7)
    exact = moments_indicator(annulus(0.5), 4)
    se = np.array(y.provenance["stderr"])
    assert np.all(np.abs(y.values - exact.values) <= 4 * se + 1e-15)
    again = moments_indicator(annulus(0.5), 4, method="monte-carlo", samples=100_000, seed=7)
    assert np.array_equal(y.values, again.values)


def test_exp_curve_mass():
    y = moments_indicator(exp_curve(), 2, tol=1e-12)
    assert y.mass == pytest.approx(e - 2, rel=1e-12)


def test_exp_density_with_zero_exponent_is_indicator():
    zero = DensePolynomial.zero(2, 1)
    y = moments_exp_density(disk(), zero, 4, tol=1e-12)
    assert np.allclose(y.values, moments_indicator(disk(), 4).values, rtol=1e-11, atol=1e-14)


def test_exp_density_linear_exponent_one_dimension():
    # int_0^1 x^a e^x dx on a box [0,1] x [0,1] with p = x1
    p = DensePolynomial.from_terms(2, {(1, 0): 1.0})
    y = moments_exp_density(box([0.0, 0.0], [1.0, 1.0]), p, 2, tol=1e-12)
    assert y[(0, 0)] == pytest.approx(e - 1, rel=1e-11)
    assert y[(1, 0)] == pytest.approx(1.0, rel=1e-11)


def test_gaussian_oracle_one_dimension():
    y = gaussian_moments_oracle([[1.0]], 6)
    assert y[(0,)] == pytest.approx(sqrt(pi), rel=1e-15)
    assert y[(2,)] == pytest.approx(sqrt(pi) / 2, rel=1e-15)
    assert y[(6,)] == pytest.approx(15 * sqrt(pi) / 8, rel=1e-15)
    assert y[(3,)] == 0.0


def test_gaussian_oracle_rejects_indefinite():
    with pytest.raises(ValueError):
        gaussian_moments_oracle([[1.0, 2.0], [2.0, 1.0]], 2)


@pytest.mark.parametrize("Sigma,c", [
    ([[1.0]], 0.0),
    ([[1.0, 0.3], [0.3, 0.5]], 1.0),
])
def test_exp_global_matches_oracle(Sigma, c):
    S = np.array(Sigma)
    n = S.shape[0]
    terms = {}
    for i in range(n):
        for j in range(i, n):
            a = [0] * n
            a[i] += 1
            a[j] += 1
            terms[tuple(a)] = S[i, j] * (1 if i == j else 2)
    terms[(0,) * n] = c
    g = DensePolynomial.from_terms(n, terms, d=2)
    y = moments_exp_global(g, 6, tol=1e-12)
    ref = gaussian_moments_oracle(S, 6, constant=c)
    assert np.allclose(y.values, ref.values, rtol=1e-10, atol=1e-12)


def test_exp_global_quartic_against_gamma():
    # int exp(-x^4) x^2 dx = Gamma(3/4) / 2
    g = DensePolynomial.from_terms(1, {(4,): 1.0})
    y = moments_exp_global(g, 2, tol=1e-12)
    assert y[(0,)] == pytest.approx(2 * gamma(5 / 4), rel=1e-10)
    assert y[(2,)] == pytest.approx(gamma(3 / 4) / 2, rel=1e-10)


@pytest.mark.parametrize("terms", [{(2,): -1.0}, {(1,): 1.0}], ids=["negative-quadratic", "linear"])
def test_exp_global_not_integrable(terms):
    with pytest.raises(NotInConeError) as info:
        moments_exp_global(DensePolynomial.from_terms(1, terms), 2, box_growth_limit=100)
    assert info.value.to_dict()["error"] == "not-in-cone-C"


def test_missing_moment_is_reported():
    y = moments_indicator(disk(), 2)
    with pytest.raises(MissingMomentError) as info:
        y[(3, 0)]
    assert info.value.alpha == (3, 0)


def test_moment_file_roundtrip():
    y = moments_indicator(simplex(), 3)
    z = MomentSequence.from_json(y.to_json())
    assert np.array_equal(y.values, z.values)
    assert z.provenance["method"] == "closed-form"


@pytest.mark.parametrize("text,kind", [
    ("disk", "disk"), ("annulus:s=0.6667", "annulus"), ("simplex", "simplex"), ("exp-curve", "exp-curve-demo"),
    ("box:lo=0,0;hi=1,2", "box"), ("shifted-disk:c=1,0", "disk"),
])
def test_parse_fixture(text, kind):
    assert parse_fixture(text).kind == kind


def test_parse_fixture_unknown():
    with pytest.raises(ValueError):
        parse_fixture("torus")
