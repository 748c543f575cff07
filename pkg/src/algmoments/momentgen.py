"""Ground-truth moment sequences: closed forms, quadrature and Monte Carlo.

Three kinds of measure are covered: Lebesgue measure on a bounded region,
``exp(p(x)) dx`` on a bounded region, and ``exp(-g(x)) dx`` on all of R^n.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from math import factorial, lgamma, pi

import numpy as np
from scipy import optimize

from .core import (DensePolynomial, compose_affine, enumerate_basis, eval_poly, monomials, partial_derivative,
                   substitution_matrix)
from .errors import NotInConeError
from .quadrature import gauss_legendre, integrate_moments
from .regions import RegionSpec
from .sequence import MomentSequence, affine_pushforward

log = logging.getLogger(__name__)

CLOSED_FORM_KINDS = {"disk", "annulus", "simplex", "box", "ellipsoid"}


# ---- closed forms ---------------------------------------------------------

def ball_moment(alpha) -> float:
    """``int_{|x|<1} x^alpha dx``: zero unless every exponent is even."""
    if any(a % 2 for a in alpha):
        return 0.0
    n, k = len(alpha), sum(alpha)
    logv = sum(lgamma((a + 1) / 2) for a in alpha) - lgamma((k + n) / 2)
    return 2.0 * np.exp(logv) / (k + n)


def simplex_moment(alpha) -> float:
    """``prod(alpha_i!) / (|alpha| + n)!`` on the standard simplex."""
    num = 1
    for a in alpha:
        num *= factorial(a)
    return num / factorial(sum(alpha) + len(alpha))


def box_moment(alpha, lo, hi) -> float:
    out = 1.0
    for a, l, h in zip(alpha, lo, hi):
        out *= (h ** (a + 1) - l ** (a + 1)) / (a + 1)
    return out


def _base_closed_form(region: RegionSpec, max_order: int) -> np.ndarray:
    basis = enumerate_basis(region.n, max_order)
    idx = basis.indices
    kind, p = region.kind, region.params
    if kind == "disk":
        R = p.get("radius", 1.0)
        return np.array([ball_moment(a) * R ** (region.n + sum(a)) for a in idx])
    if kind == "annulus":
        s_ = p["s"]
        return np.array([ball_moment(a) * (1.0 - s_ ** ((region.n + sum(a)) / 2)) for a in idx])
    if kind == "simplex":
        return np.array([simplex_moment(a) for a in idx])
    if kind == "box":
        return np.array([box_moment(a, p["lo"], p["hi"]) for a in idx])
    if kind == "ellipsoid":
        A = np.asarray(p["A"], dtype=float)
        w, V = np.linalg.eigh(A)
        L = V @ np.diag(w**-0.5) @ V.T  # x = L u maps the unit ball onto the ellipsoid
        ball = MomentSequence(region.n, max_order, [ball_moment(a) for a in idx])
        return affine_pushforward(ball, L).values
    raise ValueError(f"no closed form for region kind {kind!r}")


# ---- public operations ----------------------------------------------------

def moments_indicator(region: RegionSpec, max_order: int, method: str = "auto", tol: float = 1e-8,
                      samples: int = 200_000, seed: int = 0) -> MomentSequence:
    """Moments ``y_alpha = int_G x^alpha dx`` for every ``|alpha| <= max_order``.

    ``method`` is ``auto`` (closed form when the region kind has one, else
    quadrature), ``closed-form``, ``quadrature`` or ``monte-carlo``.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    if method == "auto":
        method = "closed-form" if region.kind in CLOSED_FORM_KINDS else "quadrature"
    if method == "closed-form":
        vals = _base_closed_form(region, max_order)
        prov = {"method": "closed-form"}
    elif method == "quadrature":
        lo, hi = region.base_box()
        vals, info = integrate_moments(region.constraints(), region.n, lo, hi, max_order, tol=tol)
        prov = {"method": "quadrature", "tol": tol, **info}
    elif method == "monte-carlo":
        return _monte_carlo(region, max_order, samples, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    prov["region"] = region.describe()
    y = MomentSequence(region.n, max_order, vals, prov)
    if region.translate is not None:
        y = affine_pushforward(y, None, region.shift)
        y = MomentSequence(y.n, y.max_order, y.values, prov)
    return y


def _monte_carlo(region, max_order, samples, seed):
    lo, hi = region.bounding_box()
    rng = np.random.default_rng(np.uint64(seed))
    x = lo + (hi - lo) * rng.random((samples, region.n))
    inside = region.contains(x)
    vol = float(np.prod(hi - lo))
    f = monomials(x, enumerate_basis(region.n, max_order)) * inside[:, None] * vol
    vals = f.mean(axis=0)
    se = f.std(axis=0, ddof=1) / np.sqrt(samples)
    prov = {"method": "monte-carlo", "samples": samples, "seed": int(seed), "stderr": se.tolist(),
            "region": region.describe()}
    return MomentSequence(region.n, max_order, vals, prov)


def moments_exp_density(region: RegionSpec, p: DensePolynomial, max_order: int, tol: float = 1e-8) -> MomentSequence:
    """Moments of ``exp(p(x)) dx`` restricted to ``region``, by quadrature."""
    if p.n != region.n:
        raise ValueError("density polynomial and region dimensions differ")
    # work in the base frame: the weight becomes x -> exp(p(x + t))
    pb = compose_affine(p, np.eye(region.n), region.shift) if region.translate is not None else p
    weight = lambda x: np.exp(eval_poly(pb, x))
    lo, hi = region.base_box()
    vals, info = integrate_moments(region.constraints(), region.n, lo, hi, max_order, tol=tol, weight=weight)
    prov = {"method": "quadrature", "tol": tol, "density": {"exp": p.to_dict()}, "region": region.describe(), **info}
    y = MomentSequence(region.n, max_order, vals, prov)
    if region.translate is not None:
        # weights already transported, so no Jacobian beyond 1 is needed
        C = substitution_matrix(region.n, max_order, np.eye(region.n), region.shift)
        y = MomentSequence(region.n, max_order, C @ vals, prov)
    return y


def _gaussian_frame(g: DensePolynomial):
    """Centre and whitening matrix from a local quadratic model of ``g``."""
    n = g.n
    f = lambda x: float(eval_poly(g, x))
    x0 = np.zeros(n)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            res = optimize.minimize(f, x0, method="BFGS", options={"gtol": 1e-10, "maxiter": 500})
        xs = res.x if np.all(np.isfinite(res.x)) and np.abs(res.x).max() < 1e6 else x0
    except (OverflowError, ValueError):
        xs = x0
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            H[i, j] = _second_derivative(g, i, j, xs)
    H = 0.5 * (H + H.T)
    w, V = np.linalg.eigh(H)
    if w.min() <= 1e-10 * max(1.0, abs(w).max()):
        return xs, np.eye(n)
    return xs, V @ np.diag((w / 2.0) ** -0.5) @ V.T


def _second_derivative(g, i, j, x):
    return float(eval_poly(partial_derivative(partial_derivative(g, i), j), x))


def _tensor_moments(h: DensePolynomial, max_order: int, R: float, panels: int, q: int = 16):
    """Tensor-product composite GL moments of exp(-h) over [-R, R]^n."""
    n = h.n
    t, w = gauss_legendre(q)
    edges = np.linspace(-R, R, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * t).ravel()
    wx = (half[:, None] * w).ravel()
    N = x.size
    # exponent on the grid, accumulated term by term to stay memory-light
    expo = np.zeros((N,) * n)
    pw = x[:, None] ** np.arange(max(h.d, max_order) + 1)
    for a, c in zip(h.basis.indices, h.coeffs):
        if c == 0:
            continue
        term = np.array(c)
        for i, ai in enumerate(a):
            shape = [1] * n
            shape[i] = N
            term = term * pw[:, ai].reshape(shape)
        expo = expo + term
    with np.errstate(over="ignore", under="ignore"):
        W = np.exp(-expo)
    if not np.all(np.isfinite(W)):
        raise NotInConeError("exp(-g) overflows on the truncation box; g is not bounded below")
    for i in range(n):
        shape = [1] * n
        shape[i] = N
        W = W * wx.reshape(shape)
    P = pw[:, : max_order + 1]  # (N, K)
    # contract one axis at a time: T[k1, ..., kn] = sum W * x1^k1 ... xn^kn
    T = W
    for _ in range(n):
        T = np.tensordot(T, P, axes=([0], [0]))
    exps = enumerate_basis(n, max_order).exponents
    return T[tuple(exps.T)], float(np.abs(W).sum())


def moments_exp_global(g: DensePolynomial, max_order: int, tol: float = 1e-10, box_growth_limit: float = 1e3,
                       frame=None) -> MomentSequence:
    """Moments of ``exp(-g(x)) dx`` over R^n.

    The integrand is first centred and whitened with a quadratic model of
    ``g`` (or the given ``frame = (centre, L)``), then integrated on nested
    cubes ``[-R, R]^n`` with R doubling until the increment is below
    ``tol * max(1, |y|)``.  Failure to settle before ``R`` exceeds
    ``box_growth_limit`` means the weight is numerically not integrable.
    """
    n = g.n
    c, L = _gaussian_frame(g) if frame is None else (np.asarray(frame[0], float), np.asarray(frame[1], float))
    h = compose_affine(g, L, c)  # h(u) = g(c + L u)
    panel_cap = {1: 4096, 2: 512, 3: 96}.get(n, 32)

    def at_radius(R):
        panels = max(4, int(np.ceil(R / 2)))
        prev, _ = _tensor_moments(h, max_order, R, panels)
        while True:
            panels *= 2
            cur, _ = _tensor_moments(h, max_order, R, panels)
            if np.all(np.abs(cur - prev) <= 0.1 * tol * np.maximum(1.0, np.abs(cur))):
                return cur, panels
            if panels >= panel_cap:
                return cur, panels
            prev = cur

    R = 4.0
    prev, _ = at_radius(R)
    while True:
        R *= 2.0
        if R > box_growth_limit:
            raise NotInConeError(
                f"integral of exp(-g) did not settle before the truncation box reached half-width {R / 2:g}; "
                "g does not appear to lie in the integrability cone"
            )
        cur, panels = at_radius(R)
        inc = np.abs(cur - prev)
        if not np.all(np.isfinite(cur)):
            raise NotInConeError("moment integrals diverge; g is not in the integrability cone")
        if np.all(inc <= tol * np.maximum(1.0, np.abs(cur))):
            break
        prev = cur
    # back to x = c + L u
    C = substitution_matrix(n, max_order, L, c)
    vals = abs(np.linalg.det(L)) * (C @ cur)
    lo = (c - R * np.abs(L).sum(axis=1)).tolist()
    hi = (c + R * np.abs(L).sum(axis=1)).tolist()
    prov = {"method": "quadrature", "tol": tol, "weight": {"exp_neg": g.to_dict()},
            "truncation_box": {"lo": lo, "hi": hi, "half_width_whitened": R}, "panels": panels}
    return MomentSequence(n, max_order, vals, prov)


@lru_cache(maxsize=None)
def _isserlis(alpha: tuple, C: tuple) -> float:
    if any(a < 0 for a in alpha):
        return 0.0
    k = sum(alpha)
    if k == 0:
        return 1.0
    if k % 2:
        return 0.0
    n = len(alpha)
    Cm = np.array(C).reshape(n, n)
    i = next(j for j, a in enumerate(alpha) if a)
    rest = list(alpha)
    rest[i] -= 1
    total = 0.0
    for j in range(n):
        if rest[j]:
            r2 = list(rest)
            r2[j] -= 1
            total += Cm[i, j] * rest[j] * _isserlis(tuple(r2), C)
    return total


def gaussian_moments_oracle(Sigma, max_order: int, constant: float = 0.0) -> MomentSequence:
    """Exact moments of ``exp(-(x^T Sigma x + constant)) dx`` via Isserlis/Wick.

    The weight is ``Z * N(0, (2 Sigma)^-1)`` with ``Z = pi^(n/2) / sqrt(det Sigma)``.
    """
    S = np.atleast_2d(np.asarray(Sigma, dtype=float))
    if not np.allclose(S, S.T) or np.linalg.eigvalsh(S).min() <= 0:
        raise ValueError("Sigma must be symmetric positive definite")
    n = S.shape[0]
    cov = np.linalg.inv(2.0 * S)
    Z = pi ** (n / 2) / np.sqrt(np.linalg.det(S)) * np.exp(-constant)
    key = tuple(float(v) for v in cov.ravel())
    basis = enumerate_basis(n, max_order)
    vals = np.array([Z * _isserlis(tuple(a), key) for a in basis.indices])
    return MomentSequence(n, max_order, vals, {"method": "closed-form", "oracle": "isserlis",
                                               "Sigma": S.tolist(), "constant": constant})
