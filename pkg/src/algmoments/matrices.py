"""Moment-matrix families built from a :class:`MomentSequence`.

Rows are indexed by multi-indices ``alpha`` (``|alpha| <= k``), columns by
``beta`` (``|beta| <= d``); column 0 is always the constant monomial, so a
kernel vector ``(-1, g)`` encodes a polynomial ``g`` with ``g(0) = 0``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .core import DensePolynomial, enumerate_basis, format_alpha
from .errors import MissingMomentError
from .sequence import MomentSequence


@dataclass(frozen=True)
class MomentMatrix:
    rows: tuple
    cols: tuple
    entries: np.ndarray
    family: str
    source_order: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        E = np.array(self.entries, dtype=float)
        if E.shape != (len(self.rows), len(self.cols)):
            raise ValueError(f"entries shape {E.shape} does not match labels {len(self.rows)}x{len(self.cols)}")
        E.setflags(write=False)
        object.__setattr__(self, "entries", E)

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + [format_alpha(b) for b in self.cols])
        for a, row in zip(self.rows, self.entries):
            w.writerow([format_alpha(a)] + [repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, family="plain", source_order=0) -> "MomentMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        cols = tuple(tuple(int(v) for v in c.split(",")) for c in rows[0][1:])
        labels = tuple(tuple(int(v) for v in r[0].split(",")) for r in rows[1:])
        E = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
        return cls(labels, cols, E, family, source_order)


def _check(y: MomentSequence, order: int, what: str):
    if order > y.max_order:
        # name the first multi-index the assembly would need
        first = (y.max_order + 1,) + (0,) * (y.n - 1)
        raise MissingMomentError(first, y.max_order) from None


def _sum_index_table(n, k, d):
    """Position of alpha + beta in the basis of degree k + d, shape (s(k), s(d))."""
    rows = enumerate_basis(n, k)
    cols = enumerate_basis(n, d)
    big = enumerate_basis(n, k + d)
    R = rows.exponents[:, None, :] + cols.exponents[None, :, :]
    return np.array([[big.index(tuple(v)) for v in r] for r in R], dtype=np.int64)


def assemble_renorm(y: MomentSequence, d: int, k: int) -> MomentMatrix:
    """``M(alpha, beta) = (n + |alpha| + |beta|) / (n + |alpha|) * y_{alpha+beta}``."""
    _check(y, k + d, "renormalized matrix")
    n = y.n
    rows, cols = enumerate_basis(n, k), enumerate_basis(n, d)
    ra, cb = rows.degrees[:, None], cols.degrees[None, :]
    Y = y.values[_sum_index_table(n, k, d)]
    E = (n + ra + cb) / (n + ra) * Y
    return MomentMatrix(rows.indices, cols.indices, E, "renorm", k + d, {"d": d, "k": k})


def assemble_coordinate(y: MomentSequence, d: int, j: int, variant: str = "derived", k: int | None = None) -> MomentMatrix:
    """Coordinate-wise identity matrix for the vector field ``x_j e_j``.

    ``derived``: ``(1 + a_j + b_j) / (1 + a_j) * y_{alpha+beta}``, the moment
    form of ``int_G f + x_j df/dx_j = 0`` for ``f = x^alpha (1 - g)``.
    ``paper-literal``: the same coefficient times ``y_{alpha+beta-e_j}``, with
    the entry set to 0 when ``a_j + b_j = 0``.
    Rows run over ``|alpha| <= k`` (default ``2d``).
    """
    n = y.n
    if not 0 <= j < n:
        raise ValueError(f"coordinate index {j} out of range for n={n}")
    if variant not in ("derived", "paper-literal"):
        raise ValueError(f"unknown variant {variant!r}")
    k = 2 * d if k is None else k
    rows, cols = enumerate_basis(n, k), enumerate_basis(n, d)
    A = rows.exponents[:, None, j]
    B = cols.exponents[None, :, j]
    coef = (1.0 + A + B) / (1.0 + A)
    if variant == "derived":
        _check(y, k + d, "coordinate matrix")
        Y = y.values[_sum_index_table(n, k, d)]
        E = coef * Y
        order = k + d
    else:
        _check(y, k + d - 1, "coordinate matrix")
        big = y.basis
        E = np.zeros((rows.size, cols.size))
        for r, a in enumerate(rows.indices):
            for c, b in enumerate(cols.indices):
                if a[j] + b[j] == 0:
                    continue
                idx = [ai + bi for ai, bi in zip(a, b)]
                idx[j] -= 1
                E[r, c] = coef[r, c] * y.values[big.index(tuple(idx))]
        order = k + d - 1
    return MomentMatrix(rows.indices, cols.indices, E, f"coordinate({j})", order, {"d": d, "k": k, "j": j, "variant": variant})


def assemble_expdensity(y: MomentSequence, d: int, k: int, p: DensePolynomial) -> MomentMatrix:
    """Matrix for moments of ``exp(p) dx`` on G.

    Column 0: ``(n+|a|) y_a + sum_g |g| p_g y_{a+g}``;
    column b != 0: ``(n+|a|+|b|) y_{a+b} + sum_g |g| p_g y_{a+b+g}``.
    """
    n = y.n
    t = max(p.degree, 0)
    _check(y, k + d + t, "exp-density matrix")
    rows, cols = enumerate_basis(n, k), enumerate_basis(n, d)
    ra, cb = rows.degrees[:, None], cols.degrees[None, :]
    base_idx = _sum_index_table(n, k, d)
    E = (n + ra + cb) * y.values[base_idx]
    big = y.basis
    ab = rows.exponents[:, None, :] + cols.exponents[None, :, :]
    for gamma, pc in zip(p.basis.indices, p.coeffs):
        deg = sum(gamma)
        if deg == 0 or pc == 0:
            continue
        shifted = ab + np.asarray(gamma)
        idx = np.array([[big.index(tuple(v)) for v in r] for r in shifted])
        E = E + deg * pc * y.values[idx]
    return MomentMatrix(rows.indices, cols.indices, E, "exp-density", k + d + t, {"d": d, "k": k, "p": p.to_dict()})


def assemble_plain(y: MomentSequence, d: int) -> MomentMatrix:
    """Usual moment matrix ``M_d(y)(alpha, beta) = y_{alpha+beta}``."""
    _check(y, 2 * d, "moment matrix")
    b = enumerate_basis(y.n, d)
    E = y.values[_sum_index_table(y.n, d, d)]
    return MomentMatrix(b.indices, b.indices, E, "plain", 2 * d, {"d": d})


def assemble_expglobal(y: MomentSequence, d: int) -> MomentMatrix:
    """``y_{a+b}`` in column 0, ``|b| y_{a+b} / (n + |a|)`` elsewhere."""
    _check(y, 2 * d, "exp-global matrix")
    n = y.n
    b = enumerate_basis(n, d)
    Y = y.values[_sum_index_table(n, d, d)]
    ra, cb = b.degrees[:, None], b.degrees[None, :]
    E = np.where(cb == 0, Y, cb * Y / (n + ra))
    return MomentMatrix(b.indices, b.indices, E, "exp-global", 2 * d, {"d": d})


@dataclass(frozen=True)
class DiagonalFactors:
    """Diagonals ``Delta = 1/(n+|a|)``, ``D = max(|a|, 1 if a = 0)``, ``Delta0 = 1 - 1/(n+|a|)``."""

    n: int
    d: int
    delta: np.ndarray
    dee: np.ndarray
    delta0: np.ndarray


def diagonal_factors(n: int, d: int) -> DiagonalFactors:
    deg = enumerate_basis(n, d).degrees.astype(float)
    return DiagonalFactors(n, d, 1.0 / (n + deg), np.where(deg == 0, 1.0, deg), 1.0 - 1.0 / (n + deg))


def theta_matrix(y: MomentSequence, d: int) -> np.ndarray:
    """``Delta M_d(y) D``: equals the exp-global matrix except in column 0."""
    f = diagonal_factors(y.n, d)
    return f.delta[:, None] * assemble_plain(y, d).entries * f.dee[None, :]
