"""Multi-indices, the graded monomial basis and dense polynomials over it.

Monomials are ordered graded-lexicographically with ``x1 > x2 > ... > xn``:
all degree-k exponents precede degree-(k+1) ones, and inside a degree the
exponent tuples are sorted in descending lexicographic order.  For ``n=2``
this gives ``1, x1, x2, x1^2, x1 x2, x2^2, x1^3, ...``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

MultiIndex = tuple  # tuple[int, ...]


def s(n: int, d: int) -> int:
    """Dimension of the space of n-variate polynomials of degree <= d."""
    return comb(n + d, n)


def _exponents_of_degree(n: int, k: int):
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _exponents_of_degree(n - 1, k - first):
            yield (first,) + rest


@dataclass(frozen=True)
class Basis:
    """Graded-lex monomial basis of R[x]_d in n variables."""

    n: int
    d: int
    indices: tuple = field(repr=False)
    _position: dict = field(repr=False, compare=False, hash=False)

    def __len__(self):
        return len(self.indices)

    @property
    def size(self) -> int:
        return len(self.indices)

    def index(self, alpha: Sequence[int]) -> int:
        try:
            return self._position[tuple(alpha)]
        except KeyError:
            raise KeyError(f"multi-index {tuple(alpha)} not in basis (n={self.n}, d={self.d})") from None

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._position

    @property
    def degrees(self) -> np.ndarray:
        return _degrees(self.n, self.d)

    @property
    def exponents(self) -> np.ndarray:
        """``(size, n)`` integer array of exponents."""
        return _exponent_array(self.n, self.d)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "d": self.d, "indices": [list(a) for a in self.indices]})

    @classmethod
    def from_json(cls, text: str) -> "Basis":
        obj = json.loads(text)
        basis = enumerate_basis(obj["n"], obj["d"])
        if [list(a) for a in basis.indices] != obj["indices"]:
            raise ValueError("serialized indices are not in graded-lex order")
        return basis


@lru_cache(maxsize=None)
def enumerate_basis(n: int, d: int) -> Basis:
    """Return the graded-lex basis of all exponents with ``|alpha| <= d``."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got n={n}")
    if d < 0:
        raise ValueError(f"degree must be >= 0, got d={d}")
    indices = tuple(a for k in range(d + 1) for a in _exponents_of_degree(n, k))
    return Basis(n, d, indices, {a: i for i, a in enumerate(indices)})


@lru_cache(maxsize=None)
def _exponent_array(n, d):
    arr = np.array(enumerate_basis(n, d).indices, dtype=np.int64).reshape(-1, n)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _degrees(n, d):
    deg = _exponent_array(n, d).sum(axis=1)
    deg.setflags(write=False)
    return deg


def grlex_key(alpha: Sequence[int]):
    """Sort key realizing the basis order (ascending position)."""
    return (sum(alpha),) + tuple(-a for a in alpha)


def monomials(x: np.ndarray, basis: Basis) -> np.ndarray:
    """Evaluate every basis monomial at the points ``x`` (shape ``(..., n)``).

    Returns an array of shape ``(..., size)``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != basis.n:
        raise ValueError(f"points have dimension {x.shape[-1]}, basis has n={basis.n}")
    exps = basis.exponents
    # power table: (..., n, d+1)
    powers = x[..., :, None] ** np.arange(basis.d + 1)
    out = np.ones(x.shape[:-1] + (basis.size,))
    for i in range(basis.n):
        out = out * powers[..., i, exps[:, i]]
    return out


def _shift_table(n: int, d: int, j: int) -> np.ndarray:
    """Position of alpha + e_j in the degree-(d+1) basis for each alpha of degree <= d."""
    lo = enumerate_basis(n, d)
    hi = enumerate_basis(n, d + 1)
    out = np.empty(lo.size, dtype=np.int64)
    for i, a in enumerate(lo.indices):
        b = list(a)
        b[j] += 1
        out[i] = hi.index(b)
    return out


@dataclass(frozen=True)
class DensePolynomial:
    """Polynomial stored as a coefficient vector over ``enumerate_basis(n, d)``."""

    n: int
    d: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size != s(self.n, self.d):
            raise ValueError(f"expected {s(self.n, self.d)} coefficients for n={self.n}, d={self.d}; got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def basis(self) -> Basis:
        return enumerate_basis(self.n, self.d)

    @classmethod
    def zero(cls, n, d):
        return cls(n, d, np.zeros(s(n, d)))

    @classmethod
    def constant(cls, n, value, d=0):
        c = np.zeros(s(n, d))
        c[0] = value
        return cls(n, d, c)

    @classmethod
    def from_terms(cls, n: int, terms: dict, d: int | None = None) -> "DensePolynomial":
        """Build from a ``{alpha: coefficient}`` mapping."""
        deg = max((sum(a) for a in terms), default=0)
        d = deg if d is None else d
        if deg > d:
            raise ValueError(f"term of degree {deg} exceeds d={d}")
        basis = enumerate_basis(n, d)
        c = np.zeros(basis.size)
        for a, v in terms.items():
            if len(a) != n:
                raise ValueError(f"multi-index {a} has wrong length for n={n}")
            c[basis.index(a)] += v
        return cls(n, d, c)

    def terms(self, tol: float = 0.0) -> dict:
        return {a: float(c) for a, c in zip(self.basis.indices, self.coeffs) if abs(c) > tol}

    def __getitem__(self, alpha) -> float:
        alpha = tuple(alpha)
        if sum(alpha) > self.d:
            return 0.0
        return float(self.coeffs[self.basis.index(alpha)])

    @property
    def degree(self) -> int:
        """Actual total degree (-1 for the zero polynomial)."""
        nz = np.nonzero(self.coeffs)[0]
        if nz.size == 0:
            return -1
        return int(self.basis.degrees[nz[-1]])

    def __call__(self, x):
        return eval_poly(self, x)

    def with_degree(self, d: int) -> "DensePolynomial":
        """Re-embed in the basis of degree ``d`` (padding or truncating zeros)."""
        if d == self.d:
            return self
        if d < self.d:
            if np.any(self.coeffs[s(self.n, d):] != 0):
                raise ValueError(f"polynomial has terms above degree {d}")
            return DensePolynomial(self.n, d, self.coeffs[: s(self.n, d)])
        c = np.zeros(s(self.n, d))
        c[: self.coeffs.size] = self.coeffs
        return DensePolynomial(self.n, d, c)

    def __add__(self, other):
        if np.isscalar(other):
            c = self.coeffs.copy()
            c[0] += other
            return DensePolynomial(self.n, self.d, c)
        _check_dim(self, other)
        d = max(self.d, other.d)
        return DensePolynomial(self.n, d, self.with_degree(d).coeffs + other.with_degree(d).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return DensePolynomial(self.n, self.d, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return DensePolynomial(self.n, self.d, self.coeffs * other)
        return multiply(self, other)

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, obj: dict) -> "DensePolynomial":
        return cls(int(obj["n"]), int(obj["d"]), np.asarray(obj["coeffs"], dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DensePolynomial":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, DensePolynomial) or self.n != other.n:
            return NotImplemented
        d = max(self.d, other.d)
        return bool(np.array_equal(self.with_degree(d).coeffs, other.with_degree(d).coeffs))

    __hash__ = None

    def __repr__(self):
        shown = ", ".join(f"{a}: {c:.6g}" for a, c in self.terms().items())
        return f"DensePolynomial(n={self.n}, d={self.d}, {{{shown}}})"


def _check_dim(p, q):
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")


def eval_poly(p: DensePolynomial, x) -> np.ndarray | float:
    """Evaluate ``p`` at a point or at an array of points of shape ``(..., n)``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != p.n:
        raise ValueError(f"point dimension does not match polynomial dimension n={p.n}")
    val = monomials(x, p.basis) @ p.coeffs
    return float(val) if val.ndim == 0 else val


def homogeneous_part(p: DensePolynomial, k: int) -> DensePolynomial:
    """Degree-k homogeneous component of ``p`` (same basis, other degrees zeroed)."""
    if not 0 <= k <= p.d:
        raise ValueError(f"degree {k} outside 0..{p.d}")
    return DensePolynomial(p.n, p.d, np.where(p.basis.degrees == k, p.coeffs, 0.0))


def euler_weighted_sum(p: DensePolynomial) -> DensePolynomial:
    """Return ``sum_k k * p_k``, which equals ``<x, grad p(x)>``."""
    return DensePolynomial(p.n, p.d, p.coeffs * p.basis.degrees)


def partial_derivative(p: DensePolynomial, j: int) -> DensePolynomial:
    d_out = max(p.d - 1, 0)
    out = np.zeros(s(p.n, d_out))
    if p.d == 0:
        return DensePolynomial(p.n, 0, out)
    target = enumerate_basis(p.n, d_out)
    for a, c in zip(p.basis.indices, p.coeffs):
        if a[j] and c:
            b = list(a)
            b[j] -= 1
            out[target.index(b)] += a[j] * c
    return DensePolynomial(p.n, d_out, out)


def gradient(p: DensePolynomial, x) -> np.ndarray:
    """Gradient of ``p`` at points ``x`` (shape ``(..., n)``)."""
    return np.stack([eval_poly(partial_derivative(p, j), x) for j in range(p.n)], axis=-1)


def multiply(p: DensePolynomial, q: DensePolynomial) -> DensePolynomial:
    _check_dim(p, q)
    d = p.d + q.d
    out = enumerate_basis(p.n, d)
    c = np.zeros(out.size)
    for a, ca in zip(p.basis.indices, p.coeffs):
        if ca == 0:
            continue
        for b, cb in zip(q.basis.indices, q.coeffs):
            if cb:
                c[out.index(tuple(i + j for i, j in zip(a, b)))] += ca * cb
    return DensePolynomial(p.n, d, c)


def substitution_matrix(n: int, d: int, L, t) -> np.ndarray:
    """Matrix ``C`` with ``(L u + t)^alpha = sum_gamma C[alpha, gamma] u^gamma``.

    Rows and columns run over ``enumerate_basis(n, d)``.  ``L`` is ``(n, n)``,
    ``t`` has length n.
    """
    L = np.asarray(L, dtype=float).reshape(n, n)
    t = np.asarray(t, dtype=float).reshape(n)
    basis = enumerate_basis(n, d)
    C = np.zeros((basis.size, basis.size))
    C[0, 0] = 1.0
    shifts = [_shift_table(n, d - 1, j) for j in range(n)] if d > 0 else []
    lower = s(n, d - 1) if d > 0 else 0
    for row, a in enumerate(basis.indices):
        if row == 0:
            continue
        i = next(k for k, v in enumerate(a) if v)
        prev = list(a)
        prev[i] -= 1
        src = C[basis.index(prev), :lower]
        # multiply by the linear form t_i + sum_j L[i, j] u_j
        C[row, :lower] += t[i] * src
        for j in range(n):
            if L[i, j]:
                np.add.at(C[row], shifts[j], L[i, j] * src)
    return C


def compose_affine(p: DensePolynomial, L, t) -> DensePolynomial:
    """Return ``q`` with ``q(u) = p(L u + t)``."""
    C = substitution_matrix(p.n, p.d, L, t)
    return DensePolynomial(p.n, p.d, C.T @ p.coeffs)


def translate(p: DensePolynomial, shift) -> DensePolynomial:
    """Return ``q`` with ``q(u) = p(u + shift)``."""
    return compose_affine(p, np.eye(p.n), shift)


def quadratic_form(A, center=None) -> DensePolynomial:
    """The polynomial ``(x - c)^T A (x - c)``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    A = 0.5 * (A + A.T)
    terms = {}
    for i in range(n):
        for j in range(i, n):
            a = [0] * n
            a[i] += 1
            a[j] += 1
            terms[tuple(a)] = A[i, j] * (1 if i == j else 2)
    p = DensePolynomial.from_terms(n, terms, d=2)
    if center is not None:
        p = translate(p, -np.asarray(center, dtype=float))
    return p


def parse_alpha(text: str) -> tuple:
    """Parse ``"2,0"`` into ``(2, 0)``."""
    return tuple(int(v) for v in text.split(","))


def format_alpha(alpha: Iterable[int]) -> str:
    return ",".join(str(int(a)) for a in alpha)
