"""Truncated moment sequences and their exact affine pushforwards."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import enumerate_basis, format_alpha, s, substitution_matrix
from .errors import MissingMomentError


@dataclass(frozen=True)
class MomentSequence:
    """All moments ``y_alpha`` with ``|alpha| <= max_order``, graded-lex ordered.

    ``provenance`` is a JSON-compatible dict describing how the numbers were
    produced (``{"method": "closed-form"}``, ``{"method": "quadrature",
    "tol": ...}``, ``{"method": "monte-carlo", "samples": ..., "seed": ...,
    "stderr": [...]}``, ``{"method": "extended", ...}``).
    """

    n: int
    max_order: int
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size != s(self.n, self.max_order):
            raise ValueError(
                f"expected {s(self.n, self.max_order)} moments for n={self.n}, "
                f"max_order={self.max_order}; got {v.size}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def basis(self):
        return enumerate_basis(self.n, self.max_order)

    def __getitem__(self, alpha) -> float:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.n:
            raise ValueError(f"multi-index {alpha} has wrong length for n={self.n}")
        if sum(alpha) > self.max_order or min(alpha) < 0:
            raise MissingMomentError(alpha, self.max_order)
        return float(self.values[self.basis.index(alpha)])

    def require(self, order: int, what: str = ""):
        """Raise naming the first missing multi-index if ``order`` is not covered."""
        if order > self.max_order:
            first = (self.max_order + 1,) + (0,) * (self.n - 1)
            err = MissingMomentError(first, self.max_order)
            if what:
                err.args = (f"{what} needs moments up to order {order}: {err.args[0]}",)
            raise err

    def truncate(self, order: int) -> "MomentSequence":
        self.require(order)
        return MomentSequence(self.n, order, self.values[: s(self.n, order)], dict(self.provenance))

    def scaled(self, c: float) -> "MomentSequence":
        return MomentSequence(self.n, self.max_order, c * self.values, dict(self.provenance))

    def items(self):
        return zip(self.basis.indices, self.values)

    @property
    def mass(self) -> float:
        return float(self.values[0])

    def centroid(self) -> np.ndarray:
        self.require(1)
        return self.values[1 : self.n + 1] / self.values[0]

    def covariance(self) -> np.ndarray:
        self.require(2)
        mu = self.centroid()
        cov = np.empty((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                a = [0] * self.n
                a[i] += 1
                a[j] += 1
                cov[i, j] = self[a] / self.values[0] - mu[i] * mu[j]
        return cov

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_order": self.max_order,
            "provenance": self.provenance,
            "moments": [{"alpha": list(a), "value": float(v)} for a, v in self.items()],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "MomentSequence":
        n, order = int(obj["n"]), int(obj["max_order"])
        basis = enumerate_basis(n, order)
        vals = np.full(basis.size, np.nan)
        for entry in obj["moments"]:
            alpha = tuple(entry["alpha"])
            if sum(alpha) <= order:
                vals[basis.index(alpha)] = entry["value"]
        if np.isnan(vals).any():
            missing = basis.indices[int(np.flatnonzero(np.isnan(vals))[0])]
            raise MissingMomentError(missing, order)
        return cls(n, order, vals, obj.get("provenance", {}))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "MomentSequence":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"MomentSequence(n={self.n}, max_order={self.max_order}, y0={self.values[0]:.6g}, provenance={self.provenance.get('method')})"


def from_function(n: int, max_order: int, fn, provenance=None) -> MomentSequence:
    """Tabulate ``fn(alpha)`` over every multi-index of order <= max_order."""
    basis = enumerate_basis(n, max_order)
    vals = np.array([fn(a) for a in basis.indices], dtype=float)
    return MomentSequence(n, max_order, vals, provenance or {})


def affine_pushforward(y: MomentSequence, L=None, t=None) -> MomentSequence:
    """Moments of the image region ``{L u + t : u in G}`` from those of ``G``.

    Uses ``y'_alpha = |det L| * sum_gamma C[alpha, gamma] y_gamma`` with the
    exact binomial/multinomial substitution matrix ``C``.
    """
    n = y.n
    L = np.eye(n) if L is None else np.asarray(L, dtype=float)
    t = np.zeros(n) if t is None else np.asarray(t, dtype=float)
    C = substitution_matrix(n, y.max_order, L, t)
    jac = abs(np.linalg.det(L))
    prov = dict(y.provenance)
    prov["affine"] = {"L": L.tolist(), "t": t.tolist()}
    return MomentSequence(n, y.max_order, jac * (C @ y.values), prov)


def translate_moments(y: MomentSequence, shift) -> MomentSequence:
    """Moments of ``G + shift``."""
    return affine_pushforward(y, None, shift)


def alpha_label(alpha) -> str:
    return format_alpha(alpha)
