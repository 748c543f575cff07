"""Bounded regions described by strict inequalities, plus the named fixtures.

A region is an intersection of constraints ``c(x) < 0``.  Every constraint
can report its roots along the last coordinate for a batch of fixed leading
coordinates, which is all the slicing quadrature needs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import e

import numpy as np

from .core import DensePolynomial, eval_poly, quadratic_form
from .errors import UnboundedRegionError

# complex roots with |imag| below this (relative) are treated as real
_IMAG_TOL = 1e-9


class Constraint:
    def value(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def roots_last(self, xo: np.ndarray) -> np.ndarray:
        """Real roots in the last coordinate; shape ``(N, r)`` padded with NaN."""
        raise NotImplementedError


def _batched_real_roots(coef: np.ndarray) -> np.ndarray:
    """Real roots of ``sum_k coef[:, k] t^k`` row by row (NaN padded)."""
    N, m1 = coef.shape
    out = np.full((N, max(m1 - 1, 1)), np.nan)
    scale = np.abs(coef).max(axis=1)
    scale[scale == 0] = 1.0
    live = np.abs(coef) > 1e-13 * scale[:, None]
    eff = np.where(live.any(axis=1), m1 - 1 - np.argmax(live[:, ::-1], axis=1), 0)
    for deg in np.unique(eff):
        rows = np.flatnonzero(eff == deg)
        if deg == 0:
            continue
        c = coef[rows, : deg + 1] / coef[rows, deg : deg + 1]
        if deg == 1:
            out[rows, 0] = -c[:, 0]
            continue
        if deg == 2:
            b, cc = c[:, 1], c[:, 0]
            disc = b * b - 4 * cc
            ok = disc >= -_IMAG_TOL * (b * b + np.abs(cc))
            sq = np.sqrt(np.maximum(disc, 0.0))
            q = -0.5 * (b + np.copysign(sq, b))
            with np.errstate(divide="ignore", invalid="ignore"):
                r1 = q
                r2 = np.where(q != 0, cc / q, 0.0)
            out[rows[ok], 0] = r1[ok]
            out[rows[ok], 1] = r2[ok]
            continue
        comp = np.zeros((rows.size, deg, deg))
        comp[:, 0, :] = -c[:, deg - 1 :: -1]
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
        ev = np.linalg.eigvals(comp)
        real = np.abs(ev.imag) <= _IMAG_TOL * (1 + np.abs(ev.real))
        r = np.where(real, ev.real, np.nan)
        # two Newton polishing steps
        for _ in range(2):
            t = np.nan_to_num(r)
            pv = np.zeros_like(t)
            dv = np.zeros_like(t)
            for k in range(deg, -1, -1):
                dv = dv * t + pv
                pv = pv * t + c[:, k : k + 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(dv != 0, pv / dv, 0.0)
            small = np.abs(step) < 1e-6 * (1 + np.abs(t))
            r = np.where(np.isnan(r) | ~small, r, r - step)
        out[rows, :deg] = r
    return out


class PolynomialConstraint(Constraint):
    """``g(x) < level``."""

    def __init__(self, g: DensePolynomial, level: float = 1.0):
        self.g = g
        self.level = float(level)
        exps = g.basis.exponents
        self._m = int(exps[:, -1].max()) if g.n >= 1 else 0
        self._by_power = [np.flatnonzero(exps[:, -1] == k) for k in range(self._m + 1)]

    def value(self, x):
        return eval_poly(self.g, x) - self.level

    def restricted(self, xo: np.ndarray) -> np.ndarray:
        """Coefficients of ``t -> g(xo, t) - level`` (shape ``(N, m+1)``)."""
        n = self.g.n
        xo = np.asarray(xo, dtype=float).reshape(-1, n - 1)
        exps = self.g.basis.exponents
        N = xo.shape[0]
        if n > 1:
            mons = np.ones((N, exps.shape[0]))
            for i in range(n - 1):
                mons *= xo[:, i : i + 1] ** exps[:, i]
        else:
            mons = np.ones((N, exps.shape[0]))
        terms = mons * self.g.coeffs
        coef = np.stack([terms[:, idx].sum(axis=1) for idx in self._by_power], axis=1)
        coef[:, 0] -= self.level
        return coef

    def roots_last(self, xo):
        return _batched_real_roots(self.restricted(xo))


class ExpGraphConstraint(Constraint):
    """``x_n < scale * exp(-x_1)`` (the non-algebraic fixture edge)."""

    def __init__(self, n: int = 2, scale: float = 1.0):
        if n < 2:
            raise ValueError("graph constraint needs n >= 2")
        self.n = n
        self.scale = scale

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return x[..., -1] - self.scale * np.exp(-x[..., 0])

    def roots_last(self, xo):
        xo = np.asarray(xo, dtype=float).reshape(-1, self.n - 1)
        return (self.scale * np.exp(-xo[:, 0]))[:, None]


@dataclass(frozen=True)
class RegionSpec:
    """A bounded open region (before the optional translation).

    ``kind`` is one of ``disk, annulus, simplex, box, ellipsoid,
    polynomial-sublevel, intersection-of-sublevels, exp-curve-demo``.
    ``translate`` shifts the whole region: the described set is ``base + t``.
    """

    kind: str
    n: int
    params: dict = field(default_factory=dict)
    translate: tuple | None = None

    def __post_init__(self):
        if self.translate is not None:
            t = tuple(float(v) for v in self.translate)
            if len(t) != self.n:
                raise ValueError(f"translate has length {len(t)}, region has n={self.n}")
            object.__setattr__(self, "translate", t)

    @property
    def shift(self) -> np.ndarray:
        return np.zeros(self.n) if self.translate is None else np.asarray(self.translate)

    def constraints(self) -> list:
        """Constraints of the untranslated base region."""
        return _CONSTRAINTS[self.kind](self)

    def base_box(self):
        """Bounding box ``(lo, hi)`` of the untranslated base region."""
        box = _BOXES.get(self.kind, _probe_box)(self)
        return np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)

    def bounding_box(self):
        lo, hi = self.base_box()
        return lo + self.shift, hi + self.shift

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float) - self.shift
        inside = np.ones(x.shape[:-1], dtype=bool)
        for c in self.constraints():
            inside &= c.value(x) < 0
        return inside

    def describe(self) -> dict:
        params = {}
        for k, v in self.params.items():
            if isinstance(v, DensePolynomial):
                params[k] = v.to_dict()
            elif isinstance(v, (list, tuple)) and v and isinstance(v[0], DensePolynomial):
                params[k] = [p.to_dict() for p in v]
            elif isinstance(v, np.ndarray):
                params[k] = v.tolist()
            else:
                params[k] = v
        return {"kind": self.kind, "n": self.n, "params": params, "translate": list(self.translate) if self.translate else None}


def _radial(n, scale=1.0):
    return DensePolynomial.from_terms(n, {tuple(2 if i == j else 0 for i in range(n)): scale for j in range(n)}, d=2)


def _linear(n, coeffs, const):
    terms = {(0,) * n: const}
    for j, c in enumerate(coeffs):
        if c:
            terms[tuple(1 if i == j else 0 for i in range(n))] = c
    return DensePolynomial.from_terms(n, terms, d=1)


def _disk_constraints(r):
    R = r.params.get("radius", 1.0)
    return [PolynomialConstraint(_radial(r.n, 1.0 / R**2))]


def _annulus_constraints(r):
    s_ = r.params["s"]
    # r^2 < 1 and r^2 > s  <=>  2 - r^2/s < 1
    return [PolynomialConstraint(_radial(r.n)), PolynomialConstraint(2.0 - _radial(r.n, 1.0 / s_))]


def _simplex_constraints(r):
    n = r.n
    cons = [PolynomialConstraint(_linear(n, [1.0] * n, 0.0))]
    for j in range(n):
        cons.append(PolynomialConstraint(_linear(n, [-1.0 if i == j else 0.0 for i in range(n)], 1.0)))
    return cons


def _box_constraints(r):
    lo, hi = np.asarray(r.params["lo"], float), np.asarray(r.params["hi"], float)
    cons = []
    for j in range(r.n):
        unit = [1.0 if i == j else 0.0 for i in range(r.n)]
        cons.append(PolynomialConstraint(_linear(r.n, unit, 1.0 - hi[j])))
        cons.append(PolynomialConstraint(_linear(r.n, [-u for u in unit], 1.0 + lo[j])))
    return cons


def _ellipsoid_constraints(r):
    return [PolynomialConstraint(quadratic_form(r.params["A"]))]


def _sublevel_constraints(r):
    return [PolynomialConstraint(r.params["g"], r.params.get("level", 1.0))]


def _intersection_constraints(r):
    return [PolynomialConstraint(g, 1.0) for g in r.params["polys"]]


def _exp_curve_constraints(r):
    n = r.n
    return [
        PolynomialConstraint(_linear(n, [-1.0, 0.0], 0.0)),  # u1 > -1
        PolynomialConstraint(_linear(n, [0.0, -1.0], 2.0)),  # u2 > 1
        ExpGraphConstraint(n),  # u2 < exp(-u1)
    ]


_CONSTRAINTS = {
    "disk": _disk_constraints,
    "annulus": _annulus_constraints,
    "simplex": _simplex_constraints,
    "box": _box_constraints,
    "ellipsoid": _ellipsoid_constraints,
    "polynomial-sublevel": _sublevel_constraints,
    "intersection-of-sublevels": _intersection_constraints,
    "exp-curve-demo": _exp_curve_constraints,
}


def _ellipsoid_box(r):
    Ainv = np.linalg.inv(np.asarray(r.params["A"], dtype=float))
    h = np.sqrt(np.diag(Ainv))
    return -h, h


_BOXES = {
    "disk": lambda r: (-np.full(r.n, r.params.get("radius", 1.0)), np.full(r.n, r.params.get("radius", 1.0))),
    "annulus": lambda r: (-np.ones(r.n), np.ones(r.n)),
    "simplex": lambda r: (np.zeros(r.n), np.ones(r.n)),
    "box": lambda r: (r.params["lo"], r.params["hi"]),
    "ellipsoid": _ellipsoid_box,
    "exp-curve-demo": lambda r: ([-1.0, 1.0], [0.0, e]),
}


def faces_clear(constraints, lo, hi, samples=41) -> bool:
    """True when no sampled point on the faces of the box ``[lo, hi]`` is inside."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    n = lo.size
    for j in range(n):
        others = [np.linspace(lo[i], hi[i], samples) for i in range(n) if i != j]
        if others:
            mesh = np.meshgrid(*others, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=-1)
        else:
            pts = np.zeros((1, 0))
        for side in (lo[j], hi[j]):
            full = np.insert(pts, j, side, axis=1)
            inside = np.ones(full.shape[0], dtype=bool)
            for c in constraints:
                inside &= c.value(full) < 0
            if inside.any():
                return False
    return True


def grow_box(constraints, center, half, factor=2.0, limit=1e3, samples=41):
    """Enlarge ``center +- half`` until its faces miss the region.

    Raises :class:`UnboundedRegionError` once the largest half-width exceeds ``limit``.
    """
    center = np.asarray(center, float)
    half = np.asarray(half, float)
    while np.max(half) <= limit:
        if faces_clear(constraints, center - half, center + half, samples):
            return center - half, center + half
        half = half * factor
    raise UnboundedRegionError(
        f"region still meets the probe box faces at half-width {np.max(half) / factor:g} (limit {limit:g})")


def probe_box(constraints, n, start=1.0, limit=1e3, samples=41):
    """Centred cube, doubled until no sampled face point lies in the region."""
    return grow_box(constraints, np.zeros(n), np.full(n, float(start)), 2.0, limit, samples)


def _probe_box(r):
    if "box" in r.params:
        lo, hi = r.params["box"]
        return np.asarray(lo, float), np.asarray(hi, float)
    return probe_box(r.constraints(), r.n, limit=r.params.get("probe_limit", 1e3))


# ---- named constructors ---------------------------------------------------

def disk(n=2, radius=1.0, center=None) -> RegionSpec:
    if radius <= 0:
        raise ValueError("radius must be positive")
    return RegionSpec("disk", n, {"radius": float(radius)}, center)


def annulus(s=2.0 / 3.0, n=2, center=None) -> RegionSpec:
    """``{s < |x|^2 < 1}``."""
    if not 0 < s < 1:
        raise ValueError(f"annulus needs 0 < s < 1, got {s}")
    return RegionSpec("annulus", n, {"s": float(s)}, center)


def simplex(n=2, translate=None) -> RegionSpec:
    return RegionSpec("simplex", n, {}, translate)


def box(lo, hi, translate=None) -> RegionSpec:
    lo, hi = [float(v) for v in lo], [float(v) for v in hi]
    if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
        raise ValueError("box needs lo < hi componentwise")
    return RegionSpec("box", len(lo), {"lo": lo, "hi": hi}, translate)


def ellipsoid(A, center=None) -> RegionSpec:
    """``{(x - c)^T A (x - c) < 1}`` for symmetric positive-definite ``A``."""
    A = np.asarray(A, dtype=float)
    A = 0.5 * (A + A.T)
    if np.linalg.eigvalsh(A).min() <= 0:
        raise ValueError("ellipsoid matrix must be positive definite")
    return RegionSpec("ellipsoid", A.shape[0], {"A": A.tolist()}, center)


def sublevel(g: DensePolynomial, box=None, translate=None) -> RegionSpec:
    """``{g(x) < 1}``; ``box`` optionally bounds it, otherwise it is probed."""
    params = {"g": g}
    if box is not None:
        params["box"] = (list(box[0]), list(box[1]))
    return RegionSpec("polynomial-sublevel", g.n, params, translate)


def intersection(polys, box=None, translate=None) -> RegionSpec:
    """``{g_i(x) < 1 for all i}``."""
    polys = list(polys)
    params = {"polys": polys}
    if box is not None:
        params["box"] = (list(box[0]), list(box[1]))
    return RegionSpec("intersection-of-sublevels", polys[0].n, params, translate)


def exp_curve() -> RegionSpec:
    """``{u1 > -1, u2 > 1, u2 < exp(-u1)}`` in the shifted coordinates."""
    return RegionSpec("exp-curve-demo", 2, {})


def exp_curve_boundary(samples_per_edge=200) -> np.ndarray:
    """Points sampled along the three edges of :func:`exp_curve`."""
    t = np.linspace(0.0, 1.0, samples_per_edge)
    left = np.column_stack([np.full_like(t, -1.0), 1.0 + (e - 1.0) * t])
    bottom = np.column_stack([-1.0 + t, np.ones_like(t)])
    u1 = -1.0 + t
    top = np.column_stack([u1, np.exp(-u1)])
    return np.vstack([left, bottom, top])


def parse_fixture(text: str) -> RegionSpec:
    """Named fixtures: ``disk``, ``annulus:s=0.6667``, ``simplex``, ``exp-curve``,
    ``box:lo=0,0;hi=1,1``, ``ellipsoid:A=2,0.5,0.5,1``, ``shifted-disk:c=1,0``."""
    name, _, rest = text.partition(":")
    opts = {}
    for part in filter(None, rest.split(";")):
        k, _, v = part.partition("=")
        opts[k.strip()] = v.strip()
    nums = lambda v: [float(x) for x in v.split(",")]
    if name == "disk":
        return disk(n=int(opts.get("n", 2)), radius=float(opts.get("r", 1.0)))
    if name == "shifted-disk":
        c = nums(opts.get("c", "1,0"))
        return disk(n=len(c), radius=float(opts.get("r", 1.0)), center=c)
    if name == "annulus":
        return annulus(float(opts.get("s", 2.0 / 3.0)))
    if name == "simplex":
        return simplex(int(opts.get("n", 2)))
    if name == "exp-curve":
        return exp_curve()
    if name == "box":
        return box(nums(opts["lo"]), nums(opts["hi"]))
    if name == "ellipsoid":
        a = nums(opts["A"])
        n = int(round(len(a) ** 0.5))
        return ellipsoid(np.array(a).reshape(n, n))
    raise ValueError(f"unknown fixture {text!r}")

