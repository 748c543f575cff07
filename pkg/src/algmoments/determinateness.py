"""Moment identities and extension of truncated moment sequences.

A region ``{g < 1}`` (or a weight ``exp(-g)``) is recovered from low-order
moments and then integrated again, which produces every higher moment.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .core import DensePolynomial, enumerate_basis, eval_poly, format_alpha
from .errors import MissingMomentError
from .quadrature import integrate_moments
from .recovery import RecoveryReport, recover_boundary, recover_expdensity_boundary, recover_exp_weight
from .regions import PolynomialConstraint, grow_box
from .sequence import MomentSequence

log = logging.getLogger(__name__)

REL_FLOOR = 1e-300


@dataclass
class ExtensionResult:
    """``extended`` is complete up to the largest requested order; ``targets``
    maps each requested multi-index to its value; ``checked`` maps it to
    ``(extended, oracle, rel_error)`` when an oracle was supplied."""

    extended: MomentSequence
    recovered: RecoveryReport
    targets: dict
    checked: dict | None = None
    warnings: list = field(default_factory=list)

    def checked_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "extended", "oracle", "rel_error"])
        for a, (ext, orc, rel) in (self.checked or {}).items():
            w.writerow([format_alpha(a), repr(ext), repr(orc), repr(rel)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        out = self.extended.to_dict()
        out["targets"] = [{"alpha": list(a), "value": v} for a, v in self.targets.items()]
        out["recovered"] = self.recovered.to_dict()
        out["warnings"] = list(self.warnings)
        return out


def _poly_moment_sum(y: MomentSequence, g: DensePolynomial, alpha, weights=None):
    """``sum_beta w(beta) g_beta y_{alpha+beta}``."""
    total = 0.0
    for beta, c in zip(g.basis.indices, g.coeffs):
        if c == 0:
            continue
        w = 1.0 if weights is None else weights(beta)
        if w == 0:
            continue
        total += w * c * y[tuple(a + b for a, b in zip(alpha, beta))]
    return total


def stokes_residual(y: MomentSequence, g: DensePolynomial, max_alpha: int) -> dict:
    """Residual of the Stokes identity for every ``|alpha| <= max_alpha``:

    ``y_a - sum_b g_b y_{a+b} - sum_b |b| / (n + |a|) g_b y_{a+b}``.
    It vanishes when ``g = 1`` on the boundary of the region behind ``y``.
    """
    y.require(max_alpha + max(g.degree, 0), "Stokes residual")
    n = y.n
    out = {}
    for a in enumerate_basis(n, max_alpha).indices:
        na = n + sum(a)
        out[a] = y[a] - _poly_moment_sum(y, g, a) - _poly_moment_sum(y, g, a, lambda b: sum(b) / na)
    return out


def euler_identity_check(y: MomentSequence, g: DensePolynomial, max_alpha: int) -> dict:
    """Residual ``(n + |a|) y_a - sum_b |b| g_b y_{a+b}`` for moments of ``exp(-g) dx``."""
    y.require(max_alpha + max(g.degree, 0), "Euler identity")
    n = y.n
    return {a: (n + sum(a)) * y[a] - _poly_moment_sum(y, g, a, lambda b: float(sum(b)))
            for a in enumerate_basis(n, max_alpha).indices}


def probe_box_from_moments(y: MomentSequence, constraints, inflate: float = 1.1, limit_factor: float = 1e3):
    """Box around the centroid from second moments, grown until its faces miss the set.

    Starts from ``sqrt((n + 2) var_i)``, the exact half-extent of a ball,
    inflated by 10%.
    """
    n = y.n
    c = y.centroid()
    var = np.clip(np.diag(y.covariance()), 0.0, None)
    half = inflate * np.sqrt((n + 2) * var)
    half = np.where(half > 0, half, 1.0)
    return grow_box(constraints, c, half, factor=1.5, limit=limit_factor * half.max())


def _normalize_targets(targets, n):
    out = []
    for t in targets:
        t = tuple(int(v) for v in t)
        if len(t) != n or min(t) < 0:
            raise ValueError(f"bad target multi-index {t} for n={n}")
        out.append(t)
    return out


def _assemble(y, computed_values, order, targets, provenance):
    basis = enumerate_basis(y.n, order)
    vals = np.array(computed_values, dtype=float)
    keep = min(order, y.max_order)
    vals[: enumerate_basis(y.n, keep).size] = y.values[: enumerate_basis(y.n, keep).size]
    ext = MomentSequence(y.n, order, vals, provenance)
    return ext, {t: float(vals[basis.index(t)]) for t in targets}


def _check_against(targets, values, oracle):
    if oracle is None:
        return None
    out = {}
    for t in targets:
        ref = oracle(t) if callable(oracle) else oracle[t]
        ext = values[t]
        out[t] = (ext, float(ref), abs(ext - ref) / max(abs(ref), REL_FLOOR))
    return out


def _mass_warning(vol, y0, tol):
    if abs(vol - y0) > 10 * tol * max(1.0, abs(y0)):
        msg = (f"integral of 1 over the recovered set is {vol:.12g} but y_0 = {y0:.12g}: "
               "{g <= 1} is not the original region")
        log.warning(msg)
        return [msg]
    return []


def extend_moments(y: MomentSequence, d: int, targets, tol: float = 1e-10, oracle=None,
                   rank_tol: float = 1e-8) -> ExtensionResult:
    """Recover ``g`` from moments up to ``3d`` and integrate ``x^beta`` over ``{g <= 1}``."""
    targets = _normalize_targets(targets, y.n)
    rep = recover_boundary(y, d, rank_tol)
    order = max([sum(t) for t in targets] + [y.max_order])
    cons = [PolynomialConstraint(rep.polynomial, 1.0)]
    lo, hi = probe_box_from_moments(y, cons)
    vals, info = integrate_moments(cons, y.n, lo, hi, order, tol=tol)
    prov = {"method": "extended", "tol": tol, "from_order": y.max_order, "d": d,
            "quadrature": {"nodes": info["nodes"], "box": {"lo": lo.tolist(), "hi": hi.tolist()}}}
    ext, tv = _assemble(y, vals, order, targets, prov)
    res = ExtensionResult(ext, rep, tv, _check_against(targets, tv, oracle))
    res.warnings = _mass_warning(vals[0], y.mass, tol)
    return res


def extend_moments_expdensity(y: MomentSequence, d: int, p: DensePolynomial, targets, tol: float = 1e-10,
                              oracle=None, rank_tol: float = 1e-8) -> ExtensionResult:
    """As :func:`extend_moments` for moments of ``exp(p) dx`` on ``{g < 1}``."""
    targets = _normalize_targets(targets, y.n)
    t = max(p.degree, 0)
    if y.max_order < 3 * d + t:
        missing = (y.max_order + 1,) + (0,) * (y.n - 1)
        raise MissingMomentError(missing, y.max_order)
    rep = recover_expdensity_boundary(y, d, p, rank_tol)
    order = max([sum(b) for b in targets] + [y.max_order])
    cons = [PolynomialConstraint(rep.polynomial, 1.0)]
    lo, hi = probe_box_from_moments(y, cons)
    weight = lambda x: np.exp(eval_poly(p, x))
    vals, info = integrate_moments(cons, y.n, lo, hi, order, tol=tol, weight=weight)
    prov = {"method": "extended", "tol": tol, "from_order": y.max_order, "d": d, "density": {"exp": p.to_dict()},
            "quadrature": {"nodes": info["nodes"], "box": {"lo": lo.tolist(), "hi": hi.tolist()}}}
    ext, tv = _assemble(y, vals, order, targets, prov)
    res = ExtensionResult(ext, rep, tv, _check_against(targets, tv, oracle))
    res.warnings = _mass_warning(vals[0], y.mass, tol)
    return res


def extend_moments_expglobal(y: MomentSequence, d: int, targets, tol: float = 1e-10, oracle=None,
                             box_growth_limit: float = 1e3) -> ExtensionResult:
    """Recover ``g`` (with its constant) from moments up to ``2d`` and integrate ``x^a exp(-g)``."""
    from .momentgen import moments_exp_global

    targets = _normalize_targets(targets, y.n)
    rep = recover_exp_weight(y, d, tol=tol, box_growth_limit=box_growth_limit)
    order = max([sum(t) for t in targets] + [y.max_order])
    z = moments_exp_global(rep.polynomial, order, tol=tol, box_growth_limit=box_growth_limit)
    prov = {"method": "extended", "tol": tol, "from_order": y.max_order, "d": d,
            "truncation_box": z.provenance.get("truncation_box")}
    ext, tv = _assemble(y, z.values, order, targets, prov)
    res = ExtensionResult(ext, rep, tv, _check_against(targets, tv, oracle))
    res.warnings = _mass_warning(z.values[0], y.mass, tol)
    return res
