"""Kernel systems that recover a boundary polynomial or an exponential weight."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .core import DensePolynomial, enumerate_basis, eval_poly, gradient, translate
from .errors import (DegenerateSystemError, QuadratureError, RecoveryError, SingularMatrixError,
                     UnboundedRegionError)
from .matrices import (MomentMatrix, assemble_coordinate, assemble_expdensity, assemble_expglobal, assemble_renorm,
                       diagonal_factors, theta_matrix)
from .sequence import MomentSequence, translate_moments

log = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-8


@dataclass
class RecoveryReport:
    """Outcome of a recovery: polynomial plus the evidence behind it.

    ``kernel`` is the normalized kernel vector, usually ``(-1, g)``.
    ``rank_profile`` holds one dict per matrix examined.  ``spectrum`` are
    the singular values (descending) of the decisive matrix; ``eigenvalues``
    are filled in when that matrix is square.
    """

    polynomial: DensePolynomial
    kernel: np.ndarray
    rank_profile: list
    spectrum: np.ndarray
    residual: float
    unique: bool
    consistent: bool
    method: str
    eigenvalues: np.ndarray | None = None
    kernel_basis: np.ndarray | None = None
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.unique and self.consistent

    def to_dict(self) -> dict:
        def cplx(v):
            v = np.asarray(v)
            if np.iscomplexobj(v):
                return [[float(z.real), float(z.imag)] for z in v]
            return [float(z) for z in v]

        return {
            "method": self.method,
            "polynomial": self.polynomial.to_dict(),
            "kernel": [float(v) for v in self.kernel],
            "unique": bool(self.unique),
            "consistent": bool(self.consistent),
            "residual": float(self.residual),
            "rank_profile": self.rank_profile,
            "spectrum": [float(v) for v in self.spectrum],
            "eigenvalues": None if self.eigenvalues is None else cplx(self.eigenvalues),
            "kernel_basis": None if self.kernel_basis is None else np.asarray(self.kernel_basis).tolist(),
            "notes": list(self.notes),
            "extras": self.extras,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def normalized_residual(M, v) -> float:
    """``||M v||_inf / ||M||_inf`` (matrix infinity norm = max row sum)."""
    M = np.asarray(M)
    nrm = np.abs(M).sum(axis=1).max()
    if nrm == 0:
        return 0.0
    return float(np.abs(M @ v).max() / nrm)


def _rank(sv, rank_tol):
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int((sv > rank_tol * sv[0]).sum())


def _profile_entry(M: MomentMatrix, rank_tol, extra=None):
    E = M.entries
    sv = np.linalg.svd(E, compute_uv=False)
    out = {"k": M.params.get("k"), "rows": E.shape[0], "cols": E.shape[1], "rank": _rank(sv, rank_tol),
           "full_column_rank": _rank(sv, rank_tol) == E.shape[1]}
    if extra:
        out.update(extra)
    return out


def kernel_solve(M, rank_tol: float = DEFAULT_RANK_TOL, method: str = "kernel_solve") -> RecoveryReport:
    """Solve ``M (-1, g)^T = 0`` as the least-squares problem ``M1 g = m0``.

    ``unique`` means ``M1`` (all columns but the first) has full column rank
    at relative threshold ``rank_tol``; ``consistent`` means ``M`` itself is
    rank deficient, i.e. a kernel vector exists.
    """
    E = np.asarray(M, dtype=float)
    if E.ndim != 2 or E.shape[1] < 1:
        raise ValueError("matrix needs at least one column")
    m0, M1 = E[:, 0], E[:, 1:]
    U, sv, Vt = np.linalg.svd(E)
    rank = _rank(sv, rank_tol)
    sv1 = np.linalg.svd(M1, compute_uv=False) if M1.size else np.zeros(0)
    full1 = M1.shape[1] == 0 or (sv1.size == M1.shape[1] and sv1[0] > 0 and sv1[-1] / sv1[0] > rank_tol)
    if not np.any(m0) and not full1:
        raise DegenerateSystemError("first column vanishes and the remaining columns are rank deficient: "
                                    "the constant coefficient cannot be normalized to -1")
    if M1.shape[1]:
        g, *_ = np.linalg.lstsq(M1, m0, rcond=None)
    else:
        g = np.zeros(0)
    v = np.concatenate([[-1.0], g])
    consistent = rank < E.shape[1]
    null = Vt[rank:] if rank < E.shape[1] else np.zeros((0, E.shape[1]))
    ncols = E.shape[1]
    n_dim = _infer_dimension(M)
    d = _infer_degree(M, n_dim, ncols)
    poly = DensePolynomial(n_dim, d, np.concatenate([[0.0], g]))
    eig = np.linalg.eigvals(E) if E.shape[0] == E.shape[1] else None
    profile = [{"k": getattr(M, "params", {}).get("k"), "rows": E.shape[0], "cols": ncols, "rank": rank,
                "full_column_rank": rank == ncols}]
    rep = RecoveryReport(poly, v, profile, sv, normalized_residual(E, v), bool(full1), bool(consistent), method,
                         eigenvalues=eig, kernel_basis=null if (not full1 or null.shape[0] > 1) else None)
    if not consistent:
        rep.notes.append(f"full rank {rank}: no kernel vector, the system has no solution")
    elif not full1:
        rep.notes.append(f"kernel of dimension {ncols - rank}: solution not unique")
    return rep


def _infer_dimension(M):
    cols = getattr(M, "cols", None)
    if cols:
        return len(cols[0])
    return 1


def _infer_degree(M, n, ncols):
    cols = getattr(M, "cols", None)
    if cols:
        return max(sum(c) for c in cols)
    d = 0
    while enumerate_basis(n, d).size < ncols:
        d += 1
    if enumerate_basis(n, d).size != ncols:
        raise ValueError(f"{ncols} columns do not form a full graded basis in n={n}")
    return d


def _kernel_profile(y, d, ks, rank_tol, builder):
    prof = []
    reports = {}
    for k in ks:
        rep = kernel_solve(builder(k), rank_tol)
        entry = dict(rep.rank_profile[0])
        entry.update({"unique": rep.unique, "consistent": rep.consistent, "residual": rep.residual})
        prof.append(entry)
        reports[k] = rep
    return prof, reports


def recover_boundary(y: MomentSequence, d: int, rank_tol: float = DEFAULT_RANK_TOL) -> RecoveryReport:
    """Solve the ``k = 2d`` renormalized system; ``g = 1`` on the boundary.

    Needs moments to order ``3d``.  The rank profile covers ``k = d..2d``.
    """
    y.require(3 * d, f"recovery with d={d}")
    prof, reps = _kernel_profile(y, d, range(d, 2 * d + 1), rank_tol, lambda k: assemble_renorm(y, d, k))
    rep = reps[2 * d]
    rep.rank_profile = prof
    rep.method = f"recover_boundary(d={d}, k={2 * d})"
    if not rep.ok:
        raise RecoveryError(
            f"no unique normalized kernel vector at k={2 * d} (d={d}): {'; '.join(rep.notes)}. "
            "Either the degree is wrong, the origin lies on the Zariski closure of the boundary, "
            "or the boundary is not algebraic", rep)
    return rep


def recover_min_order(y: MomentSequence, d: int, rank_tol: float = DEFAULT_RANK_TOL) -> RecoveryReport:
    """Smallest ``k`` in ``d..2d`` whose system ``M^d_k (-1, g) = 0`` is uniquely solvable."""
    y.require(2 * d, f"recovery with d={d}")
    kmax = min(2 * d, y.max_order - d)
    prof = []
    for k in range(d, kmax + 1):
        rep = kernel_solve(assemble_renorm(y, d, k), rank_tol)
        entry = dict(rep.rank_profile[0])
        entry.update({"unique": rep.unique, "consistent": rep.consistent, "residual": rep.residual})
        prof.append(entry)
        if rep.ok:
            rep.rank_profile = prof
            rep.method = f"recover_min_order(d={d}, k={k})"
            rep.extras["k"] = k
            rep.extras["moment_order_used"] = k + d
            return rep
    summary = ", ".join(f"k={p['k']}: rank {p['rank']} of {p['cols']}" for p in prof)
    rep.rank_profile = prof
    raise RecoveryError(f"no k <= {kmax} gives a unique solution ({summary})", rep)


def _sublevel_volume(g: DensePolynomial, y: MomentSequence, tol=1e-6):
    from .determinateness import probe_box_from_moments
    from .quadrature import integrate_moments
    from .regions import PolynomialConstraint

    cons = [PolynomialConstraint(g, 1.0)]
    lo, hi = probe_box_from_moments(y, cons)
    vals, _ = integrate_moments(cons, g.n, lo, hi, 0, tol=tol)
    return float(vals[0])


def recover_convex(y: MomentSequence, d: int, recenter: bool = True, rank_tol: float = DEFAULT_RANK_TOL,
                   check_level_set: bool = True) -> RecoveryReport:
    """Convex shortcut: solve the square ``k = d`` system (moments to ``2d``).

    With ``recenter`` the moments are first moved to the centroid frame and
    the result is mapped back, so the returned ``g`` may have a constant
    term; ``1 - g`` still vanishes on the boundary.  With
    ``check_level_set`` the volume of ``{g < 1}`` is compared with ``y_0``;
    a mismatch means ``1 - g`` vanishes on only part of the boundary.
    """
    y.require(2 * d, f"convex recovery with d={d}")
    c = y.centroid() if recenter else np.zeros(y.n)
    z = translate_moments(y, -c) if recenter else y
    rep = kernel_solve(assemble_renorm(z, d, d), rank_tol)
    entry = dict(rep.rank_profile[0])
    entry.update({"unique": rep.unique, "consistent": rep.consistent, "residual": rep.residual})
    rep.rank_profile = [entry]
    rep.method = f"recover_convex(d={d}, recenter={recenter})"
    if not rep.ok:
        raise RecoveryError(f"convex system M^{d}_{d} has no unique solution: {'; '.join(rep.notes)}", rep)
    if recenter:
        rep.polynomial = translate(rep.polynomial, -c)
        rep.extras["centroid"] = c.tolist()
    if check_level_set:
        try:
            vol = _sublevel_volume(rep.polynomial, y)
            rep.extras["level_set_volume"] = vol
            if abs(vol - y.mass) > 1e-4 * abs(y.mass):
                rep.extras["partial_boundary"] = True
                rep.notes.append(
                    f"volume of {{g < 1}} is {vol:.8g} but y_0 = {y.mass:.8g}: 1 - g vanishes on only part of the "
                    "boundary, so <x, n_x> must vanish on the rest (origin on the boundary)")
        except UnboundedRegionError:
            rep.extras["level_set_volume"] = None
            rep.extras["partial_boundary"] = True
            rep.notes.append("{g < 1} is unbounded: 1 - g vanishes on only part of the boundary, so <x, n_x> must "
                             "vanish on the rest (origin on the boundary)")
        except QuadratureError as err:
            rep.notes.append(f"level-set check skipped: {err}")
    return rep


def stacked_coordinate_matrix(y: MomentSequence, d: int, variant: str = "derived") -> np.ndarray:
    return np.vstack([assemble_coordinate(y, d, j, variant).entries for j in range(y.n)])


def recover_singular(y: MomentSequence, d: int, variant: str = "derived", rank_tol: float = DEFAULT_RANK_TOL,
                     constant_tol: float = 1e-6) -> RecoveryReport:
    """Stack the ``n`` coordinate systems and take their common kernel vector.

    If the kernel vector has a usable constant entry it is normalized to
    ``(-1, g)`` exactly as in :func:`recover_boundary`.  Otherwise the origin
    lies on the boundary's zero set; the report then carries the vanishing
    polynomial ``h`` itself, scaled so its top-degree part has largest
    coefficient magnitude 1 and signed so that ``int_G h dx > 0``.
    """
    need = 3 * d if variant == "derived" else 3 * d - 1
    y.require(need, f"singular-case recovery with d={d}")
    S = stacked_coordinate_matrix(y, d, variant)
    if not np.any(S):
        raise DegenerateSystemError("stacked coordinate system is identically zero")
    U, sv, Vt = np.linalg.svd(S)
    rank = _rank(sv, rank_tol)
    ncols = S.shape[1]
    n = y.n
    profile = [{"k": 2 * d, "rows": S.shape[0], "cols": ncols, "rank": rank, "full_column_rank": rank == ncols,
                "variant": variant}]
    basis = enumerate_basis(n, d)
    method = f"recover_singular(d={d}, variant={variant})"
    if rank == ncols:
        rep = RecoveryReport(DensePolynomial.zero(n, d), np.zeros(ncols), profile, sv, float("nan"), False, False,
                             method, notes=[f"full rank {rank}: stacked system has no kernel vector"])
        raise RecoveryError("stacked coordinate system has trivial kernel", rep)
    if rank < ncols - 1:
        rep = RecoveryReport(DensePolynomial.zero(n, d), np.zeros(ncols), profile, sv, float("nan"), False, True,
                             method, kernel_basis=Vt[rank:], notes=[f"kernel of dimension {ncols - rank}"])
        raise RecoveryError(f"stacked coordinate system has a {ncols - rank}-dimensional kernel", rep)
    v = Vt[-1]
    if abs(v[0]) > constant_tol * np.abs(v).max():
        v = -v / v[0]
        poly = DensePolynomial(n, d, np.concatenate([[0.0], v[1:]]))
        resid = normalized_residual(S, v)
        norm = "constant"
    else:
        v = v.copy()
        v[0] = 0.0 if abs(v[0]) < 1e-14 * np.abs(v).max() else v[0]
        top = basis.degrees == basis.degrees[np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max())].max()
        v = v / np.abs(v[top]).max()
        if float(v @ y.values[: v.size]) < 0:
            v = -v
        poly = DensePolynomial(n, d, v)
        resid = normalized_residual(S, v) / np.abs(v).max()
        norm = "vanishing"
    rep = RecoveryReport(poly, v, profile, sv, resid, True, True, method, extras={"normalization": norm})
    if norm == "vanishing":
        rep.notes.append("kernel vector has no constant term: the origin lies on the zero set of the boundary "
                         "polynomial; the report carries that vanishing polynomial")
    return rep


def approx_boundary(y: MomentSequence, d: int, mode: str = "eigen", imag_tol: float = 1e-10) -> RecoveryReport:
    """Polynomial whose zero set approximates a (possibly non-algebraic) boundary.

    Uses the eigenvector of ``M^d_d`` for the eigenvalue of least modulus, or
    the right singular vector of the least singular value.  The coefficient
    vector is returned as is (unit 2-norm, sign fixed by a negative constant
    term); no ``-1`` normalization is applied.
    """
    if mode not in ("eigen", "svd"):
        raise ValueError(f"unknown mode {mode!r}")
    y.require(2 * d, f"approximation with d={d}")
    M = assemble_renorm(y, d, d)
    E = M.entries
    sv = np.linalg.svd(E, compute_uv=False)
    eig, V = np.linalg.eig(E)
    notes = []
    used = mode
    if mode == "eigen":
        if np.abs(eig.imag).max() > imag_tol * np.abs(eig).max():
            notes.append("spectrum is not real; fell back to the smallest singular vector")
            used = "svd"
        else:
            i = int(np.argmin(np.abs(eig)))
            v = V[:, i].real
            smallest = float(abs(eig[i]))
            eig = eig.real
    if used == "svd":
        _, _, Vt = np.linalg.svd(E)
        v = Vt[-1]
        smallest = float(sv[-1])
    v = v / np.linalg.norm(v)
    if v[0] > 0:
        v = -v
    poly = DensePolynomial(y.n, d, v)
    largest = float(np.abs(eig).max()) if used == "eigen" else float(sv[0])
    rep = RecoveryReport(poly, v, [{"k": d, "rows": E.shape[0], "cols": E.shape[1],
                                    "rank": _rank(sv, DEFAULT_RANK_TOL)}],
                         sv, normalized_residual(E, v), True, True, f"approx_boundary(d={d}, mode={used})",
                         eigenvalues=eig, notes=notes,
                         extras={"smallest": smallest, "largest": largest, "relative_smallest": smallest / largest})
    return rep


def boundary_fit(p: DensePolynomial, points, eps: float = 1e-12) -> float:
    """``max |p(x)| / max(|grad p(x)|, eps)`` over boundary samples: a first-order distance proxy."""
    points = np.asarray(points, dtype=float)
    val = np.abs(eval_poly(p, points))
    gn = np.linalg.norm(gradient(p, points), axis=-1)
    return float((val / np.maximum(gn, eps)).max())


def recover_exp_weight(y: MomentSequence, d: int, tol: float = 1e-10, box_growth_limit: float = 1e3) -> RecoveryReport:
    """Recover ``g`` from moments of ``exp(-g(x)) dx`` over R^n.

    Solves ``Theta (-1, v) = Delta0 y^d`` with ``Theta = Delta M_d(y) D``,
    then fixes the constant ``g0 = ln int exp(-g~) - ln y_0``.
    """
    from .momentgen import moments_exp_global

    y.require(2 * d, f"exp-weight recovery with d={d}")
    n = y.n
    theta = theta_matrix(y, d)
    f = diagonal_factors(n, d)
    rhs = f.delta0 * y.values[: theta.shape[0]]
    sv = np.linalg.svd(theta, compute_uv=False)
    if sv[-1] <= 1e-14 * sv[0]:
        raise SingularMatrixError(f"Theta(y) is numerically singular (condition {sv[0] / max(sv[-1], 1e-300):.3g})")
    sol = np.linalg.solve(theta, rhs)
    Md = assemble_expglobal(y, d)
    g_tail = sol[1:]
    v = np.concatenate([[-1.0], g_tail])
    gt = DensePolynomial(n, d, np.concatenate([[0.0], g_tail]))
    z = moments_exp_global(gt, 0, tol=tol, box_growth_limit=box_growth_limit)
    g0 = float(np.log(z.values[0]) - np.log(y.values[0]))
    poly = DensePolynomial(n, d, np.concatenate([[g0], g_tail]))
    rep = RecoveryReport(poly, v, [{"k": d, "rows": theta.shape[0], "cols": theta.shape[1],
                                    "rank": _rank(sv, DEFAULT_RANK_TOL)}],
                         sv, normalized_residual(Md.entries, v), True, True, f"recover_exp_weight(d={d})",
                         extras={"leading_entry": float(sol[0]), "g0": g0, "condition": float(sv[0] / sv[-1]),
                                 "truncation_box": z.provenance.get("truncation_box")})
    if abs(sol[0] + 1.0) > 1e-6:
        rep.notes.append(f"first entry of Theta^-1 Delta0 y^d is {sol[0]:.10g}, expected -1")
    return rep


def recover_expdensity_boundary(y: MomentSequence, d: int, p: DensePolynomial,
                                rank_tol: float = DEFAULT_RANK_TOL) -> RecoveryReport:
    """Boundary recovery from moments of ``exp(p) dx`` on G (``k = 2d``)."""
    t = max(p.degree, 0)
    y.require(3 * d + t, f"exp-density recovery with d={d}, deg p={t}")
    prof, reps = _kernel_profile(y, d, range(d, 2 * d + 1), rank_tol, lambda k: assemble_expdensity(y, d, k, p))
    rep = reps[2 * d]
    rep.rank_profile = prof
    rep.method = f"recover_expdensity_boundary(d={d}, k={2 * d})"
    if not rep.ok:
        raise RecoveryError(f"exp-density system at k={2 * d} has no unique solution: {'; '.join(rep.notes)}", rep)
    return rep
