"""Moment quadrature over regions given by inequality constraints.

The last coordinate is integrated exactly on the slice intervals found from
the constraint roots.  The remaining coordinates use Gauss-Legendre rules
after the substitution ``x = mid - half * cos(theta)``, which removes the
square-root behaviour where slices appear or split.  For ``n = 2`` the first
coordinate is additionally split at every point where the slice structure
changes, so each piece is smooth.  Node counts double until two successive
levels agree to the requested tolerance.
"""
from __future__ import annotations

import numpy as np

from .core import enumerate_basis
from .errors import QuadratureError

_SCAN_POINTS = 401


def gauss_legendre(m: int):
    return np.polynomial.legendre.leggauss(m)


def _cos_rule(a: float, b: float, m: int):
    """Nodes/weights on [a, b] from GL in theta after x = mid - half*cos(theta)."""
    th, w = gauss_legendre(m)
    th = 0.5 * np.pi * (th + 1.0)
    w = 0.5 * np.pi * w
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid - half * np.cos(th), w * half * np.sin(th)


def _slice_segments(constraints, xo, lo, hi):
    """Inside segments along the last coordinate.

    Returns ``(a, b, inside, src_a, src_b)`` arrays of shape ``(N, S)``.
    ``src`` records which constraint produced each endpoint (-1 box).
    """
    N = xo.shape[0]
    pts, src = [np.full((N, 1), lo), np.full((N, 1), hi)], [np.full((N, 1), -1), np.full((N, 1), -1)]
    for k, c in enumerate(constraints):
        r = c.roots_last(xo)
        r = np.where((r > lo) & (r < hi), r, np.nan)
        pts.append(r)
        src.append(np.full(r.shape, k))
    P = np.concatenate(pts, axis=1)
    S = np.concatenate(src, axis=1)
    order = np.argsort(P, axis=1)  # NaN sorts last
    P = np.take_along_axis(P, order, axis=1)
    S = np.take_along_axis(S, order, axis=1)
    a, b = P[:, :-1], P[:, 1:]
    valid = ~np.isnan(a) & ~np.isnan(b) & (b > a)
    mid = np.where(valid, 0.5 * (a + b), lo)
    full = np.concatenate([np.repeat(xo[:, None, :], mid.shape[1], axis=1), mid[..., None]], axis=-1)
    inside = valid.copy()
    for c in constraints:
        inside &= c.value(full) < 0
    return np.nan_to_num(a), np.nan_to_num(b), inside, S[:, :-1], S[:, 1:]


def slice_power_integrals(constraints, xo, lo, hi, max_power, weight=None, m_inner=32):
    """``I[i, k] = int t^k w(xo_i, t) dt`` over the inside part of ``[lo, hi]``."""
    a, b, inside, _, _ = _slice_segments(constraints, xo, lo, hi)
    ks = np.arange(max_power + 1)
    if weight is None:
        # exact power integrals on each segment
        pa = a[..., None] ** (ks + 1)
        pb = b[..., None] ** (ks + 1)
        contrib = (pb - pa) / (ks + 1)
        return (contrib * inside[..., None]).sum(axis=1)
    t, w = gauss_legendre(m_inner)
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b)[..., None] + half[..., None] * t  # (N, S, m)
    full = np.concatenate(
        [np.broadcast_to(xo[:, None, None, :], nodes.shape + (xo.shape[1],)), nodes[..., None]], axis=-1
    )
    wt = weight(full) * w * half[..., None] * inside[..., None]
    return np.einsum("nsm,nsmk->nk", wt, nodes[..., None] ** ks)


def _signature(constraints, xo, lo, hi):
    a, b, inside, sa, sb = _slice_segments(constraints, xo, lo, hi)
    sigs = []
    for i in range(xo.shape[0]):
        segs = []
        for j in np.flatnonzero(inside[i]):
            if segs and segs[-1][1] == a[i, j]:
                segs[-1] = (segs[-1][0], b[i, j], segs[-1][2], sb[i, j])
            else:
                segs.append((a[i, j], b[i, j], sa[i, j], sb[i, j]))
        sigs.append(tuple((s0, s1) for _, _, s0, s1 in segs))
    return sigs


def find_breakpoints(constraints, lo, hi, scan=_SCAN_POINTS):
    """Points in the first coordinate (n = 2) where the slice structure changes."""
    lo1, hi1 = lo[0], hi[0]
    xs = np.linspace(lo1, hi1, scan)
    sigs = _signature(constraints, xs[:, None], lo[1], hi[1])
    bps = []
    for i in range(scan - 1):
        if sigs[i] == sigs[i + 1]:
            continue
        l, r = xs[i], xs[i + 1]
        sl = sigs[i]
        for _ in range(60):
            mid = 0.5 * (l + r)
            if mid <= l or mid >= r:
                break
            if _signature(constraints, np.array([[mid]]), lo[1], hi[1])[0] == sl:
                l = mid
            else:
                r = mid
        bps.append(0.5 * (l + r))
    return bps


def _outer_rule(lo, hi, m, breakpoints):
    edges = [lo] + [b for b in breakpoints if lo < b < hi] + [hi]
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        x, w = _cos_rule(a, b, m)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _moments_at_level(constraints, n, lo, hi, max_order, m, weight, breakpoints):
    basis = enumerate_basis(n, max_order)
    exps = basis.exponents
    m_inner = int(np.clip(m // 2, 16, 128))
    if n == 1:
        I = slice_power_integrals(constraints, np.zeros((1, 0)), lo[0], hi[0], max_order, weight, m_inner)[0]
        return I[exps[:, 0]]
    rules = []
    for j in range(n - 1):
        bps = breakpoints if j == 0 else []
        rules.append(_outer_rule(lo[j], hi[j], m if n == 2 else max(m // 4, 16), bps))
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrid = np.ones_like(grids[0])
    for j, r in enumerate(rules):
        shape = [1] * (n - 1)
        shape[j] = -1
        wgrid = wgrid * r[1].reshape(shape)
    xo = np.stack([g.ravel() for g in grids], axis=-1)
    wo = wgrid.ravel()
    out = np.zeros(basis.size)
    chunk = 20000
    for start in range(0, xo.shape[0], chunk):
        sl = slice(start, start + chunk)
        I = slice_power_integrals(constraints, xo[sl], lo[-1], hi[-1], max_order, weight, m_inner)
        lead = np.ones((xo[sl].shape[0], basis.size))
        for i in range(n - 1):
            lead *= xo[sl, i : i + 1] ** exps[:, i]
        out += np.einsum("p,pa,pa->a", wo[sl], lead, I[:, exps[:, -1]])
    return out


def integrate_moments(constraints, n, lo, hi, max_order, tol=1e-8, weight=None, m0=16, m_max=None):
    """All moments of order <= max_order of ``w(x) dx`` restricted to the region.

    Returns ``(values, info)``; ``info`` records node counts and the final
    change between refinement levels.  The stopping rule is
    ``|change| <= tol * max(1, |value|)`` for every entry.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if m_max is None:
        m_max = {1: 4096, 2: 2048}.get(n, 256)
    bps = find_breakpoints(constraints, lo, hi) if n == 2 else []
    m = m0
    prev = _moments_at_level(constraints, n, lo, hi, max_order, m, weight, bps)
    while True:
        m *= 2
        cur = _moments_at_level(constraints, n, lo, hi, max_order, m, weight, bps)
        change = np.abs(cur - prev)
        ok = change <= tol * np.maximum(1.0, np.abs(cur))
        if ok.all():
            return cur, {"nodes": m, "breakpoints": [float(b) for b in bps], "max_change": float(change.max())}
        if m >= m_max:
            worst = int(np.argmax(change / np.maximum(1.0, np.abs(cur))))
            raise QuadratureError(
                f"quadrature did not reach tol={tol:g} with {m} nodes; "
                f"worst entry {enumerate_basis(n, max_order).indices[worst]} changed by {change[worst]:.3g}"
            )
        prev = cur
