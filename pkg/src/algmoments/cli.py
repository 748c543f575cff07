"""Command-line front end: ``algmoments {gen,recover,recover-exp,extend,diagnose}``.

Every run writes its main artifact to ``--out`` (or stdout) and a manifest
echoing the resolved configuration (``<out>.manifest.json`` by default).  Failures exit
nonzero and emit a JSON error object.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import enumerate_basis, parse_alpha
from .determinateness import extend_moments, extend_moments_expdensity, extend_moments_expglobal
from .errors import MomentError, RecoveryError
from .io import contours_csv, dump_json, level_set_contours, load_moments, load_polynomial
from .matrices import assemble_renorm
from .momentgen import gaussian_moments_oracle, moments_exp_density, moments_exp_global, moments_indicator
from .recovery import (DEFAULT_RANK_TOL, approx_boundary, kernel_solve, recover_boundary, recover_convex,
                       recover_exp_weight, recover_min_order, recover_singular)
from .regions import parse_fixture


def _build_parser():
    p = argparse.ArgumentParser(prog="algmoments", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_d=True):
        src = sp.add_argument_group("moment source")
        src.add_argument("--moments", help="moment JSON file")
        src.add_argument("--fixture", help="named region, e.g. disk, annulus:s=0.6667, simplex, exp-curve")
        src.add_argument("--max-order", type=int, help="order generated for --fixture")
        src.add_argument("--method", default="auto", choices=["auto", "closed-form", "quadrature", "monte-carlo"])
        src.add_argument("--samples", type=int, default=200_000)
        src.add_argument("--seed", type=int, default=0)
        src.add_argument("--tol", type=float, default=None, help="quadrature tolerance (default 1e-8; 1e-10 for extend)")
        if needs_d:
            sp.add_argument("--d", type=int, required=True, help="degree of the boundary polynomial / weight")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--manifest", help="manifest path (default <out>.manifest.json, "
                                           "or algmoments-<command>.manifest.json without --out)")

    g = sub.add_parser("gen", help="write a moment file")
    common(g, needs_d=False)
    g.add_argument("--density-exp", help="polynomial JSON p: moments of exp(p) dx on the fixture")
    g.add_argument("--exp-global", help="polynomial JSON g: moments of exp(-g) dx on R^n")
    g.add_argument("--gaussian", help="comma-separated Sigma (row-major): exact moments of exp(-x^T Sigma x)")
    g.add_argument("--constant", type=float, default=0.0, help="additive constant for --gaussian")

    r = sub.add_parser("recover", help="recover the boundary polynomial")
    common(r)
    r.add_argument("--k", type=int, help="solve only the k-th system M^d_k")
    r.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)
    r.add_argument("--solver", default="boundary", choices=["boundary", "min-order", "convex", "singular", "approx"])
    r.add_argument("--recenter", action="store_true")
    r.add_argument("--variant", default="derived", choices=["derived", "paper-literal"])
    r.add_argument("--mode", default="eigen", choices=["eigen", "svd"])
    r.add_argument("--emit-contour", help="CSV path for samples of the level set")
    r.add_argument("--box", help="lo1,lo2,hi1,hi2 for --emit-contour (write --box=-1,-1,1,1 for negative bounds)")

    x = sub.add_parser("recover-exp", help="recover g from moments of exp(-g) dx on R^n")
    common(x)

    e = sub.add_parser("extend", help="extend a moment sequence to higher orders")
    common(e)
    e.add_argument("--targets", help="semicolon-separated multi-indices, e.g. '8,0;6,2'")
    e.add_argument("--target-order", type=int, help="extend every multi-index up to this order")
    e.add_argument("--density-exp", help="polynomial JSON p for exp(p) dx moments")
    e.add_argument("--exp-global", action="store_true", help="moments are of exp(-g) dx on R^n")
    e.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)
    e.add_argument("--checked-csv", help="CSV path for (alpha, extended, oracle, rel_error)")
    e.add_argument("--oracle", help="moment JSON with reference values for the targets")

    dg = sub.add_parser("diagnose", help="rank/spectrum tables for k = d..2d")
    common(dg)
    dg.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)
    return p


def _moments(args, default_order):
    if args.moments:
        return load_moments(args.moments)
    if not args.fixture:
        raise SystemExit("either --moments or --fixture is required")
    order = args.max_order if args.max_order is not None else default_order
    region = parse_fixture(args.fixture)
    return moments_indicator(region, order, method=args.method, tol=args.tol or 1e-8, samples=args.samples,
                             seed=args.seed)


def _emit(obj, out):
    text = dump_json(obj, out)
    if out is None:
        sys.stdout.write(text)


def _write_manifest(args, status):
    path = args.manifest or (f"{args.out}.manifest.json" if args.out else f"algmoments-{args.command}.manifest.json")
    cfg = {k: v for k, v in sorted(vars(args).items())}
    manifest = {"tool": "algmoments", "version": __version__, "config": cfg, "status": status}
    dump_json(manifest, path)


def _table(values, digits=8):
    return [f"{v:.{digits}g}" for v in values]


def cmd_gen(args):
    if args.gaussian:
        vals = [float(v) for v in args.gaussian.split(",")]
        n = int(round(len(vals) ** 0.5))
        y = gaussian_moments_oracle(np.array(vals).reshape(n, n), args.max_order or 4, constant=args.constant)
    elif args.exp_global:
        y = moments_exp_global(load_polynomial(args.exp_global), args.max_order or 4, tol=args.tol or 1e-8)
    elif args.density_exp:
        region = parse_fixture(args.fixture)
        y = moments_exp_density(region, load_polynomial(args.density_exp), args.max_order or 4, tol=args.tol or 1e-8)
    else:
        y = _moments(args, 4)
    _emit(y.to_dict(), args.out)
    return 0


def _contour(args, rep, level):
    if not args.emit_contour:
        return
    if not args.box:
        raise SystemExit("--emit-contour needs --box lo1,lo2,hi1,hi2")
    b = [float(v) for v in args.box.split(",")]
    cs = level_set_contours(rep.polynomial, level, b[:2], b[2:])
    Path(args.emit_contour).write_text(contours_csv(cs))


def cmd_recover(args):
    y = _moments(args, 3 * args.d)
    level = 1.0
    if args.k is not None:
        rep = kernel_solve(assemble_renorm(y, args.d, args.k), args.rank_tol, method=f"kernel_solve(d={args.d}, k={args.k})")
        status = 0 if rep.ok else 1
    else:
        solver = {
            "boundary": lambda: recover_boundary(y, args.d, args.rank_tol),
            "min-order": lambda: recover_min_order(y, args.d, args.rank_tol),
            "convex": lambda: recover_convex(y, args.d, args.recenter, args.rank_tol),
            "singular": lambda: recover_singular(y, args.d, args.variant, args.rank_tol),
            "approx": lambda: approx_boundary(y, args.d, args.mode),
        }[args.solver]
        rep = solver()
        status = 0
        if args.solver == "approx" or rep.extras.get("normalization") == "vanishing":
            level = 0.0
    _emit(rep.to_dict(), args.out)
    _contour(args, rep, level)
    return status


def cmd_recover_exp(args):
    y = _moments(args, 2 * args.d)
    rep = recover_exp_weight(y, args.d, tol=args.tol or 1e-10)
    _emit(rep.to_dict(), args.out)
    return 0


def cmd_extend(args):
    y = _moments(args, 3 * args.d)
    if args.targets:
        targets = [parse_alpha(t) for t in args.targets.split(";") if t]
    elif args.target_order is not None:
        targets = list(enumerate_basis(y.n, args.target_order).indices)
    else:
        raise SystemExit("extend needs --targets or --target-order")
    tol = args.tol or 1e-10
    oracle = None
    if args.oracle:
        ref = load_moments(args.oracle)
        oracle = lambda a: ref[a]
    if args.exp_global:
        res = extend_moments_expglobal(y, args.d, targets, tol=tol, oracle=oracle)
    elif args.density_exp:
        res = extend_moments_expdensity(y, args.d, load_polynomial(args.density_exp), targets, tol=tol, oracle=oracle)
    else:
        res = extend_moments(y, args.d, targets, tol=tol, oracle=oracle, rank_tol=args.rank_tol)
    _emit(res.to_dict(), args.out)
    if args.checked_csv:
        Path(args.checked_csv).write_text(res.checked_csv())
    if res.checked and any(rel > 10 * tol for _, _, rel in res.checked.values()):
        return 1
    return 0


def cmd_diagnose(args):
    y = _moments(args, 2 * args.d)
    d = args.d
    rows = []
    for k in range(d, min(2 * d, y.max_order - d) + 1):
        M = assemble_renorm(y, d, k)
        rep = kernel_solve(M, args.rank_tol)
        entry = {"k": k, "shape": list(M.shape), "rank": rep.rank_profile[0]["rank"],
                 "singular_values": _table(rep.spectrum), "unique": rep.unique, "consistent": rep.consistent}
        if rep.eigenvalues is not None:
            ev = rep.eigenvalues
            entry["eigenvalues"] = _table(ev.real) if np.abs(ev.imag).max() == 0 else [f"{z:.8g}" for z in ev]
        if rep.consistent:
            entry["kernel"] = _table(rep.kernel)
            entry["residual"] = f"{rep.residual:.8g}"
        if rep.kernel_basis is not None:
            entry["kernel_basis"] = [_table(v) for v in rep.kernel_basis]
        entry["notes"] = rep.notes
        rows.append(entry)
    _emit({"d": d, "n": y.n, "max_order": y.max_order, "systems": rows}, args.out)
    return 0


COMMANDS = {"gen": cmd_gen, "recover": cmd_recover, "recover-exp": cmd_recover_exp, "extend": cmd_extend,
            "diagnose": cmd_diagnose}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        status = COMMANDS[args.command](args)
    except MomentError as err:
        obj = err.to_dict()
        if args.out:
            dump_json(obj, args.out)
        sys.stderr.write(json.dumps(obj) + "\n")
        status = 2 if not isinstance(err, RecoveryError) else 1
    _write_manifest(args, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
