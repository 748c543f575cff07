"""Reading and writing the JSON/CSV artifacts."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .core import DensePolynomial
from .sequence import MomentSequence


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, allow_nan=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_json(path):
    return json.loads(Path(path).read_text())


def save_moments(y: MomentSequence, path):
    return dump_json(y.to_dict(), path)


def load_moments(path) -> MomentSequence:
    return MomentSequence.from_dict(load_json(path))


def save_polynomial(p: DensePolynomial, path):
    return dump_json(p.to_dict(), path)


def load_polynomial(path) -> DensePolynomial:
    return DensePolynomial.from_dict(load_json(path))


def level_set_contours(p: DensePolynomial, level: float, lo, hi, resolution: int = 400):
    """Polylines of ``{p = level}`` inside the box ``[lo, hi]`` (n = 2 only)."""
    from skimage import measure

    if p.n != 2:
        raise ValueError("contours are only defined for n = 2")
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = p(np.stack([X, Y], axis=-1)) - level
    out = []
    for c in measure.find_contours(Z, 0.0):
        # fractional grid indices -> coordinates
        out.append(np.column_stack([np.interp(c[:, 0], np.arange(resolution), xs),
                                    np.interp(c[:, 1], np.arange(resolution), ys)]))
    return out


def contours_csv(contours) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["contour", "x1", "x2"])
    for i, c in enumerate(contours):
        for x1, x2 in c:
            w.writerow([i, f"{x1:.17g}", f"{x2:.17g}"])
    return buf.getvalue()
