"""Atlas files: CSV, JSON and SVG emitters plus CSV/JSON readers.

CSV schema: header ``n_1..n_m,x_1..x_m,h``, one row per direction in grid
order, floats with 17 significant digits (exact double round-trip). CSV
carries no matrix or epsilon; those come from the run configuration.
"""

import csv
import io
import json
import os
import tempfile

import numpy as np

from .convexgeom import BoundaryAtlas
from .errors import InputError


def _fmt(v):
    return f"{float(v):.17g}"


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atlas_to_csv(atlas):
    m = atlas.dim
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"n_{i + 1}" for i in range(m)] + [f"x_{i + 1}" for i in range(m)] + ["h"])
    for n, x, h in atlas.records():
        writer.writerow([_fmt(v) for v in n] + [_fmt(v) for v in x] + [_fmt(h)])
    return buf.getvalue()


def atlas_to_json(atlas):
    doc = {
        "matrix": atlas.matrix.tolist(),
        "epsilon": atlas.epsilon,
        "truncation_order": int(atlas.truncation_order),
        "tail_bound": atlas.tail_bound,
        "tol": atlas.meta.get("tol"),
        "records": [
            {"n": n.tolist(), "x": x.tolist(), "h": float(h)} for n, x, h in atlas.records()
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def atlas_to_svg(atlas):
    """Single closed path through the planar boundary points.

    The path carries the atlas coordinates verbatim; a ``scale(1,-1)``
    transform puts the y axis up. The viewBox is padded 10% beyond the
    largest coordinate magnitude.
    """
    if atlas.dim != 2:
        raise InputError("svg output requires a planar (m = 2) atlas")
    X = atlas.points
    R = 1.1 * float(np.max(np.abs(X)))
    coords = " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in X)
    width = _fmt(R / 200.0)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(-R)} {_fmt(-R)} {_fmt(2 * R)} {_fmt(2 * R)}">\n'
        f'<path d="M {coords} Z" fill="none" stroke="black" stroke-width="{width}" '
        'transform="scale(1,-1)"/>\n'
        "</svg>\n"
    )


def svg_path_points(text):
    """Vertices of the first path element of an emitted SVG (for round-trips)."""
    start = text.index(' d="') + 4
    d = text[start : text.index('"', start)]
    parts = d.replace("M", " ").replace("L", " ").replace("Z", " ").split()
    return np.array([float(v) for v in parts]).reshape(-1, 2)


def emit(atlas, fmt):
    if fmt == "csv":
        return atlas_to_csv(atlas)
    if fmt == "json":
        return atlas_to_json(atlas)
    if fmt == "svg":
        return atlas_to_svg(atlas)
    raise InputError(f"unknown format {fmt!r}")


def _atlas_from_arrays(N, X, h, matrix, epsilon, order, tail, tol):
    return BoundaryAtlas(
        normals=np.asarray(N, dtype=float),
        points=np.asarray(X, dtype=float),
        support=np.asarray(h, dtype=float),
        matrix=np.asarray(matrix, dtype=float),
        epsilon=float(epsilon),
        truncation_order=int(order),
        tail_bound=float(tail),
        meta={} if tol is None else {"tol": float(tol)},
    )


def read_atlas(path, matrix=None, epsilon=None):
    """Load an atlas written by :func:`emit` (csv or json, by extension/content).

    CSV atlases need ``matrix`` and ``epsilon`` from the caller; JSON ones use
    their stored values unless overridden.
    """
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        recs = doc["records"]
        N = [r["n"] for r in recs]
        X = [r["x"] for r in recs]
        h = [r["h"] for r in recs]
        return _atlas_from_arrays(
            N, X, h,
            doc["matrix"] if matrix is None else matrix,
            doc["epsilon"] if epsilon is None else epsilon,
            doc.get("truncation_order", 0),
            doc.get("tail_bound", 0.0),
            doc.get("tol"),
        )
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputError("empty atlas file")
    header, body = rows[0], rows[1:]
    if len(header) % 2 != 1 or header[-1] != "h":
        raise InputError("atlas csv header must be n_1..n_m,x_1..x_m,h")
    m = (len(header) - 1) // 2
    data = np.array([[float(v) for v in row] for row in body if row])
    if matrix is None or epsilon is None:
        raise InputError("csv atlas needs matrix and epsilon from the configuration")
    return _atlas_from_arrays(data[:, :m], data[:, m : 2 * m], data[:, -1], matrix, epsilon, 0, 0.0, None)
