"""JSON and CSV files, and deterministic SVG rendering.

JSON floats are written with 17 significant digits and CSV floats with
``repr``; both round-trip every IEEE double exactly, so
``parse(render(x)) == x`` bit for bit.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .curves import CurvePath, DiscreteCurve, make_curve
from .errors import ParseError, ValidationError
from .metric import MetricSpec


def _read_source(source):
    """Text of ``source``: a Path, a file name, or the document itself."""
    if isinstance(source, Path):
        if not source.exists():
            raise ParseError(f"no such file: {source}")
        return source.read_text()
    if isinstance(source, bytes):
        return source.decode()
    text = source.lstrip()
    if text[:1] in "{[" or "\n" in text:
        return source
    if not Path(source).exists():
        raise ParseError(f"no such file: {source}")
    return Path(source).read_text()


def _load_json(source):
    if not isinstance(source, (str, bytes, Path)):
        return source
    try:
        return json.loads(_read_source(source))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def _encode(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, (bool, str)) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    value = float(obj)
    if not math.isfinite(value):
        raise ValidationError(f"cannot serialise non-finite value {value!r}")
    text = format(value, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def dumps_json(obj) -> str:
    """JSON text with every float at 17 significant digits."""
    return _encode(obj)


def dumps_curve(c: DiscreteCurve) -> str:
    return dumps_json(c.to_dict())


def loads_curve(source) -> DiscreteCurve:
    data = _load_json(source)
    try:
        return DiscreteCurve.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"not a curve document: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ValidationError(str(exc)) from exc


def dumps_path(path: CurvePath) -> str:
    return dumps_json(path.to_dict())


def loads_path(source) -> CurvePath:
    data = _load_json(source)
    try:
        return CurvePath.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"not a path document: {exc}") from None


def loads_field(source, n: int, d: int) -> np.ndarray:
    """Read a tangent field ``{"vectors": [[...], ...]}`` (or a bare nested list)."""
    data = _load_json(source)
    if isinstance(data, dict):
        data = data.get("vectors", data.get("vertices"))
    try:
        h = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"not a tangent field: {exc}") from None
    if h.shape != (n, d):
        raise ValidationError(f"field has shape {h.shape}, expected {(n, d)}")
    return h


def dumps_spec(spec: MetricSpec) -> str:
    return dumps_json(spec.to_dict())


def loads_spec(source) -> MetricSpec:
    data = _load_json(source)
    try:
        return MetricSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"not a metric spec: {exc}") from None


def _fmt(value):
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def table_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, (int, np.integer)) and not isinstance(v, bool)
                         else _fmt(v) for v in row])
    return buf.getvalue()


def grid_csv(grid) -> str:
    header = ["x", "y", "K"] + (["K_symlog"] if grid.transformed is not None else [])
    return table_csv(header, grid.rows())


def read_csv(source):
    """Parse a CSV table into a header and rows of floats (``None`` for empty fields)."""
    text = _read_source(source)
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[float(v) if v != "" else None for v in row] for row in reader if row]
    return header, rows


def convergence_csv(rows) -> str:
    return table_csv(["n", "discrete", "oracle", "abs_error", "order"],
                     [(r.n, r.discrete_value, r.oracle_value, r.abs_error, r.empirical_order)
                      for r in rows])


def probe_csv(table) -> str:
    return table_csv(["eps", "length"], table)


# --- SVG --------------------------------------------------------------------


def _num(v):
    return format(float(v), ".6f")


def _svg(width, height, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" '
            f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def render_path_svg(frames, cell: float = 120.0, margin: float = 10.0,
                    stroke: str = "#1f4e79") -> str:
    """Filmstrip of polygon frames laid out left to right.

    All frames share one scale and one bounding box, so congruent frames are
    drawn congruent.  The first vertex of each frame gets a marker.
    """
    if isinstance(frames, CurvePath):
        frames = frames.frames
    frames = [np.asarray(f, dtype=float) for f in (frames if frames is not None else [])]
    count = len(frames)
    width = max(count, 1) * cell
    body = [f'<rect class="frame" x="0" y="0" width="{_num(width)}" height="{_num(cell)}" '
            'fill="white" stroke="#999999"/>']
    if count:
        pts = np.concatenate([f[:, :2] for f in frames])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
        scale = (cell - 2 * margin) / span
        for k, f in enumerate(frames):
            xy = f[:, :2]
            px = k * cell + margin + (xy[:, 0] - lo[0]) * scale
            py = cell - margin - (xy[:, 1] - lo[1]) * scale
            points = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(px, py))
            body.append(f'<polygon class="curve" data-frame="{k}" points="{points}" '
                        f'fill="none" stroke="{stroke}" stroke-width="1.5"/>')
            body.append(f'<circle cx="{_num(px[0])}" cy="{_num(py[0])}" r="2" fill="#c0392b"/>')
    return _svg(width, cell, body)


def _diverging(t):
    """Blue-white-red colour for ``t`` in ``[0, 1]``."""
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        s = t / 0.5
        rgb = (int(round(59 + s * 196)), int(round(76 + s * 179)), int(round(192 + s * 63)))
    else:
        s = (t - 0.5) / 0.5
        rgb = (255, int(round(255 - s * 214)), int(round(255 - s * 211)))
    return "#%02x%02x%02x" % rgb


def render_grid_svg(grid, use_transformed: bool = True, cell: float = 6.0) -> str:
    """Heatmap of a curvature grid; the colour scale spans the data min and max."""
    values = grid.transformed if (use_transformed and grid.transformed is not None) else grid.values
    ny, nx = values.shape
    finite = values[np.isfinite(values)]
    vmin = float(finite.min()) if finite.size else 0.0
    vmax = float(finite.max()) if finite.size else 0.0
    width, height = nx * cell, ny * cell
    body = [f'<g class="heatmap" data-vmin="{vmin!r}" data-vmax="{vmax!r}">']
    for j in range(ny):
        for i in range(nx):
            v = values[j, i]
            if np.isfinite(v):
                t = 0.5 if vmax == vmin else (v - vmin) / (vmax - vmin)
                colour = _diverging(t)
            else:
                colour = "#808080"
            y = (ny - 1 - j) * cell
            body.append(f'<rect x="{_num(i * cell)}" y="{_num(y)}" width="{_num(cell)}" '
                        f'height="{_num(cell)}" fill="{colour}"/>')
    body.append("</g>")
    return _svg(width, height, body)


def render_svg(obj, **style) -> str:
    """Render a :class:`CurvePath`, a list of frames, or a curvature grid."""
    if hasattr(obj, "values") and hasattr(obj, "xs"):
        return render_grid_svg(obj, **style)
    return render_path_svg(obj, **style)


def write_text(path, text: str):
    Path(path).write_text(text)


def curve_from_points(points) -> DiscreteCurve:
    return make_curve(points)
