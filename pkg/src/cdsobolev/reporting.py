"""Deterministic artifact writers: CSV tables, JSON documents, SVG line plots.

Every float is rendered with 17 significant digits, '.' decimal separator and
'\\n' line endings, so identical inputs produce byte-identical files on every
platform.  The SVG writer is a self-contained polyline plotter (axes, ticks,
legend) with no external renderer.
"""

from __future__ import annotations

import math
import os

from .errors import InvalidParameter
from .model_space import ModelSpace, ScalarField

FLOAT_FORMAT = ".17g"

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def fmt_float(x: float) -> str:
    """17-significant-digit decimal rendering; round-trips any double."""
    if not math.isfinite(x):
        raise InvalidParameter(f"non-finite value in output: {x}")
    return format(float(x), FLOAT_FORMAT)


def _fmt_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_cell(x) for x in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str, header, rows) -> None:
    write_text(path, csv_text(header, rows))


def _json_fragment(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {_json_fragment(v, indent, level + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = [pad + _json_fragment(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _json_fragment(obj.item(), indent, level)
    raise InvalidParameter(f"cannot serialize {type(obj).__name__} to JSON")


def json_text(obj, indent: int = 2) -> str:
    return _json_fragment(obj, indent, 0) + "\n"


def write_json(path: str, obj) -> None:
    write_text(path, json_text(obj))


def field_csv_text(space: ModelSpace, columns: dict) -> str:
    """CSV with a theta column followed by one column per named field."""
    names = list(columns)
    arrays = []
    for name in names:
        col = columns[name]
        arrays.append(col.values if isinstance(col, ScalarField) else col)
    rows = ((float(space.grid[i]), *(float(a[i]) for a in arrays))
            for i in range(space.resolution))
    return csv_text(["theta"] + names, rows)


def write_field_csv(path: str, space: ModelSpace, columns: dict) -> None:
    write_text(path, field_csv_text(space, columns))


def _ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _px(x: float) -> str:
    return format(x, ".2f")


def svg_line_plot(series, title: str = "", xlabel: str = "", ylabel: str = "",
                  width: int = 640, height: int = 480) -> str:
    """Render (label, xs, ys) series as an SVG polyline chart.

    Purely textual output: fixed canvas, linear axes with five ticks, legend
    in the top-right corner.  Points with non-finite coordinates are
    rejected rather than dropped.
    """
    if not series:
        raise InvalidParameter("svg_line_plot needs at least one series")
    ml, mr, mt, mb = 70, 20, 30, 45
    pw, ph = width - ml - mr, height - mt - mb
    xs_all = [float(x) for _, xs, _ in series for x in xs]
    ys_all = [float(y) for _, _, ys in series for y in ys]
    if not xs_all or not all(math.isfinite(v) for v in xs_all + ys_all):
        raise InvalidParameter("svg_line_plot needs finite, nonempty data")
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x0 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y0 + 0.5

    def tx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def ty(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
           'stroke="black" stroke-width="1"/>']
    for t in _ticks(x0, x1):
        px = tx(t)
        out.append(f'<line x1="{_px(px)}" y1="{mt + ph}" x2="{_px(px)}" '
                   f'y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_px(px)}" y="{mt + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{format(t, ".6g")}</text>')
    for t in _ticks(y0, y1):
        py = ty(t)
        out.append(f'<line x1="{ml - 5}" y1="{_px(py)}" x2="{ml}" '
                   f'y2="{_px(py)}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{_px(py + 4)}" font-size="11" '
                   f'text-anchor="end">{format(t, ".6g")}</text>')
    if title:
        out.append(f'<text x="{width // 2}" y="20" font-size="14" '
                   f'text-anchor="middle">{title}</text>')
    if xlabel:
        out.append(f'<text x="{ml + pw // 2}" y="{height - 8}" font-size="12" '
                   f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{mt + ph // 2}" font-size="12" '
                   f'text-anchor="middle" '
                   f'transform="rotate(-90 14 {mt + ph // 2})">{ylabel}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_px(tx(float(x)))},{_px(ty(float(y)))}"
                       for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   'stroke-width="1.5"/>')
        ly = mt + 14 + 16 * k
        out.append(f'<line x1="{width - mr - 110}" y1="{ly - 4}" '
                   f'x2="{width - mr - 90}" y2="{ly - 4}" stroke="{color}" '
                   'stroke-width="1.5"/>')
        out.append(f'<text x="{width - mr - 85}" y="{ly}" '
                   f'font-size="11">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: str, series, **kwargs) -> None:
    write_text(path, svg_line_plot(series, **kwargs))


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)
