"""Deterministic CSV, JSON and SVG emission with atomic writes."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np


def fmt(v) -> str:
    # repr round-trips doubles exactly and is platform independent
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    return atomic_write_text(path, csv_text(header, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_json(path, payload):
    return atomic_write_text(path, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


# --- SVG ------------------------------------------------------------------------

_LOW = np.array([68, 1, 84])
_HIGH = np.array([253, 231, 37])


def _color(t):
    rgb = np.rint(_LOW + (_HIGH - _LOW) * float(t)).astype(int)
    return "#%02x%02x%02x" % tuple(rgb)


def _num(v):
    return f"{v:.3f}".rstrip("0").rstrip(".")


def heatmap_svg(p_l, p_h, values, title="", argmax=None) -> str:
    """Expected objective over ``(p_l, p_h)`` with the policy loci drawn on top.

    ``values[i, j]`` belongs to ``(p_l[i], p_h[j])``; p_l runs left to right and
    p_h bottom to top.  Colors use a linear scale between the min and max.
    """
    size, pad, bar = 400.0, 50.0, 20.0
    width, height = pad * 2 + size + bar + 60, pad * 2 + size
    nl, nh = values.shape
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo if hi > lo else 1.0
    cw, ch = size / nl, size / nh
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
        f'<text x="{_num(pad)}" y="{_num(pad / 2)}" font-family="sans-serif" font-size="14">{title}</text>',
        '<g shape-rendering="crispEdges">',
    ]
    for i in range(nl):
        x = pad + i * cw
        for j in range(nh):
            y = pad + size - (j + 1) * ch
            c = _color((values[i, j] - lo) / span)
            out.append(
                f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(cw + 0.01)}" height="{_num(ch + 0.01)}" fill="{c}"/>'
            )
    out.append("</g>")

    def pt(pl, ph):
        return _num(pad + pl * size), _num(pad + size - ph * size)

    loci = '<g fill="none" stroke="white" stroke-width="2">'
    (x0, y0), (x1, y1) = pt(0, 1), pt(1, 0)
    loci += f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke-dasharray="6 4"/>'
    for a, b in (((0, 0), (1, 0)), ((0, 1), (1, 1))):
        (x0, y0), (x1, y1) = pt(*a), pt(*b)
        loci += f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#ffd24d"/>'
    for a, b in (((0, 0), (0, 1)), ((1, 0), (1, 1))):
        (x0, y0), (x1, y1) = pt(*a), pt(*b)
        loci += f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#4dd27a"/>'
    for corner in ((0, 0), (1, 1)):
        cx, cy = pt(*corner)
        loci += f'<circle cx="{cx}" cy="{cy}" r="5" fill="white"/>'
    loci += "</g>"
    out.append(loci)
    if argmax is not None:
        cx, cy = pt(*argmax)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="6" fill="none" stroke="red" stroke-width="2"/>')
    bx = pad + size + 15
    for k in range(50):
        y = pad + size - (k + 1) * size / 50
        out.append(
            f'<rect x="{_num(bx)}" y="{_num(y)}" width="{_num(bar)}" height="{_num(size / 50 + 0.01)}" '
            f'fill="{_color(k / 49)}"/>'
        )
    label = 'font-family="sans-serif" font-size="11"'
    out.append(f'<text x="{_num(bx + bar + 4)}" y="{_num(pad + 10)}" {label}>{hi:.4g}</text>')
    out.append(f'<text x="{_num(bx + bar + 4)}" y="{_num(pad + size)}" {label}>{lo:.4g}</text>')
    out.append(f'<text x="{_num(pad + size / 2)}" y="{_num(height - 12)}" {label}>p_l</text>')
    out.append(f'<text x="12" y="{_num(pad + size / 2)}" {label}>p_h</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_chart_svg(x, series: dict, title="", xlabel="mu") -> str:
    """Polylines of one or more series sharing the x axis."""
    w, h, pad = 480.0, 320.0, 50.0
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    lo = min(float(v.min()) for v in ys)
    hi = max(float(v.max()) for v in ys)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    xlo, xhi = float(x.min()), float(x.max())
    xspan = xhi - xlo if xhi > xlo else 1.0
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(w)}" height="{_num(h)}" viewBox="0 0 {_num(w)} {_num(h)}">',
        f'<text x="{_num(pad)}" y="20" font-family="sans-serif" font-size="14">{title}</text>',
        f'<rect x="{_num(pad)}" y="{_num(pad)}" width="{_num(w - 2 * pad)}" height="{_num(h - 2 * pad)}" '
        'fill="none" stroke="#444"/>',
    ]
    for k, (name, y) in enumerate(zip(series, ys)):
        px = pad + (x - xlo) / xspan * (w - 2 * pad)
        py = h - pad - (y - lo) / (hi - lo) * (h - 2 * pad)
        pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(px, py))
        color = colors[k % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(
            f'<text x="{_num(w - pad - 120)}" y="{_num(pad + 14 + 14 * k)}" font-family="sans-serif" '
            f'font-size="11" fill="{color}">{name}</text>'
        )
    label = 'font-family="sans-serif" font-size="11"'
    out.append(f'<text x="{_num(pad)}" y="{_num(h - pad + 16)}" {label}>{xlo:.3g}</text>')
    out.append(f'<text x="{_num(w - pad - 20)}" y="{_num(h - pad + 16)}" {label}>{xhi:.3g}</text>')
    out.append(f'<text x="{_num(w / 2)}" y="{_num(h - 12)}" {label}>{xlabel}</text>')
    out.append(f'<text x="4" y="{_num(pad + 4)}" {label}>{hi:.4g}</text>')
    out.append(f'<text x="4" y="{_num(h - pad)}" {label}>{lo:.4g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
