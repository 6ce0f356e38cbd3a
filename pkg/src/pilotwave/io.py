"""CSV, JSON and SVG writers.

Output is byte-stable: fixed float formatting, sorted JSON keys, '\\n' line
endings, no timestamps.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path: Path, header: Sequence[str], columns: Sequence[Iterable]) -> Path:
    cols = [list(c) for c in columns]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("CSV columns have different lengths")
    lines = [",".join(header)]
    lines += [",".join(fmt(c[i]) for c in cols) for i in range(n)]
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
    return path


WIDTH, HEIGHT = 960, 540
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _polyline(xs, ys, x_lim, y_lim, box, color, dash=None):
    x0, y0, w, h = box
    (xmin, xmax), (ymin, ymax) = x_lim, y_lim
    xspan = (xmax - xmin) or 1.0
    yspan = (ymax - ymin) or 1.0
    pts = " ".join(
        f"{x0 + (x - xmin) / xspan * w:.2f},{y0 + h - (y - ymin) / yspan * h:.2f}"
        for x, y in zip(xs, ys)
    )
    style = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{style} points="{pts}"/>'


def svg_plot(
    x,
    series: Sequence[tuple[str, Sequence[float]]],
    xlabel: str = "theta",
    ylabel: str = "value",
    title: str = "",
    lower_series: Sequence[tuple[str, Sequence[float]]] = (),
    lower_x=None,
) -> str:
    """Polyline plot in a fixed 960x540 viewBox; optional lower panel (e.g. chi^2 per bin)."""
    x = np.asarray(x, dtype=float)
    has_lower = bool(lower_series)
    plot_h = HEIGHT - 2 * MARGIN
    upper_h = plot_h * (0.68 if has_lower else 1.0)
    box = (MARGIN, MARGIN, WIDTH - 2 * MARGIN, upper_h)
    x_lim = (float(x.min()), float(x.max()))
    ys_all = np.concatenate([np.asarray(s, float) for _, s in series])
    y_lim = (min(0.0, float(ys_all.min())), float(ys_all.max()))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<rect x="{box[0]}" y="{box[1]}" width="{box[2]}" height="{box[3]:.2f}" '
        'fill="none" stroke="#000000"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="30" text-anchor="middle" font-size="16">{title}</text>')
    for i, (label, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        out.append(_polyline(x, ys, x_lim, y_lim, box, color, dash="6,3" if i else None))
        out.append(
            f'<text x="{WIDTH - MARGIN - 10}" y="{MARGIN + 20 + 18 * i}" text-anchor="end" '
            f'font-size="13" fill="{color}">{label}</text>'
        )
    out.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{xlabel}</text>')
    out.append(
        f'<text x="18" y="{MARGIN + upper_h / 2:.0f}" font-size="13" '
        f'transform="rotate(-90 18 {MARGIN + upper_h / 2:.0f})" text-anchor="middle">{ylabel}</text>'
    )
    out.append(f'<text x="{MARGIN - 6}" y="{MARGIN + 5}" text-anchor="end" font-size="11">{y_lim[1]:.3g}</text>')
    out.append(
        f'<text x="{MARGIN - 6}" y="{MARGIN + upper_h:.0f}" text-anchor="end" font-size="11">{y_lim[0]:.3g}</text>'
    )

    if has_lower:
        lx = x if lower_x is None else np.asarray(lower_x, dtype=float)
        lbox = (MARGIN, MARGIN + upper_h + 20, WIDTH - 2 * MARGIN, plot_h - upper_h - 20)
        out.append(
            f'<rect x="{lbox[0]}" y="{lbox[1]:.2f}" width="{lbox[2]}" height="{lbox[3]:.2f}" '
            'fill="none" stroke="#000000"/>'
        )
        lys = np.concatenate([np.asarray(s, float) for _, s in lower_series])
        ly_lim = (0.0, float(lys.max()) if lys.max() > 0 else 1.0)
        for i, (label, ys) in enumerate(lower_series):
            color = COLORS[(len(series) + i) % len(COLORS)]
            out.append(_polyline(lx, ys, x_lim, ly_lim, lbox, color))
            out.append(
                f'<text x="{WIDTH - MARGIN - 10}" y="{lbox[1] + 16:.0f}" text-anchor="end" '
                f'font-size="13" fill="{color}">{label}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: Path, svg: str) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    return path
