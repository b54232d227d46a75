"""Minimal self-contained SVG line charts (800x600, no plotting dependency)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
COLOURS = ("#d62728", "#2ca02c", "#1f77b4", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Panel:
    title: str
    x: np.ndarray
    series: Dict[str, np.ndarray]


def _layout(count: int):
    cols = 1 if count == 1 else 2
    rows = math.ceil(count / cols)
    return rows, cols


def _ticks(lo: float, hi: float, k: int = 5) -> Sequence[float]:
    return [lo + (hi - lo) * i / (k - 1) for i in range(k)]


def _panel_svg(p: Panel, x0: float, y0: float, w: float, h: float,
               x_label: str, y_label: str) -> str:
    ml, mr, mt, mb = 62.0, 12.0, 26.0, 40.0
    pw, ph = w - ml - mr, h - mt - mb
    xs = np.asarray(p.x, dtype=float)
    ys = np.concatenate([np.asarray(v, dtype=float) for v in p.series.values()])
    ys = ys[np.isfinite(ys)]
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if yhi == ylo:
        yhi = ylo + 1.0
    if xhi == xlo:
        xhi = xlo + 1.0

    def sx(v):
        return x0 + ml + (v - xlo) / (xhi - xlo) * pw

    def sy(v):
        return y0 + mt + (yhi - v) / (yhi - ylo) * ph

    out = ['<g class="panel">',
           f'<text x="{x0 + ml + pw / 2:.1f}" y="{y0 + 16:.1f}" text-anchor="middle" '
           f'font-size="13">{escape(p.title)}</text>',
           f'<rect x="{x0 + ml:.1f}" y="{y0 + mt:.1f}" width="{pw:.1f}" height="{ph:.1f}" '
           f'fill="none" stroke="#444"/>']
    for v in _ticks(xlo, xhi):
        out.append(f'<text x="{sx(v):.1f}" y="{y0 + mt + ph + 14:.1f}" text-anchor="middle" '
                   f'font-size="10">{v:.3g}</text>')
    for v in _ticks(ylo, yhi):
        out.append(f'<text x="{x0 + ml - 4:.1f}" y="{sy(v) + 3:.1f}" text-anchor="end" '
                   f'font-size="10">{v:.3g}</text>')
    out.append(f'<text x="{x0 + ml + pw / 2:.1f}" y="{y0 + h - 8:.1f}" text-anchor="middle" '
               f'font-size="11">{escape(x_label)}</text>')
    out.append(f'<text x="{x0 + 12:.1f}" y="{y0 + mt + ph / 2:.1f}" font-size="11" '
               f'transform="rotate(-90 {x0 + 12:.1f} {y0 + mt + ph / 2:.1f})" '
               f'text-anchor="middle">{escape(y_label)}</text>')
    for i, (name, ys_) in enumerate(p.series.items()):
        colour = COLOURS[i % len(COLOURS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys_) if math.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" '
                   f'data-series="{escape(name)}" points="{pts}"/>')
        ly = y0 + mt + 14 + 14 * i
        lx = x0 + ml + pw - 120
        out.append(f'<line x1="{lx:.1f}" y1="{ly - 4:.1f}" x2="{lx + 18:.1f}" y2="{ly - 4:.1f}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 22:.1f}" y="{ly:.1f}" font-size="10">{escape(name)}</text>')
    out.append("</g>")
    return "\n".join(out)


def render(panels: Sequence[Panel], x_label: str = "x", y_label: str = "y") -> str:
    """SVG document with one panel per entry, each with one polyline per series."""
    if not panels:
        raise ValueError("nothing to plot")
    rows, cols = _layout(len(panels))
    w, h = WIDTH / cols, HEIGHT / rows
    body = [_panel_svg(p, (i % cols) * w, (i // cols) * h, w, h, x_label, y_label)
            for i, p in enumerate(panels)]
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            '<rect width="100%" height="100%" fill="white"/>\n'
            + "\n".join(body) + "\n</svg>\n")
