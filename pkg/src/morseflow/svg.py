"""Minimal line-plot SVG writer with stable output (no timestamps, fixed precision)."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _thin(xs: np.ndarray, ys: np.ndarray, limit: int) -> tuple[np.ndarray, np.ndarray]:
    if len(xs) <= limit:
        return xs, ys
    idx = np.unique(np.linspace(0, len(xs) - 1, limit).round().astype(int))
    return xs[idx], ys[idx]


def line_plot(series: Sequence[tuple], title: str = "", xlabel: str = "t", ylabel: str = "x",
              hlines: Sequence[float] = (), width: int = 640, height: int = 400,
              ylim: tuple | None = None, max_points: int = 1500) -> str:
    """``series`` holds ``(label, xs, ys)`` triples; ``hlines`` are dashed reference levels."""
    left, right, top, bottom = 60, 20, 30, 45
    all_x = np.concatenate([np.asarray(s[1], dtype=float) for s in series]) if series else np.zeros(1)
    all_y = np.concatenate([np.asarray(s[2], dtype=float) for s in series]) if series else np.zeros(1)
    x0, x1 = float(all_x.min()), float(all_x.max())
    if ylim is None:
        y0 = float(min(all_y.min(), *hlines)) if hlines else float(all_y.min())
        y1 = float(max(all_y.max(), *hlines)) if hlines else float(all_y.max())
    else:
        y0, y1 = map(float, ylim)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle" font-size="12">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 14 {height / 2:.1f})">{escape(ylabel)}</text>')
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{px(xv):.2f}" y="{top + ph + 16}" text-anchor="middle" font-size="10">{xv:.4g}</text>')
        out.append(f'<text x="{left - 6}" y="{py(yv) + 4:.2f}" text-anchor="end" font-size="10">{yv:.4g}</text>')
    for y in hlines:
        out.append(f'<line x1="{left}" x2="{left + pw}" y1="{py(y):.2f}" y2="{py(y):.2f}" '
                   'stroke="#999" stroke-dasharray="4 3"/>')
    for k, (label, xs, ys) in enumerate(series):
        xs, ys = _thin(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), max_points)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys))
        colour = PALETTE[k % len(PALETTE)]
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{pts}"/>')
        out.append(f'<text x="{left + 8}" y="{top + 14 + 13 * k}" font-size="11" fill="{colour}">'
                   f'{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
