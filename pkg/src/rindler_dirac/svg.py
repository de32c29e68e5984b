"""Minimal deterministic SVG 1.1 plotting: axes, polylines and scatter markers."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _n(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return f"{v:.4g}"


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    points: bool = False


@dataclass
class Panel:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    series: list[Series] = field(default_factory=list)

    def add(self, x, y, label: str = "", points: bool = False) -> "Panel":
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, points))
        return self


def _limits(values: list[np.ndarray]) -> tuple[float, float]:
    allv = np.concatenate([v[np.isfinite(v)] for v in values]) if values else np.array([0.0, 1.0])
    lo, hi = float(np.min(allv)), float(np.max(allv))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _decimate(x: np.ndarray, y: np.ndarray, max_points: int = 800) -> tuple[np.ndarray, np.ndarray]:
    if x.size <= max_points:
        return x, y
    idx = np.unique(np.linspace(0, x.size - 1, max_points).round().astype(int))
    return x[idx], y[idx]


def _panel_svg(panel: Panel, ox: float, oy: float, w: float, h: float) -> list[str]:
    left, right, top, bottom = 60.0, 15.0, 28.0, 42.0
    pw, ph = w - left - right, h - top - bottom
    x0, x1 = _limits([s.x for s in panel.series])
    y0, y1 = _limits([s.y for s in panel.series])

    def px(v):
        return ox + left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return oy + top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [f'<rect x="{_n(ox + left)}" y="{_n(oy + top)}" width="{_n(pw)}" height="{_n(ph)}" '
           'fill="none" stroke="#000" stroke-width="1"/>']
    for t in np.linspace(x0, x1, 5):
        out.append(f'<line x1="{_n(px(t))}" y1="{_n(oy + top + ph)}" x2="{_n(px(t))}" y2="{_n(oy + top + ph + 4)}" stroke="#000"/>')
        out.append(f'<text x="{_n(px(t))}" y="{_n(oy + top + ph + 16)}" font-size="10" text-anchor="middle">{_tick(t)}</text>')
    for t in np.linspace(y0, y1, 5):
        out.append(f'<line x1="{_n(ox + left - 4)}" y1="{_n(py(t))}" x2="{_n(ox + left)}" y2="{_n(py(t))}" stroke="#000"/>')
        out.append(f'<text x="{_n(ox + left - 6)}" y="{_n(py(t) + 3)}" font-size="10" text-anchor="end">{_tick(t)}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{_n(ox + left)}" y1="{_n(py(0))}" x2="{_n(ox + left + pw)}" y2="{_n(py(0))}" '
                   'stroke="#999" stroke-dasharray="3,3"/>')
    out.append(f'<text x="{_n(ox + left + pw / 2)}" y="{_n(oy + 18)}" font-size="12" text-anchor="middle">{escape(panel.title)}</text>')
    out.append(f'<text x="{_n(ox + left + pw / 2)}" y="{_n(oy + h - 8)}" font-size="11" text-anchor="middle">{escape(panel.xlabel)}</text>')
    out.append(f'<text x="{_n(ox + 14)}" y="{_n(oy + top + ph / 2)}" font-size="11" text-anchor="middle" '
               f'transform="rotate(-90 {_n(ox + 14)} {_n(oy + top + ph / 2)})">{escape(panel.ylabel)}</text>')
    for i, s in enumerate(panel.series):
        color = PALETTE[i % len(PALETTE)]
        if s.points:
            for xv, yv in zip(s.x, s.y):
                out.append(f'<circle cx="{_n(px(xv))}" cy="{_n(py(yv))}" r="2.5" fill="{color}"/>')
        else:
            xs, ys = _decimate(s.x, s.y)
            pts = " ".join(f"{_n(px(a))},{_n(py(b))}" for a, b in zip(xs, ys))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        if s.label:
            ly = oy + top + 12 + 13 * i
            out.append(f'<rect x="{_n(ox + left + pw - 95)}" y="{_n(ly - 7)}" width="8" height="8" fill="{color}"/>')
            out.append(f'<text x="{_n(ox + left + pw - 83)}" y="{_n(ly)}" font-size="10">{escape(s.label)}</text>')
    return out


def render(panels: list[Panel], columns: int = 1, panel_size: tuple[float, float] = (420.0, 300.0), comment: str = "") -> str:
    cols = max(1, min(columns, len(panels)))
    rows = -(-len(panels) // cols)
    w, h = panel_size
    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_n(cols * w)}" height="{_n(rows * h)}" '
             f'viewBox="0 0 {_n(cols * w)} {_n(rows * h)}" font-family="sans-serif">']
    if comment:
        parts.append(f"<!-- {comment.replace('--', '- -')} -->")
    parts.append(f'<rect x="0" y="0" width="{_n(cols * w)}" height="{_n(rows * h)}" fill="#fff"/>')
    for i, panel in enumerate(panels):
        parts.extend(_panel_svg(panel, (i % cols) * w, (i // cols) * h, w, h))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
