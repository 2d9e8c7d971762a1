"""Minimal standalone SVG line plots, no plotting library required.

The output is a self-contained SVG document: one polyline plus point markers
per data series, linear or log10 axes with labeled ticks, and a legend.
Textual output keeps experiment artifacts diffable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

__all__ = ["PlotSpec", "emit_svg"]

WIDTH, HEIGHT = 720, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 72, 24, 40, 56

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class PlotSpec:
    """Which columns to draw and how to scale the axes."""

    title: str
    x_label: str
    y_label: str
    x_column: str
    y_columns: tuple[str, ...]
    log_x: bool = False
    log_y: bool = False


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    magnitude = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * magnitude:
            step = mult * magnitude
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _decade_ticks(lo: float, hi: float) -> list[float]:
    return [10.0**e for e in range(math.ceil(lo - 1e-9), math.floor(hi + 1e-9) + 1)]


def _fmt(value: float) -> str:
    return f"{value:.6g}"


class _Axis:
    """Maps one data coordinate onto a pixel range."""

    def __init__(self, values: Sequence[float], log: bool, pixel_lo: float, pixel_hi: float):
        if log and min(values) <= 0:
            raise ValueError("log axis requires strictly positive values")
        transformed = [math.log10(v) for v in values] if log else list(values)
        lo, hi = min(transformed), max(transformed)
        if lo == hi:  # single point: pad so it lands mid-axis
            pad = 1.0 if log else max(1.0, abs(lo) * 0.1)
            lo, hi = lo - pad, hi + pad
        self.log = log
        self.lo, self.hi = lo, hi
        self.pixel_lo, self.pixel_hi = pixel_lo, pixel_hi

    def to_pixel(self, value: float) -> float:
        v = math.log10(value) if self.log else value
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.pixel_lo + frac * (self.pixel_hi - self.pixel_lo)

    def ticks(self) -> list[float]:
        if self.log:
            return _decade_ticks(self.lo, self.hi)
        return _nice_ticks(self.lo, self.hi)


def emit_svg(rows: Sequence[dict], spec: PlotSpec) -> str:
    """Render data rows as a standalone SVG document string."""
    if not rows:
        raise ValueError("need at least one data row to plot")
    xs = [float(r[spec.x_column]) for r in rows]
    series = {name: [float(r[name]) for r in rows] for name in spec.y_columns}

    x_axis = _Axis(xs, spec.log_x, MARGIN_LEFT, WIDTH - MARGIN_RIGHT)
    all_y = [v for vs in series.values() for v in vs]
    y_axis = _Axis(all_y, spec.log_y, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">'
        f"{escape(spec.title)}</text>",
    ]

    plot_bottom = HEIGHT - MARGIN_BOTTOM
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{plot_bottom}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{plot_bottom}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{plot_bottom}" stroke="black"/>'
    )

    for tick in x_axis.ticks():
        px = x_axis.to_pixel(tick)
        parts.append(
            f'<line x1="{px:.2f}" y1="{plot_bottom}" x2="{px:.2f}" '
            f'y2="{plot_bottom + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{plot_bottom + 18}" text-anchor="middle">'
            f"{_fmt(tick)}</text>"
        )
    for tick in y_axis.ticks():
        py = y_axis.to_pixel(tick)
        parts.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{py:.2f}" x2="{MARGIN_LEFT}" '
            f'y2="{py:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{py + 4:.2f}" text-anchor="end">'
            f"{_fmt(tick)}</text>"
        )

    parts.append(
        f'<text x="{(MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2:.1f}" y="{HEIGHT - 12}" '
        f'text-anchor="middle">{escape(spec.x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{(MARGIN_TOP + plot_bottom) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(MARGIN_TOP + plot_bottom) / 2:.1f})">'
        f"{escape(spec.y_label)}</text>"
    )

    for i, (name, ys) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(
            f"{x_axis.to_pixel(x):.2f},{y_axis.to_pixel(y):.2f}" for x, y in zip(xs, ys)
        )
        if len(xs) > 1:
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        for x, y in zip(xs, ys):
            parts.append(
                f'<circle cx="{x_axis.to_pixel(x):.2f}" cy="{y_axis.to_pixel(y):.2f}" '
                f'r="3" fill="{color}"/>'
            )
        legend_y = MARGIN_TOP + 16 * i
        parts.append(
            f'<line x1="{WIDTH - MARGIN_RIGHT - 150}" y1="{legend_y}" '
            f'x2="{WIDTH - MARGIN_RIGHT - 126}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN_RIGHT - 120}" y="{legend_y + 4}">'
            f"{escape(name)}</text>"
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
