"""Self-contained SVG line plots.

The sweep figures are single polylines against the swept parameter, so a
hand-rolled SVG (axes, ticks, optional vertical threshold markers) keeps
the output dependency-free and byte-stable for diffing; no external
resource references of any kind.
"""

from __future__ import annotations

import math
from pathlib import Path

WIDTH = 800
HEIGHT = 500
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 25, 25, 50


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + i * (hi - lo) / (n - 1) for i in range(n)]


def line_plot_svg(
    xs: list[float],
    ys: list[float | None],
    xlabel: str,
    ylabel: str,
    markers: dict[str, float] | None = None,
) -> str:
    """Render one series as an SVG document string."""
    if not xs:
        raise ValueError("no points to plot")
    finite = [y for y in ys if y is not None and math.isfinite(y)]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if finite:
        y_lo, y_hi = min(finite), max(finite)
    else:
        y_lo, y_hi = 0.0, 1.0
    pad = 0.05 * (y_hi - y_lo) or max(0.1 * abs(y_hi), 1e-9)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'font-family="monospace" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        px = sx(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{HEIGHT - MARGIN_B}" x2="{_fmt(px)}" '
            f'y2="{HEIGHT - MARGIN_B + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{HEIGHT - MARGIN_B + 18}" '
            f'text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        py = sy(t)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt(py)}" x2="{MARGIN_L}" '
            f'y2="{_fmt(py)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(py + 4)}" '
            f'text-anchor="end">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_L + plot_w / 2}" y="{HEIGHT - 10}" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="15" y="{MARGIN_T + plot_h / 2}" text-anchor="middle" '
        f'transform="rotate(-90 15 {MARGIN_T + plot_h / 2})">{ylabel}</text>'
    )

    for label, value in (markers or {}).items():
        if not (x_lo <= value <= x_hi):
            continue
        px = sx(value)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{MARGIN_T}" x2="{_fmt(px)}" '
            f'y2="{HEIGHT - MARGIN_B}" stroke="gray" stroke-dasharray="4 3"/>'
        )
        parts.append(
            f'<text x="{_fmt(px + 3)}" y="{MARGIN_T + 12}" fill="gray" '
            f'font-size="10">{label}={_fmt(value)}</text>'
        )

    segment: list[str] = []
    for x, y in zip(xs, ys):
        if y is None or not math.isfinite(y):
            if len(segment) > 1:
                parts.append(
                    f'<polyline points="{" ".join(segment)}" fill="none" '
                    f'stroke="steelblue" stroke-width="1.5"/>'
                )
            segment = []
            continue
        segment.append(f"{_fmt(sx(x))},{_fmt(sy(y))}")
    if len(segment) > 1:
        parts.append(
            f'<polyline points="{" ".join(segment)}" fill="none" '
            f'stroke="steelblue" stroke-width="1.5"/>'
        )
    elif len(segment) == 1:
        parts.append(
            f'<circle cx="{segment[0].split(",")[0]}" cy="{segment[0].split(",")[1]}" '
            f'r="2" fill="steelblue"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_line_plot(
    path: str | Path,
    xs: list[float],
    ys: list[float | None],
    xlabel: str,
    ylabel: str,
    markers: dict[str, float] | None = None,
) -> None:
    Path(path).write_text(line_plot_svg(xs, ys, xlabel, ylabel, markers))
