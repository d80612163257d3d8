"""Deterministic SVG figures of leaf families."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CANVAS = 800
MARGIN = 40


@dataclass
class Figure:
    bounds: tuple = (-2.2, 2.2, -2.2, 2.2)
    stable: list = field(default_factory=list)     # polylines, dotted
    unstable: list = field(default_factory=list)   # polylines, solid
    highlights: list = field(default_factory=list)  # points
    locus: list = field(default_factory=list)      # polylines, highlighted
    annulus: bool = True
    title: str = ""

    @property
    def empty(self) -> bool:
        return not (self.stable or self.unstable)


def _xy(fig: Figure, pts):
    x0, x1, y0, y1 = fig.bounds
    pts = np.asarray(pts, dtype=float)
    span = CANVAS - 2 * MARGIN
    sx = MARGIN + (pts[:, 0] - x0) / (x1 - x0) * span
    sy = CANVAS - MARGIN - (pts[:, 1] - y0) / (y1 - y0) * span
    return sx, sy


def _clip(fig: Figure, pts):
    """Split a polyline into runs that stay inside the bounds."""
    x0, x1, y0, y1 = fig.bounds
    pts = np.asarray(pts, dtype=float)
    inside = ((pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
              & np.all(np.isfinite(pts), axis=1))
    runs, cur = [], []
    for p, ok in zip(pts, inside):
        if ok:
            cur.append(p)
        elif cur:
            runs.append(np.array(cur))
            cur = []
    if cur:
        runs.append(np.array(cur))
    return [r for r in runs if len(r) >= 2]


def _polyline(fig, pts, style) -> list[str]:
    out = []
    for run in _clip(fig, pts):
        sx, sy = _xy(fig, run)
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy))
        out.append(f'<polyline points="{coords}" {style}/>')
    return out


def render(fig: Figure) -> str:
    if fig.empty:
        raise ValueError("figure has no curve data")
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
             f'viewBox="0 0 {CANVAS} {CANVAS}">',
             f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>']
    if fig.title:
        lines.append(f'<text x="{MARGIN}" y="{MARGIN // 2 + 6}" font-family="monospace" '
                     f'font-size="14">{fig.title}</text>')
    if fig.annulus:
        x0, x1, _, _ = fig.bounds
        scale = (CANVAS - 2 * MARGIN) / (x1 - x0)
        cx, cy = _xy(fig, [[0.0, 0.0]])
        for rad, fill in ((2.0, "#f4f4f4"), (0.5, "white")):
            lines.append(f'<circle cx="{cx[0]:.2f}" cy="{cy[0]:.2f}" r="{rad * scale:.2f}" '
                         f'fill="{fill}" stroke="#888" stroke-width="1"/>')
    for pts in fig.stable:
        lines += _polyline(fig, pts, 'fill="none" stroke="#1f4e99" stroke-width="1" '
                                     'stroke-dasharray="2,4"')
    for pts in fig.unstable:
        lines += _polyline(fig, pts, 'fill="none" stroke="#222" stroke-width="1.2"')
    for pts in fig.locus:
        lines += _polyline(fig, pts, 'fill="none" stroke="#c0392b" stroke-width="2" '
                                     'stroke-opacity="0.6"')
    if fig.highlights:
        sx, sy = _xy(fig, fig.highlights)
        for a, b in zip(sx, sy):
            if MARGIN - 1 <= a <= CANVAS - MARGIN + 1 and MARGIN - 1 <= b <= CANVAS - MARGIN + 1:
                lines.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="#c0392b"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def inversion_figure(heights=None, circles=None) -> Figure:
    from .foliation import inversion_model

    heights = np.linspace(-1.9, 1.9, 20) if heights is None else heights
    circles = [c for c in np.linspace(-1.9, 1.9, 20) if abs(c) > 1e-9] if circles is None else circles
    fig = Figure(title="inversion model: lines and circles")
    xs = np.linspace(-2.0, 2.0, 401)
    for h in heights:
        pts = np.stack([xs, np.full_like(xs, h)], -1)
        n = np.linalg.norm(pts, axis=1)
        pts[(n < 0.5) | (n > 2.0)] = np.nan
        fig.stable.append(pts)
    for c in circles:
        for piece in inversion_model(float(c)):
            fig.unstable.append(piece.points(np.linspace(piece.x_lo, piece.x_hi, 200)))
        if abs(1 / c) <= 2.0:
            fig.highlights.append([0.0, 1.0 / c])
    fig.locus.append(np.array([[0.0, 0.5], [0.0, 2.0]]))
    fig.locus.append(np.array([[0.0, -2.0], [0.0, -0.5]]))
    return fig


def family_figure(kind: str, a_values=None, heights=None) -> Figure:
    """Polynomial leaf family against horizontal stable lines, drawn in the
    model's own (x, y) window."""
    from .foliation import family

    fam = family(kind)
    a_values = np.linspace(-1.5, 1.5, 13) if a_values is None else a_values
    xs = np.linspace(-2.0, 2.0, 401)
    ymax = 2.0 ** fam.r + 2.0 + fam.r ** 2 * 1.5
    fig = Figure(bounds=(-2.2, 2.2, -ymax, ymax), annulus=False,
                 title=f"{kind} model: p_a against stable lines")
    heights = np.linspace(-0.9 * ymax, 0.9 * ymax, 19) if heights is None else heights
    for h in heights:
        fig.stable.append(np.stack([xs, np.full_like(xs, h)], -1))
    for a in a_values:
        ys = np.polynomial.polynomial.polyval(xs, fam.coeffs(float(a)))
        fig.unstable.append(np.stack([xs, ys], -1))
        if abs(abs(a) - 1.0) < 1e-12:
            fig.highlights.append([0.0, float(np.polynomial.polynomial.polyval(0.0, fam.coeffs(float(a))))])
    return fig
