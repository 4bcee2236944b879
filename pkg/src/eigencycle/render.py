"""Small dependency-free SVG figures.

Colour rule shared by every figure: positive (counterclockwise) values are
drawn red, negative (clockwise) values blue, zeros grey.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .spectral import EigencycleSet, EigenPair, eigencycle_set, subspace_pairs

RED = "#c0392b"
BLUE = "#2563eb"
GREY = "#6b7280"

PLOT_KINDS = ("lissajous_matrix", "regression_scatter", "accumulated_L")


@dataclass(frozen=True)
class PlotSpec:
    kind: str = "lissajous_matrix"
    cell: int = 90  # px per panel (lissajous) or plot width/8 (others)
    zero_tol: float = 1e-12

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"kind must be one of {PLOT_KINDS}")


def sign_color(v: float, tol: float = 1e-12) -> str:
    if v > tol:
        return RED
    if v < -tol:
        return BLUE
    return GREY


def _svg(width: float, height: float, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}" font-family="sans-serif">'
    )
    return "\n".join([head, f'<rect width="{width:g}" height="{height:g}" fill="white"/>', *body, "</svg>"]) + "\n"


def _text(x, y, s, size=10, anchor="middle", fill="black") -> str:
    return (f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" text-anchor="{anchor}" '
            f'fill="{fill}">{escape(str(s))}</text>')


def _arrow_head(x, y, dx, dy, color, size=6.0) -> str:
    n = np.hypot(dx, dy) or 1.0
    ux, uy = dx / n, dy / n
    px, py = -uy, ux
    pts = [(x, y), (x - size * ux + 0.5 * size * px, y - size * uy + 0.5 * size * py),
           (x - size * ux - 0.5 * size * px, y - size * uy - 0.5 * size * py)]
    return f'<polygon class="arrow" points="{" ".join(f"{a:.2f},{b:.2f}" for a, b in pts)}" fill="{color}"/>'


def render_lissajous(source: EigencycleSet | EigenPair, spec: PlotSpec = PlotSpec(), title: str = "") -> str:
    """Upper-triangle matrix of 2-D projections, one panel per subspace.

    With an EigenPair each panel draws the ellipse traced by ``Re(xi e^{i t})``
    in that subspace; with only an eigencycle set a circle of area
    proportional to ``|sigma|`` stands in. The arrow runs counterclockwise for
    positive sigma and clockwise for negative; sigma = 0 is drawn as a dot.
    """
    xi = source.xi if isinstance(source, EigenPair) else None
    eset = eigencycle_set(source) if isinstance(source, EigenPair) else source
    s = eset.dim
    c = spec.cell
    top = 30 if title else 10
    width, height = s * c + 10, (s - 1) * c + top + 10
    body = [_text(width / 2, 20, title, 14)] if title else []
    smax = float(np.abs(eset.values).max()) or 1.0
    amax = float(np.abs(xi).max()) if xi is not None and np.abs(xi).max() > 0 else 1.0
    theta = np.linspace(0, 2 * np.pi, 73)
    for m, n in subspace_pairs(s):
        x0, y0 = 5 + (n - 1) * c, top + (m - 1) * c
        cx, cy, r = x0 + c / 2, y0 + c / 2 - 6, c * 0.33
        sigma = eset.value(m, n)
        color = sign_color(sigma, spec.zero_tol)
        body.append(f'<g class="panel" data-pair="{m}{n}">')
        body.append(f'<rect x="{x0 + 2}" y="{y0 + 2}" width="{c - 4}" height="{c - 4}" fill="none" stroke="#d1d5db"/>')
        body.append(_text(x0 + 8, y0 + 13, f"{m}{n}", 9, "start", GREY))
        if abs(sigma) <= spec.zero_tol:
            body.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="2.5" fill="{GREY}"/>')
        else:
            if xi is not None:
                px = np.real(xi[m - 1] * np.exp(1j * theta)) / amax * r
                py = np.real(xi[n - 1] * np.exp(1j * theta)) / amax * r
            else:
                rad = r * np.sqrt(abs(sigma) / smax)
                px, py = rad * np.cos(theta), rad * np.sin(theta)
            # orient the polyline so that traversal order matches the sign
            area = np.sum(px[:-1] * py[1:] - px[1:] * py[:-1])
            if (area > 0) != (sigma > 0):
                px, py = px[::-1], py[::-1]
            sx, sy = cx + px, cy - py  # SVG y grows downwards
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy))
            body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            k = len(sx) // 4
            body.append(_arrow_head(sx[k], sy[k], sx[k] - sx[k - 1], sy[k] - sy[k - 1], color))
        body.append(_text(cx, y0 + c - 8, f"{sigma:.4f}", 9, fill=color))
        body.append("</g>")
    for m in range(1, s):
        body.append(_text(5 + (m - 1) * c + c / 2, top + (m - 1) * c + c / 2, f"x{m}", 11, fill=GREY))
    return _svg(width, height, body)


def _axes(x0, y0, w, h, xr, yr, xlabel, ylabel):
    out = [f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="black"/>']
    out.append(_text(x0 + w / 2, y0 + h + 32, xlabel, 11))
    out.append(f'<text x="{x0 - 40}" y="{y0 + h / 2}" font-size="11" text-anchor="middle" '
               f'transform="rotate(-90 {x0 - 40} {y0 + h / 2})">{escape(ylabel)}</text>')
    for v, fx in ((xr[0], 0), (xr[1], 1)):
        out.append(_text(x0 + fx * w, y0 + h + 14, f"{v:.3g}", 9))
    for v, fy in ((yr[0], 1), (yr[1], 0)):
        out.append(_text(x0 - 4, y0 + fy * h + 3, f"{v:.3g}", 9, "end"))
    return out


def _range(v) -> tuple[float, float]:
    lo, hi = float(np.min(v)), float(np.max(v))
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    return lo - pad, hi + pad


def render_regression_scatter(x, y, slope: float | None = None, intercept: float = 0.0,
                              labels: Sequence[str] | None = None, xlabel: str = "sigma",
                              ylabel: str = "L", spec: PlotSpec = PlotSpec("regression_scatter")) -> str:
    """Scatter of ``y`` against ``x`` with an optional fitted line."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w, h = 8 * spec.cell, 5 * spec.cell
    x0, y0 = 60, 20
    xr, yr = _range(x), _range(y)

    def px(v):
        return x0 + (v - xr[0]) / (xr[1] - xr[0]) * w

    def py(v):
        return y0 + h - (v - yr[0]) / (yr[1] - yr[0]) * h

    body = _axes(x0, y0, w, h, xr, yr, xlabel, ylabel)
    if slope is not None:
        body.append(f'<line x1="{px(xr[0]):.1f}" y1="{py(intercept + slope * xr[0]):.1f}" '
                    f'x2="{px(xr[1]):.1f}" y2="{py(intercept + slope * xr[1]):.1f}" stroke="black" stroke-dasharray="4 3"/>')
    for i, (a, b) in enumerate(zip(x, y)):
        body.append(f'<circle cx="{px(a):.1f}" cy="{py(b):.1f}" r="3.5" fill="{sign_color(b)}"/>')
        if labels is not None:
            body.append(_text(px(a) + 5, py(b) - 5, labels[i], 8, "start", GREY))
    return _svg(w + x0 + 20, h + y0 + 45, body)


def render_accumulated(values, xlabel: str = "transition", ylabel: str = "accumulated L",
                       spec: PlotSpec = PlotSpec("accumulated_L")) -> str:
    """Running sum of angular momentum; the line colour follows the final sign."""
    v = np.asarray(values, dtype=float)
    w, h = 8 * spec.cell, 4 * spec.cell
    x0, y0 = 60, 20
    xr, yr = (0.0, float(max(1, len(v) - 1))), _range(np.concatenate([v, [0.0]]))
    step = max(1, len(v) // 2000)
    idx = np.arange(0, len(v), step)
    xs = x0 + idx / xr[1] * w
    ys = y0 + h - (v[idx] - yr[0]) / (yr[1] - yr[0]) * h
    body = _axes(x0, y0, w, h, xr, yr, xlabel, ylabel)
    zy = y0 + h - (0 - yr[0]) / (yr[1] - yr[0]) * h
    body.append(f'<line x1="{x0}" y1="{zy:.1f}" x2="{x0 + w}" y2="{zy:.1f}" stroke="{GREY}" stroke-dasharray="2 2"/>')
    pts = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(xs, ys))
    body.append(f'<polyline points="{pts}" fill="none" stroke="{sign_color(v[-1] if len(v) else 0)}" stroke-width="1.2"/>')
    return _svg(w + x0 + 20, h + y0 + 45, body)
