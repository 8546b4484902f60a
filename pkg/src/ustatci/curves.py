"""Bound-comparison curves: half-width as a function of n, written as CSV and SVG."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .errors import PreconditionError
from .methods import Stats, interval

LABELS = {
    "mean_improved_hoeffding_1": "Improved Hoeffding 1",
    "mean_improved_hoeffding_2": "Improved Hoeffding 2",
    "mean_audibert": "Audibert",
    "mean_maurer": "Maurer",
}
FIGURE_METHODS = tuple(LABELS)
FIGURE_GRID = ((0.05, 0.01), (0.05, 0.1), (0.25, 0.01), (0.25, 0.1))
DEFAULT_N = tuple(range(4, 1001, 2))

CSV_COLUMNS = ("panel", "s2", "delta", "n", "method", "log_half_width")

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")


@dataclass(frozen=True)
class CurveSpec:
    """One panel: half-widths of ``methods`` over ``n_range`` at fixed S_n^2 and delta.

    For U-statistic methods the plug-in W_n is ``s2`` and the kernel order is ``m``.
    """

    methods: tuple = FIGURE_METHODS
    n_range: tuple = DEFAULT_N
    s2: float = 0.05
    delta: float = 0.1
    scale: str = "log"
    m: int = 1
    side: str | None = None
    floor_free: bool = False
    as_printed: bool = False
    title: str = ""

    def __post_init__(self):
        if self.scale not in ("log", "linear"):
            raise PreconditionError(f"scale must be 'log' or 'linear', got {self.scale!r}")
        if not self.methods:
            raise PreconditionError("need at least one method")


@dataclass
class Curve:
    method: str
    points: list = field(default_factory=list)   # (n, value)
    gaps: list = field(default_factory=list)     # n values the method cannot handle


def half_width(method: str, n: int, s2: float, delta: float, m: int = 1, side=None,
               floor_free=False, as_printed=False) -> float:
    """Half-width of ``method`` at plug-in variance ``s2``; the center plays no part."""
    stats = Stats(n=n, m=m, u=0.5, w=s2, xbar=0.5, s2=s2)
    return interval(method, stats, delta, side, floor_free, as_printed).half_width


def compute_curves(spec: CurveSpec) -> list[Curve]:
    curves = []
    for method in spec.methods:
        curve = Curve(method)
        for n in spec.n_range:
            try:
                hw = half_width(method, n, spec.s2, spec.delta, spec.m, spec.side,
                                spec.floor_free, spec.as_printed)
            except PreconditionError:
                curve.gaps.append(n)
                continue
            curve.points.append((n, math.log(hw) if spec.scale == "log" else hw))
        curves.append(curve)
    return curves


def figure_panels(n_range=DEFAULT_N, methods=FIGURE_METHODS, scale="log", **kw) -> list[CurveSpec]:
    """The 2 x 2 grid S_n^2 in {0.05, 0.25} by delta in {0.01, 0.1}, panels A-D."""
    return [
        CurveSpec(methods=tuple(methods), n_range=tuple(n_range), s2=s2, delta=d, scale=scale,
                  title=f"{chr(65 + i)}: S_n^2 = {s2:g}, delta = {d:g}", **kw)
        for i, (s2, d) in enumerate(FIGURE_GRID)
    ]


def write_csv(panels, handle):
    value_col = "log_half_width" if all(p.scale == "log" for p in panels) else "value"
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS[:-1] + (value_col,))
    for i, spec in enumerate(panels):
        label = chr(65 + i)
        for curve in compute_curves(spec):
            for n, v in curve.points:
                writer.writerow([label, repr(spec.s2), repr(spec.delta), n, curve.method, repr(v)])


# -- SVG ------------------------------------------------------------------------

WIDTH, HEIGHT = 960, 720


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _panel(spec: CurveSpec, curves, x0, y0, w, h) -> list[str]:
    pad_l, pad_r, pad_t, pad_b = 56, 12, 28, 40
    px0, py0 = x0 + pad_l, y0 + pad_t
    pw, ph = w - pad_l - pad_r, h - pad_t - pad_b
    pts = [p for c in curves for p in c.points]
    out = [f'<g class="panel">',
           f'<text x="{x0 + w / 2:.1f}" y="{y0 + 18}" text-anchor="middle" '
           f'font-size="14">{escape(spec.title)}</text>',
           f'<rect x="{px0}" y="{py0}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>']
    if not pts:
        out.append("</g>")
        return out
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xhi = xlo + 1
    if yhi == ylo:
        yhi = ylo + 1

    def sx(v):
        return px0 + (v - xlo) / (xhi - xlo) * pw

    def sy(v):
        return py0 + ph - (v - ylo) / (yhi - ylo) * ph

    for t in _nice_ticks(xlo, xhi):
        out.append(f'<line x1="{sx(t):.2f}" y1="{py0 + ph}" x2="{sx(t):.2f}" y2="{py0 + ph + 4}" '
                   f'stroke="#333"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{py0 + ph + 16}" text-anchor="middle" '
                   f'font-size="10">{_fmt(t)}</text>')
    for t in _nice_ticks(ylo, yhi):
        out.append(f'<line x1="{px0 - 4}" y1="{sy(t):.2f}" x2="{px0}" y2="{sy(t):.2f}" '
                   f'stroke="#333"/>')
        out.append(f'<text x="{px0 - 6}" y="{sy(t) + 3:.2f}" text-anchor="end" '
                   f'font-size="10">{_fmt(t)}</text>')
    out.append(f'<text x="{px0 + pw / 2:.1f}" y="{py0 + ph + 32}" text-anchor="middle" '
               f'font-size="11">n</text>')
    ylabel = "log half-width" if spec.scale == "log" else "half-width"
    out.append(f'<text x="{x0 + 14}" y="{py0 + ph / 2:.1f}" text-anchor="middle" font-size="11" '
               f'transform="rotate(-90 {x0 + 14} {py0 + ph / 2:.1f})">{ylabel}</text>')
    for i, c in enumerate(curves):
        if not c.points:
            continue
        color = COLORS[i % len(COLORS)]
        path = " ".join(f"{sx(n):.2f},{sy(v):.2f}" for n, v in c.points)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'data-method="{c.method}" points="{path}"/>')
        ly = py0 + 14 + 14 * i
        out.append(f'<line x1="{px0 + pw - 150}" y1="{ly - 4}" x2="{px0 + pw - 130}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{px0 + pw - 125}" y="{ly}" font-size="10">'
                   f'{escape(LABELS.get(c.method, c.method))}</text>')
    out.append("</g>")
    return out


def render_svg(panels) -> str:
    """A self-contained SVG: up to four panels on a 2 x 2 layout, one polyline per series."""
    if not 1 <= len(panels) <= 4:
        raise PreconditionError("an SVG holds between one and four panels")
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
             f'width="{WIDTH}" height="{HEIGHT}">',
             f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    cw, ch = WIDTH / 2, HEIGHT / 2
    for i, spec in enumerate(panels):
        x0, y0 = (i % 2) * cw, (i // 2) * ch
        lines.extend(_panel(spec, compute_curves(spec), x0, y0, cw, ch))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
