"""Tiny deterministic SVG line-plot writer (no plotting dependency)."""

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 150, 40, 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v):
    return f"{v:.2f}"


def _tick_label(v, log):
    if log:
        e = round(math.log10(v))
        return f"1e{e}"
    return f"{v:.3g}"


def _ticks(lo, hi, log):
    if log:
        e0, e1 = math.floor(lo), math.ceil(hi)
        step = max(1, (e1 - e0) // 8)
        return [10.0**e for e in range(e0, e1 + 1, step)]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / 6
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out, v = [], start
    while v <= hi + 1e-12 * abs(step):
        out.append(v)
        v += step
    return out


def line_plot(series, title="", xlabel="", ylabel="", xlog=False, ylog=False):
    """Render ``series`` (list of ``(label, xs, ys)``) to an SVG string.

    Non-positive values are dropped from log axes.
    """
    tx = (lambda v: math.log10(v)) if xlog else float
    ty = (lambda v: math.log10(v)) if ylog else float
    pts = []
    for label, xs, ys in series:
        keep = [
            (tx(x), ty(y))
            for x, y in zip(xs, ys)
            if math.isfinite(x) and math.isfinite(y) and (x > 0 or not xlog) and (y > 0 or not ylog)
        ]
        pts.append((label, keep))
    allx = [p[0] for _, k in pts for p in k] or [0.0, 1.0]
    ally = [p[1] for _, k in pts for p in k] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(u):
        return MARGIN_L + (u - x0) / (x1 - x0) * pw

    def sy(u):
        return MARGIN_T + ph - (u - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="18" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(x0, x1, xlog):
        u = math.log10(t) if xlog else t
        if x0 - 1e-9 <= u <= x1 + 1e-9:
            out.append(f'<line x1="{_fmt(sx(u))}" y1="{MARGIN_T + ph}" x2="{_fmt(sx(u))}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{_fmt(sx(u))}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{_tick_label(t, xlog)}</text>')
    for t in _ticks(y0, y1, ylog):
        u = math.log10(t) if ylog else t
        if y0 - 1e-9 <= u <= y1 + 1e-9:
            out.append(f'<line x1="{MARGIN_L - 5}" y1="{_fmt(sy(u))}" x2="{MARGIN_L}" y2="{_fmt(sy(u))}" stroke="black"/>')
            out.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(sy(u) + 4)}" text-anchor="end">{_tick_label(t, ylog)}</text>')
    for i, (label, keep) in enumerate(pts):
        color = COLORS[i % len(COLORS)]
        if keep:
            path = " ".join(f"{_fmt(sx(u))},{_fmt(sy(v))}" for u, v in keep)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            for u, v in keep:
                out.append(f'<circle cx="{_fmt(sx(u))}" cy="{_fmt(sy(v))}" r="2.5" fill="{color}"/>')
        ly = MARGIN_T + 14 + 18 * i
        lx = MARGIN_L + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 25}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
