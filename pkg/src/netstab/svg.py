"""Minimal SVG line charts written as plain text."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]
DASHES = ["", "6,3", "2,2", "8,3,2,3"]
MAX_POINTS = 1500


def _nice_ticks(lo, hi, count=5):
    if not np.isfinite(lo) or not np.isfinite(hi):
        return [0.0]
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(start, hi + 0.5 * step, step) if lo - 1e-12 <= v <= hi + 1e-12]


def _thin(x, y):
    if len(x) <= MAX_POINTS:
        return x, y
    idx = np.unique(np.linspace(0, len(x) - 1, MAX_POINTS).astype(int))
    return x[idx], y[idx]


def _fmt(v):
    return f"{v:.4g}"


def line_plot(series, title="", xlabel="t", ylabel="", width=640, height=400) -> str:
    """One polyline per ``(x, y, label)`` entry, with axes and tick labels."""
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs = np.concatenate([np.asarray(s[0], float) for s in series]) if series else np.zeros(1)
    ys = np.concatenate([np.asarray(s[1], float) for s in series]) if series else np.zeros(1)
    ys = ys[np.isfinite(ys)]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 - y0 < 1e-300:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for v in _nice_ticks(x0, x1):
        out.append(f'<line x1="{px(v):.2f}" y1="{top + ph}" x2="{px(v):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(v):.2f}" y="{top + ph + 18}" text-anchor="middle">{_fmt(v)}</text>')
    for v in _nice_ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{py(v):.2f}" x2="{left}" y2="{py(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(v) + 4:.2f}" text-anchor="end">{_fmt(v)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 15 {top + ph / 2})">{escape(ylabel)}</text>')
    for k, (x, y, label) in enumerate(series):
        x, y = _thin(np.asarray(x, float), np.asarray(y, float))
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y) if np.isfinite(b))
        dash = DASHES[k % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{PALETTE[k % len(PALETTE)]}" stroke-width="1.2"{dash_attr} '
                   f'points="{pts}"><title>{escape(str(label))}</title></polyline>')
    for k, (_, _, label) in enumerate(series):
        ly = top + 12 + 14 * k
        out.append(f'<line x1="{left + pw - 80}" y1="{ly}" x2="{left + pw - 60}" y2="{ly}" '
                   f'stroke="{PALETTE[k % len(PALETTE)]}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 55}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def projection_plot(paths, labels=None, title="", width=480, height=480) -> str:
    """Isometric projection of 3-D paths, one polyline per path."""
    c30, s30 = np.cos(np.pi / 6), np.sin(np.pi / 6)
    flat = []
    for p in paths:
        p = np.asarray(p, float)
        flat.append(np.stack([(p[:, 0] - p[:, 1]) * c30, -(p[:, 0] + p[:, 1]) * s30 + p[:, 2]], axis=1))
    series = [(f[:, 0], f[:, 1], (labels or [f"node {k + 1}" for k in range(len(flat))])[k])
              for k, f in enumerate(flat)]
    return line_plot(series, title=title, xlabel="(x1 - x2) cos 30", ylabel="x3 - (x1 + x2) sin 30",
                     width=width, height=height)
