"""Minimal self-contained SVG 1.1 plots: line charts (optionally log-y) and planar sets."""

import math
from xml.sax.saxutils import escape

import numpy as np

from .sets import OuterSet, normalize_directions

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=170, top=40, bottom=50)
PALETTE = ("#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b")


def _fmt(v):
    return f"{v:.2f}"


def _header(title):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


class _Frame:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def points(self, xs, ys):
        return " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys))


def _ticks(lo, hi, count=6):
    if hi <= lo:
        return [lo]
    return list(np.linspace(lo, hi, count))


def _axes(frame, xticks, yticks, xlabel, ylabel, ylabels=None):
    out = [f'<rect x="{frame.left}" y="{frame.top}" width="{frame.right - frame.left}" '
           f'height="{frame.bottom - frame.top}" fill="none" stroke="black"/>']
    for t in xticks:
        x = frame.px(t)
        out.append(f'<line x1="{_fmt(x)}" y1="{frame.bottom}" x2="{_fmt(x)}" y2="{frame.bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{frame.bottom + 18}" text-anchor="middle">{t:g}</text>')
    for i, t in enumerate(yticks):
        y = frame.py(t)
        label = ylabels[i] if ylabels else f"{t:.3g}"
        out.append(f'<line x1="{frame.left - 5}" y1="{_fmt(y)}" x2="{frame.left}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<line x1="{frame.left}" y1="{_fmt(y)}" x2="{frame.right}" y2="{_fmt(y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{frame.left - 8}" y="{_fmt(y + 4)}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{(frame.left + frame.right) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{(frame.top + frame.bottom) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(frame.top + frame.bottom) / 2:.1f})">{escape(ylabel)}</text>')
    return out


def _legend(entries):
    out = []
    x = WIDTH - MARGIN["right"] + 12
    for i, (label, color, dashed) in enumerate(entries):
        y = MARGIN["top"] + 14 + 18 * i
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 24}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{x + 30}" y="{y + 4}">{escape(label)}</text>')
    return out


def line_plot(curves, title, xlabel, ylabel, log_y=True):
    """``curves`` is a list of ``(label, xs, ys, dashed)``; nonpositive values are dropped on log axes."""
    prepared = []
    for label, xs, ys, dashed in curves:
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        if log_y:
            keep = ys > 0
            xs, ys = xs[keep], np.log10(ys[keep])
        prepared.append((label, xs, ys, dashed))
    all_x = np.concatenate([c[1] for c in prepared if c[1].size] or [np.array([0.0, 1.0])])
    all_y = np.concatenate([c[2] for c in prepared if c[2].size] or [np.array([0.0, 1.0])])
    xlim = (float(all_x.min()), float(all_x.max()) if all_x.max() > all_x.min() else float(all_x.min()) + 1)
    if log_y:
        ylim = (math.floor(all_y.min()), math.ceil(all_y.max()))
        if ylim[1] == ylim[0]:
            ylim = (ylim[0], ylim[0] + 1)
        step = max(1, (ylim[1] - ylim[0]) // 8)
        yticks = list(range(ylim[0], ylim[1] + 1, step))
        ylabels = [f"1e{t}" for t in yticks]
    else:
        pad = 0.05 * (all_y.max() - all_y.min() or 1.0)
        ylim = (float(all_y.min() - pad), float(all_y.max() + pad))
        yticks, ylabels = _ticks(*ylim), None
    frame = _Frame(xlim, ylim)
    out = _header(title)
    out += _axes(frame, _ticks(*xlim), yticks, xlabel, ylabel, ylabels)
    legend = []
    for i, (label, xs, ys, dashed) in enumerate(prepared):
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{frame.points(xs, ys)}"/>')
        legend.append((label, color, dashed))
    out += _legend(legend)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def planar_plot(shapes, title, xlabel="x1", ylabel="x2", equal_aspect=True):
    """``shapes`` is a list of ``(label, points, color, closed, dashed)`` with ``points`` of shape ``(k, 2)``."""
    pts = np.vstack([np.asarray(s[1], float) for s in shapes])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    if equal_aspect:
        # Keep unit aspect inside the fixed plotting area.
        w = WIDTH - MARGIN["left"] - MARGIN["right"]
        h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
        scale = max(span[0] / w, span[1] / h)
        mid = 0.5 * (lo + hi)
        lo = mid - 0.5 * scale * np.array([w, h])
        hi = mid + 0.5 * scale * np.array([w, h])
    pad = 0.04 * (hi - lo)
    frame = _Frame((lo[0] - pad[0], hi[0] + pad[0]), (lo[1] - pad[1], hi[1] + pad[1]))
    out = _header(title)
    out += _axes(frame, _ticks(frame.x0, frame.x1), _ticks(frame.y0, frame.y1), xlabel, ylabel)
    legend, seen = [], set()
    for label, points, color, closed, dashed in shapes:
        points = np.asarray(points, float)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        tag = "polygon" if closed else "polyline"
        out.append(f'<{tag} fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                   f'points="{frame.points(points[:, 0], points[:, 1])}"/>')
        if label and label not in seen:
            legend.append((label, color, dashed))
            seen.add(label)
    out += _legend(legend)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def boundary_points(s, count=180):
    """Boundary of a planar zonotope/outer set traced through support maximizers."""
    theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    u = np.column_stack((np.cos(theta), np.sin(theta)))
    core = s.core if isinstance(s, OuterSet) else s
    signs = np.sign(u @ core.generators)
    pts = core.center + signs @ core.generators.T
    if isinstance(s, OuterSet) and s.pad.radius > 0:
        un = normalize_directions(u, s.pad.norm)
        pts = pts + s.pad.radius * (un @ s.pad.norm.p_inverse)
    return pts


def box_points(box):
    lo, hi = box.lower, box.upper
    return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
