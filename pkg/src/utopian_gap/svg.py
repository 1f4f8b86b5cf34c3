"""Minimal SVG charts: line charts with bands, and stacked bars."""

from __future__ import annotations

from html import escape

import numpy as np

WIDTH, HEIGHT = 800, 500
MARGIN = dict(left=70, right=170, top=40, bottom=60)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22", "#17becf")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi == xlo:
            xhi = xlo + 1
        if yhi == ylo:
            yhi = ylo + 1
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.x0, self.x1 = MARGIN["left"], WIDTH - MARGIN["right"]
        self.y0, self.y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def x(self, v):
        return self.x0 + (v - self.xlo) / (self.xhi - self.xlo) * (self.x1 - self.x0)

    def y(self, v):
        return self.y0 + (v - self.ylo) / (self.yhi - self.ylo) * (self.y1 - self.y0)


def _axes(frame, title, xlabel, ylabel, xticks, nyticks=5):
    out = [
        f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{frame.x0}" y1="{frame.y0}" x2="{frame.x1}" y2="{frame.y0}" stroke="black"/>',
        f'<line x1="{frame.x0}" y1="{frame.y0}" x2="{frame.x0}" y2="{frame.y1}" stroke="black"/>',
        f'<text x="{(frame.x0 + frame.x1) / 2}" y="{HEIGHT - 15}" text-anchor="middle" '
        f'font-size="13">{escape(xlabel)}</text>',
        f'<text x="18" y="{(frame.y0 + frame.y1) / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {(frame.y0 + frame.y1) / 2})">{escape(ylabel)}</text>',
    ]
    for t in xticks:
        px = _fmt(frame.x(t))
        out.append(f'<line x1="{px}" y1="{frame.y0}" x2="{px}" y2="{frame.y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{px}" y="{frame.y0 + 20}" text-anchor="middle" font-size="11">'
                   f'{t:g}</text>')
    for v in np.linspace(frame.ylo, frame.yhi, nyticks):
        py = _fmt(frame.y(v))
        out.append(f'<line x1="{frame.x0 - 5}" y1="{py}" x2="{frame.x0}" y2="{py}" stroke="black"/>')
        out.append(f'<text x="{frame.x0 - 8}" y="{py}" text-anchor="end" font-size="11" '
                   f'dominant-baseline="middle">{v:.3g}</text>')
    return out


def _legend(labels):
    out = []
    for k, label in enumerate(labels):
        y = MARGIN["top"] + 10 + 20 * k
        x = WIDTH - MARGIN["right"] + 15
        colour = PALETTE[k % len(PALETTE)]
        out.append(f'<rect x="{x}" y="{y - 6}" width="14" height="10" fill="{colour}"/>')
        out.append(f'<text x="{x + 20}" y="{y + 3}" font-size="12">{escape(str(label))}</text>')
    return out


def _document(body):
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif">',
        '<rect width="100%" height="100%" fill="white"/>',
        *body,
        "</svg>",
        "",
    ])


def line_chart(series: dict, title: str, xlabel: str, ylabel: str) -> str:
    """``series`` maps a label to ``(x, mean, spread)``; spread draws a band."""
    xs = np.concatenate([np.asarray(x, float) for x, _, _ in series.values()])
    lo = min(float(np.min(np.asarray(m) - np.asarray(sp))) for _, m, sp in series.values())
    hi = max(float(np.max(np.asarray(m) + np.asarray(sp))) for _, m, sp in series.values())
    frame = _Frame(float(xs.min()), float(xs.max()), min(0.0, lo), hi)
    body = _axes(frame, title, xlabel, ylabel, sorted(set(xs.tolist())))
    for k, (x, mean, spread) in enumerate(series.values()):
        colour = PALETTE[k % len(PALETTE)]
        x, mean, spread = (np.asarray(a, float) for a in (x, mean, spread))
        upper = [f"{_fmt(frame.x(a))},{_fmt(frame.y(b))}" for a, b in zip(x, mean + spread)]
        lower = [f"{_fmt(frame.x(a))},{_fmt(frame.y(b))}" for a, b in zip(x, mean - spread)]
        body.append(f'<polygon points="{" ".join(upper + lower[::-1])}" fill="{colour}" '
                    f'fill-opacity="0.15" stroke="none"/>')
        pts = " ".join(f"{_fmt(frame.x(a))},{_fmt(frame.y(b))}" for a, b in zip(x, mean))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="2"/>')
    body += _legend(series.keys())
    return _document(body)


def stacked_bars(panels: dict, categories, title: str, xlabel: str, ylabel: str) -> str:
    """``panels`` maps a label to ``(steps, fractions)`` with ``fractions[step][cat]``.

    Panels are laid side by side, one bar per step, stacked by category.
    """
    labels = list(panels)
    steps_max = max(len(steps) for steps, _ in panels.values())
    slots = len(labels) * (steps_max + 1)
    frame = _Frame(0, slots, 0.0, 1.0)
    body = _axes(frame, title, xlabel, ylabel, [])
    bar_w = (frame.x1 - frame.x0) / slots
    for p, label in enumerate(labels):
        steps, fractions = panels[label]
        left = p * (steps_max + 1)
        body.append(f'<text x="{_fmt(frame.x(left + len(steps) / 2))}" y="{frame.y0 + 20}" '
                    f'text-anchor="middle" font-size="11">{escape(label)}</text>')
        for b, row in enumerate(fractions):
            bottom = 0.0
            for c, frac in enumerate(row):
                if frac <= 0:
                    continue
                y_top = frame.y(bottom + frac)
                height = frame.y(bottom) - y_top
                colour = PALETTE[c % len(PALETTE)]
                body.append(f'<rect x="{_fmt(frame.x(left + b))}" y="{_fmt(y_top)}" '
                            f'width="{_fmt(bar_w * 0.9)}" height="{_fmt(height)}" '
                            f'fill="{colour}"/>')
                bottom += frac
    body += _legend([f"size {c}" for c in categories])
    return _document(body)


def empty_chart(title: str) -> str:
    return _document([f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="16">'
                      f'{escape(title)} (no data)</text>'])
