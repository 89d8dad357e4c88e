"""Minimal, deterministic SVG figures: line plot, heatmap, unit-circle scatter."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_plot", "heatmap", "eigenvalue_plot"]

WIDTH, HEIGHT = 640, 420
MARGIN = 56


def _f(v: float) -> str:
    return f"{v:.3f}"


def _open(width: int, height: int, title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


def _axis_labels(parts: list[str], xlabel: str, ylabel: str, width: int, height: int) -> None:
    parts.append(f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(
        f'<text x="16" y="{height / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {height / 2:.1f})">{escape(ylabel)}</text>'
    )


def line_plot(xs, ys, title: str = "", xlabel: str = "k", ylabel: str = "r", ylim=(0.0, 1.0)) -> str:
    """Polyline of `ys` against `xs` with a fixed y range."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    parts = _open(WIDTH, HEIGHT, title)
    x0, x1 = MARGIN, WIDTH - 20
    y0, y1 = HEIGHT - MARGIN, 36
    lo, hi = float(xs.min()), float(xs.max())
    span = hi - lo or 1.0
    ylo, yhi = ylim

    def px(x):
        return x0 + (x - lo) / span * (x1 - x0)

    def py(y):
        return y0 - (min(max(y, ylo), yhi) - ylo) / (yhi - ylo) * (y0 - y1)

    parts.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        yv = ylo + frac * (yhi - ylo)
        parts.append(f'<text x="{x0 - 6}" y="{_f(py(yv) + 4)}" text-anchor="end">{yv:g}</text>')
    for xv in np.linspace(lo, hi, 6):
        parts.append(f'<text x="{_f(px(xv))}" y="{y0 + 16}" text-anchor="middle">{xv:.0f}</text>')
    points = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(xs, ys) if np.isfinite(y))
    parts.append(f'<polyline points="{points}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>')
    for x, y in zip(xs, ys):
        if np.isfinite(y):
            parts.append(f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="2" fill="#1f4e9c"/>')
    _axis_labels(parts, xlabel, ylabel, WIDTH, HEIGHT)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _gray(v: float) -> str:
    level = int(round(255 * min(max(v, 0.0), 1.0)))
    return f"#{level:02x}{level:02x}{level:02x}"


def heatmap(values, title: str = "", xlabel: str = "window size k", ylabel: str = "start l") -> str:
    """One rectangle per present cell; value 0 is black, 1 is white, NaN cells are omitted."""
    values = np.asarray(values, dtype=float)
    rows, cols = values.shape
    cell_w = max(2.0, min(12.0, (WIDTH - MARGIN - 20) / cols))
    cell_h = max(2.0, min(12.0, (HEIGHT - MARGIN - 36) / rows))
    width = int(MARGIN + cols * cell_w + 20)
    height = int(36 + rows * cell_h + MARGIN)
    parts = _open(width, height, title)
    for i in range(rows):
        for j in range(cols):
            v = values[i, j]
            if np.isnan(v):
                continue
            parts.append(
                f'<rect x="{_f(MARGIN + j * cell_w)}" y="{_f(36 + i * cell_h)}" '
                f'width="{_f(cell_w)}" height="{_f(cell_h)}" fill="{_gray(v)}"/>'
            )
    parts.append(
        f'<rect x="{MARGIN}" y="36" width="{_f(cols * cell_w)}" height="{_f(rows * cell_h)}" '
        'fill="none" stroke="black"/>'
    )
    for j in range(0, cols, max(1, cols // 8)):
        parts.append(
            f'<text x="{_f(MARGIN + (j + 0.5) * cell_w)}" y="{_f(36 + rows * cell_h + 14)}" '
            f'text-anchor="middle">{j + 1}</text>'
        )
    for i in range(0, rows, max(1, rows // 8)):
        parts.append(f'<text x="{MARGIN - 4}" y="{_f(36 + (i + 0.8) * cell_h)}" text-anchor="end">{i + 1}</text>')
    _axis_labels(parts, xlabel, ylabel, width, height)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def eigenvalue_plot(eigenvalues, title: str = "") -> str:
    """Eigenvalues scattered over the unit circle in the complex plane."""
    eig = np.asarray(eigenvalues, dtype=complex)
    size = 440
    parts = _open(size, size, title)
    c = size / 2
    extent = max(1.2, float(np.max(np.abs(eig))) * 1.1 if eig.size else 1.2)
    scale = (size / 2 - 40) / extent

    parts.append(f'<line x1="20" y1="{_f(c)}" x2="{size - 20}" y2="{_f(c)}" stroke="#999"/>')
    parts.append(f'<line x1="{_f(c)}" y1="36" x2="{_f(c)}" y2="{size - 20}" stroke="#999"/>')
    parts.append(f'<circle cx="{_f(c)}" cy="{_f(c)}" r="{_f(scale)}" fill="none" stroke="black" stroke-dasharray="4 3"/>')
    for lam in eig:
        parts.append(
            f'<circle cx="{_f(c + scale * lam.real)}" cy="{_f(c - scale * lam.imag)}" r="3.5" '
            'fill="#c0392b" fill-opacity="0.8"/>'
        )
    parts.append(f'<text x="{size - 22}" y="{_f(c - 6)}" text-anchor="end">Re</text>')
    parts.append(f'<text x="{_f(c + 6)}" y="48">Im</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
