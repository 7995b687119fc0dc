"""Trace CSV files and standalone SVG line charts."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .simkit import TRACE_COLUMNS, SimTrace

__all__ = ["format_value", "write_trace_csv", "read_trace_csv", "trace_csv_text", "svg_line_chart"]


def format_value(v: float) -> str:
    return f"{v:.12g}"


def trace_csv_text(columns: dict[str, np.ndarray], names: Sequence[str] = TRACE_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    for row in data:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_trace_csv(trace: SimTrace | dict, path: str | Path, names: Sequence[str] = TRACE_COLUMNS) -> Path:
    """Write ``t,x,x_d,x_e,xe_tilde,u`` (or ``names``) with 12 significant digits, UTF-8, LF."""
    cols = trace.columns() if isinstance(trace, SimTrace) else trace
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trace_csv_text(cols, names))
    return path


def read_trace_csv(path: str | Path, names: Sequence[str] = TRACE_COLUMNS) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != tuple(names):
            raise ValueError(f"unexpected trace header {header}; expected {list(names)}")
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(names))
    return {n: data[:, i] for i, n in enumerate(names)}


def _nice_ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def svg_line_chart(
    x: np.ndarray,
    series: dict[str, np.ndarray],
    title: str,
    xlabel: str = "t [s]",
    ylabel: str = "",
    guides: Sequence[tuple[float, str]] = (),
    width: int = 720,
    height: int = 360,
    max_points: int = 2000,
) -> str:
    """Static SVG chart of one or more series against ``x``; ``guides`` are labelled horizontal lines."""
    x = np.asarray(x, dtype=float)
    stride = max(1, int(np.ceil(x.size / max_points)))
    idx = np.arange(0, x.size, stride)
    if idx[-1] != x.size - 1:
        idx = np.append(idx, x.size - 1)
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    y_all = np.concatenate([y[idx] for y in ys] + [np.array([g for g, _ in guides], dtype=float)])
    y_lo, y_hi = float(np.min(y_all)), float(np.max(y_all))
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = float(x[0]), float(x[-1]) if x[-1] > x[0] else float(x[0]) + 1.0

    left, right, top, bottom = 70, 20, 36, 48
    pw, ph = width - left - right, height - top - bottom

    def px(v):
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return top + (y_hi - v) / (y_hi - y_lo) * ph

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for tv in _nice_ticks(x_lo, x_hi):
        if x_lo <= tv <= x_hi:
            out.append(f'<line x1="{px(tv):.1f}" y1="{top + ph}" x2="{px(tv):.1f}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{px(tv):.1f}" y="{top + ph + 18}" text-anchor="middle">{tv:g}</text>')
    for tv in _nice_ticks(y_lo, y_hi):
        if y_lo <= tv <= y_hi:
            out.append(f'<line x1="{left - 5}" y1="{py(tv):.1f}" x2="{left}" y2="{py(tv):.1f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{py(tv) + 4:.1f}" text-anchor="end">{tv:g}</text>')
    for g, label in guides:
        out.append(
            f'<line x1="{left}" y1="{py(g):.1f}" x2="{left + pw}" y2="{py(g):.1f}" '
            f'stroke="#888" stroke-dasharray="6,4"/>'
        )
        out.append(f'<text x="{left + pw - 4}" y="{py(g) - 4:.1f}" text-anchor="end" fill="#555">{escape(label)}</text>')
    for i, (name, y) in enumerate(series.items()):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[idx], np.asarray(y)[idx]))
        color = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{left + 10}" y="{top + 16 + 14 * i}" fill="{color}">{escape(name)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
