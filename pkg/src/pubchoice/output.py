"""Serialize study results as CSV, JSON or SVG line charts.

All writers are deterministic: floats are printed with 17 significant
digits in CSV and as shortest round-trip reprs in JSON, and SVG coordinates
are rounded to fixed precision.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from typing import Any, Dict, List
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from ._backend import NAME as BACKEND
from .experiments import GENERATOR, Figure, StudyResult, Table

FORMATS = ("csv", "json", "svg")


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def table_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _plain(obj):
    """Convert numpy values to JSON data; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def result_document(result: StudyResult, config: Dict[str, Any], seed: int) -> Dict[str, Any]:
    return {
        "kind": result.kind,
        "version": __version__,
        "backend": BACKEND,
        "seed": seed,
        "generator": GENERATOR,
        "config": config,
        "ok": result.ok,
        "violations": result.violations,
        "notes": result.notes,
        "summary": result.summary,
        "tables": {t.name: {"columns": t.columns, "rows": t.rows} for t in result.tables},
    }


def result_json(result: StudyResult, config: Dict[str, Any], seed: int) -> str:
    return json.dumps(_plain(result_document(result, config, seed)), indent=2, allow_nan=False) + "\n"


# --- svg ----------------------------------------------------------------------

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 50


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def figure_svg(fig: Figure) -> str:
    xs = [x for s in fig.series for x in s.x]
    ys = [y for s in fig.series for y in s.y]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0
    pad = 0.05 * (y1 - y0) if y1 > y0 else 1.0
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(fig.title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{_fmt(px(t))}" y="{TOP + ph + 18}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{LEFT - 4}" y1="{_fmt(py(t))}" x2="{LEFT}" y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(fig.x_label)}</text>')
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.0f})">{escape(fig.y_label)}</text>'
    )
    for k, s in enumerate(fig.series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(s.x, s.y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in zip(s.x, s.y):
            out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" fill="{color}"/>')
        ly = TOP + 10 + 18 * k
        out.append(f'<line x1="{WIDTH - RIGHT + 15}" y1="{ly}" x2="{WIDTH - RIGHT + 35}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 40}" y="{ly + 4}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- files --------------------------------------------------------------------


def _stem(kind: str, name: str) -> str:
    return kind if name == kind else f"{kind}_{name}"


def render(result: StudyResult, fmt: str, config: Dict[str, Any], seed: int) -> Dict[str, str]:
    """File name to content for every output of ``result`` in format ``fmt``."""
    if fmt == "csv":
        return {_stem(result.kind, t.name) + ".csv": table_csv(t) for t in result.tables}
    if fmt == "json":
        return {result.kind + ".json": result_json(result, config, seed)}
    if fmt == "svg":
        return {_stem(result.kind, f.name) + ".svg": figure_svg(f) for f in result.figures}
    raise ValueError(f"unknown output format {fmt!r}; choose from {', '.join(FORMATS)}")


def emit_results(result: StudyResult, fmt: str, out_dir: str, config: Dict[str, Any], seed: int) -> List[str]:
    """Write the outputs of ``result`` under ``out_dir`` and return their paths."""
    files = render(result, fmt, config, seed)
    paths = []
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror or exc}") from exc
    for name, text in files.items():
        path = os.path.join(out_dir, name)
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
        paths.append(path)
    return paths
