"""Static SVG figure of an inverse run: initial sites, final sites and the target."""

from __future__ import annotations

from typing import TextIO
from xml.sax.saxutils import quoteattr

import numpy as np

from .core import Instance, Point

WIDTH = 600


def _f(v: float) -> str:
    return f"{round(float(v), 6) + 0.0:.6f}"


def emit_svg(initial: Instance, report, target: Point, sink: TextIO, title: str | None = None) -> None:
    """Hollow circles for initial sites, filled circles for final sites, a cross at the target.

    The y axis is flipped so that the picture has the usual mathematical
    orientation; the viewBox is the union bounding box plus a 5% margin.
    """
    start = np.asarray(initial.coords, dtype=float)
    final = np.asarray(report.final_coords, dtype=float)
    tgt = target.as_array()
    allpts = np.vstack([start, final, tgt[None, :]])
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    side = float(max(span))
    margin = 0.05 * side
    x0 = lo[0] - margin
    y0 = -(hi[1] + margin)
    vw = span[0] + 2 * margin
    vh = span[1] + 2 * margin
    r = 0.01 * side
    stroke = 0.003 * side
    height = int(round(WIDTH * vh / vw)) or 1

    def pt(p):
        return _f(p[0]), _f(-p[1])

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" '
        f'viewBox="{_f(x0)} {_f(y0)} {_f(vw)} {_f(vh)}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out.append(f'<g id="moves" stroke="gray" stroke-width="{_f(stroke)}">')
    for a, b in zip(start, final):
        if np.allclose(a, b):
            continue
        (ax, ay), (bx, by) = pt(a), pt(b)
        out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}"/>')
    out.append("</g>")
    out.append(f'<g id="initial" fill="none" stroke="black" stroke-width="{_f(stroke)}">')
    for a in start:
        cx, cy = pt(a)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{_f(r)}"/>')
    out.append("</g>")
    out.append('<g id="final" fill="steelblue" stroke="none">')
    for b in final:
        cx, cy = pt(b)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{_f(0.7 * r)}"/>')
    out.append("</g>")
    tx, ty = tgt[0], -tgt[1]
    h = 1.5 * r
    out.append(f'<g id="target" stroke="crimson" stroke-width="{_f(2 * stroke)}">')
    out.append(f'<line x1="{_f(tx - h)}" y1="{_f(ty - h)}" x2="{_f(tx + h)}" y2="{_f(ty + h)}"/>')
    out.append(f'<line x1="{_f(tx - h)}" y1="{_f(ty + h)}" x2="{_f(tx + h)}" y2="{_f(ty - h)}"/>')
    out.append("</g>")
    out.append("</svg>")
    sink.write("\n".join(out) + "\n")


def _escape(text: str) -> str:
    return quoteattr(text)[1:-1]
