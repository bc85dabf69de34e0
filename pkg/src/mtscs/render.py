"""Plain-text SVG drawings of maps, plans, primitive sets and lattices.

Viewport mapping: a world rectangle ``[x0, x1] x [y0, y1]`` maps to pixels
by ``px = margin + (x - x0) * scale`` and ``py = margin + (y1 - y) * scale``
so ``+y`` points up on screen.  The image is
``(x1 - x0) * scale + 2 * margin`` pixels wide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .lattice import Lattice
from .planner import OccupancyGrid, PlanResult, PrimitiveSet
from .pose import Pose
from .spanner import ControlSet
from .steering import Steering, n_samples

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


@dataclass(frozen=True)
class Viewport:
    x0: float
    y0: float
    x1: float
    y1: float
    scale: float = 40.0
    margin: float = 10.0

    @property
    def size(self) -> tuple[float, float]:
        return ((self.x1 - self.x0) * self.scale + 2 * self.margin,
                (self.y1 - self.y0) * self.scale + 2 * self.margin)

    def px(self, x: float, y: float) -> tuple[float, float]:
        return self.margin + (x - self.x0) * self.scale, self.margin + (self.y1 - y) * self.scale


def _f(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


class Svg:
    def __init__(self, view: Viewport):
        self.view = view
        self.parts: list[str] = []

    def rect(self, x: float, y: float, w: float, h: float, fill: str, stroke: str = "none") -> None:
        px, py = self.view.px(x, y + h)
        s = self.view.scale
        self.parts.append(f'<rect x="{_f(px)}" y="{_f(py)}" width="{_f(w * s)}" height="{_f(h * s)}" '
                          f'fill="{fill}" stroke="{stroke}"/>')

    def polyline(self, pts: np.ndarray, color: str, width: float = 1.5, opacity: float = 1.0) -> None:
        coords = " ".join(f"{_f(a)},{_f(b)}" for a, b in (self.view.px(x, y) for x, y in pts[:, :2]))
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                          f'stroke-width="{_f(width)}" stroke-opacity="{_f(opacity)}"/>')

    def circle(self, x: float, y: float, r_px: float, fill: str) -> None:
        px, py = self.view.px(x, y)
        self.parts.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="{_f(r_px)}" fill="{fill}"/>')

    def arrow(self, q: Pose, angle: float, color: str, length: float = 0.35) -> None:
        tip = (q.x + length * math.cos(angle), q.y + length * math.sin(angle))
        self.polyline(np.array([[q.x, q.y], tip]), color, 2.0)
        self.circle(q.x, q.y, 3.0, color)

    def text(self, x: float, y: float, s: str, size: int = 11) -> None:
        px, py = self.view.px(x, y)
        self.parts.append(f'<text x="{_f(px)}" y="{_f(py)}" font-family="sans-serif" '
                          f'font-size="{size}">{escape(s)}</text>')

    def to_string(self) -> str:
        w, h = self.view.size
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(w)}" height="{_f(h)}" '
                f'viewBox="0 0 {_f(w)} {_f(h)}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *self.parts, "</svg>"]) + "\n"


def _grid_layer(svg: Svg, grid: OccupancyGrid) -> None:
    res = grid.resolution
    w, h = grid.extent
    svg.rect(0.0, 0.0, w, h, "#fafafa", "#999999")
    # one rectangle per horizontal run of occupied cells
    for r in range(grid.height):
        row = grid.occupied[r]
        c = 0
        while c < grid.width:
            if row[c]:
                c1 = c
                while c1 < grid.width and row[c1]:
                    c1 += 1
                svg.rect(c * res, r * res, (c1 - c) * res, res, "#404040")
                c = c1
            else:
                c += 1


def render_plan(grid: OccupancyGrid, prims: PrimitiveSet, result: Optional[PlanResult],
                start: Pose, goal: Pose, scale: float = 40.0) -> str:
    """Map, obstacles, the swath of every plan step, start and goal."""
    w, h = grid.extent
    svg = Svg(Viewport(0.0, 0.0, w, h, scale))
    _grid_layer(svg, grid)
    H = prims.n_headings
    if result is not None and result.status == "found":
        for q, pid in zip(result.pose_sequence, result.primitive_sequence):
            p = prims.by_id(pid)
            rot = q.heading if prims.step == H else (q.heading - p.start_heading) % H
            svg.polyline(prims.swath(q, p, rot), PALETTE[0], 2.0)
        for q in result.pose_sequence[1:-1]:
            svg.circle(q.x, q.y, 2.0, PALETTE[0])
    svg.arrow(start, 2 * math.pi * start.heading / H, PALETTE[2])
    svg.arrow(goal, 2 * math.pi * goal.heading / H, PALETTE[1])
    return svg.to_string()


def render_primitives(prims: PrimitiveSet, scale: float = 60.0) -> str:
    """Every primitive drawn from the origin, coloured by start heading."""
    curves = []
    for p in prims.primitives:
        pts = prims.swath(Pose(0.0, 0.0, None, p.start_heading), p, 0)
        curves.append((p, pts))
    allp = np.vstack([c for _, c in curves] + [np.zeros((1, 2))])
    lo = np.floor(allp.min(axis=0)) - 0.5
    hi = np.ceil(allp.max(axis=0)) + 0.5
    svg = Svg(Viewport(lo[0], lo[1], hi[0], hi[1], scale))
    _integer_dots(svg, lo, hi)
    starts = sorted({p.start_heading for p in prims.primitives})
    for p, pts in curves:
        svg.polyline(pts, PALETTE[starts.index(p.start_heading) % len(PALETTE)], 2.0)
        svg.circle(p.end.x, p.end.y, 2.5, "#000000")
    svg.text(lo[0] + 0.1, hi[1] - 0.3, f"{prims.name or 'primitives'}: {len(prims)}")
    return svg.to_string()


def _integer_dots(svg: Svg, lo, hi) -> None:
    for x in range(int(math.ceil(lo[0])), int(math.floor(hi[0])) + 1):
        for y in range(int(math.ceil(lo[1])), int(math.floor(hi[1])) + 1):
            svg.circle(float(x), float(y), 1.2, "#bbbbbb")


def render_lattice(lattice: Lattice, control: Optional[ControlSet] = None, scale: float = 50.0) -> str:
    """Vertex positions of ``lattice``; with ``control``, its primitives' swaths."""
    xy = np.array([p.position()[:2] for p in lattice.poses])
    lo = xy.min(axis=0) - 0.5
    hi = xy.max(axis=0) + 0.5
    svg = Svg(Viewport(lo[0], lo[1], hi[0], hi[1], scale))
    seen = set()
    for x, y in xy:
        if (x, y) not in seen:
            seen.add((x, y))
            svg.circle(x, y, 2.0, "#999999")
    if control is not None:
        steer = _steering_of(lattice)
        for k, p in enumerate(sorted(control.primitive_ids)):
            s = lattice.poses[lattice.root_of(p)]
            q = lattice.poses[p]
            pts = steer.sample_xy(s, q, n_samples(float(lattice.costs[p])))
            svg.polyline(pts, PALETTE[k % len(PALETTE)], 1.8, 0.85)
            svg.circle(q.x, q.y, 2.5, "#000000")
        svg.text(lo[0] + 0.1, hi[1] - 0.3, f"|E| = {len(control)}, t = {control.t:g}")
    return svg.to_string()


def _steering_of(lattice: Lattice) -> Steering:
    if lattice.meta.get("steering") == "dubins":
        return Steering("dubins", float(lattice.meta["R"]), lattice.n_headings)
    return Steering("euclidean")


def write(text: str, path) -> None:
    Path(path).write_text(text)
