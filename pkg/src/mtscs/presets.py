"""Ready-made lattices used by the experiments and the CLI."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .lattice import Lattice, Workspace, generate_lattice, lattice_from_vertices
from .pose import Pose
from .steering import Steering

SQRT2 = math.sqrt(2.0)

# Generators of the 4-heading lattice: straight, left quarter turn, right quarter turn.
L1_GENERATORS = (Pose(1.0, 0.0, None, 0), Pose(1.0, 1.0, None, 1), Pose(1.0, -1.0, None, 3))

# 10-element generator set for the 8-heading planning comparison (headings in pi/4 units).
PLANNING_GENERATORS = (
    Pose(1.0, 0.0, None, 0),
    Pose(1.0, 1.0, None, 0),
    Pose(1.0, -1.0, None, 0),
    Pose(1.0, 1.0, None, 1),
    Pose(1.0, -1.0, None, 7),
    Pose(1.0, 1.0, None, 2),
    Pose(1.0, -1.0, None, 6),
    Pose(SQRT2, 0.0, None, 7),
    Pose(SQRT2, 0.0, None, 0),
    Pose(SQRT2, 0.0, None, 1),
)


def heading_grid(k: int, n_headings: int) -> list[Pose]:
    """``(Z^2 n [0,k] x [-k,k]) x {2 pi h / H}``."""
    return [
        Pose(float(x), float(y), None, h)
        for x in range(0, k + 1)
        for y in range(-k, k + 1)
        for h in range(n_headings)
    ]


def heading_lattice(k: int, radius: float, n_headings: int, validity: str = "endpoint") -> Lattice:
    ws = Workspace.box((0.0, -float(k)), (float(k), float(k)))
    steer = Steering("dubins", radius, n_headings)
    return lattice_from_vertices(
        heading_grid(k, n_headings), ws, steer, validity=validity,
        meta={"preset": f"H{n_headings}", "k": k},
    )


def l1(k: int = 3, radius: float = 0.5, validity: str = "endpoint") -> Lattice:
    lat = heading_lattice(k, radius, 4, validity)
    lat.meta.update(preset="L1", generators=[[1, 0, 0], [1, 1, 1], [1, -1, 3]])
    return lat


def l2(k: int = 3, radius: float = 0.5, validity: str = "endpoint") -> Lattice:
    lat = heading_lattice(k, radius, 8, validity)
    lat.meta.update(preset="L2")
    return lat


def l1_closure(k: int = 3, radius: float = 0.5, validity: str = "endpoint") -> Lattice:
    """L1 built by closing its three generators instead of listing vertices."""
    ws = Workspace.box((0.0, -float(k)), (float(k), float(k)))
    return generate_lattice(L1_GENERATORS, ws, Steering("dubins", radius, 4), validity=validity,
                            meta={"preset": "L1-closure", "k": k})


def euclidean(k: int = 5, dim: int = 2) -> Lattice:
    """``Z^d n [-k, k]^d`` with straight-line steering."""
    if dim not in (1, 2, 3):
        raise ValueError("dimension must be 1, 2 or 3")
    rng = range(-k, k + 1)
    pts = []
    for c in itertools.product(rng, repeat=dim):
        c = tuple(map(float, c))
        if dim == 1:
            pts.append(Pose(c[0], 0.0))
        elif dim == 2:
            pts.append(Pose(c[0], c[1]))
        else:
            pts.append(Pose(c[0], c[1], c[2]))
    lo = (-float(k),) * max(dim, 2) if dim > 1 else (-float(k), 0.0)
    hi = (float(k),) * max(dim, 2) if dim > 1 else (float(k), 0.0)
    ws = Workspace.box(lo, hi)
    return lattice_from_vertices(pts, ws, Steering("euclidean"), validity="swath",
                                 meta={"preset": f"euclidean{dim}d", "k": k})


def planning_lattice(k: int = 3, radius: float = 0.5) -> Lattice:
    """8-heading lattice generated by :data:`PLANNING_GENERATORS`.

    Concatenations must land on integer coordinates, so the lattice has a
    cardinal root ``(0,0,0)`` and a diagonal root ``(0,0,pi/4)``.  The box
    ``[0,k] x [-k,k]`` is taken in each root's own frame.
    """
    ws = Workspace.box((0.0, -float(k)), (float(k), float(k)))
    return generate_lattice(PLANNING_GENERATORS, ws, Steering("dubins", radius, 8),
                            validity="endpoint", integral=True,
                            meta={"preset": "planning", "k": k})


PRESETS = {
    "L1": l1,
    "L2": l2,
    "L1-closure": l1_closure,
    "planning": planning_lattice,
}


def neighborhood_stretch(offsets, k: int) -> tuple[float, tuple[int, int]]:
    """Worst ratio of grid-path length to straight-line length on ``[-k, k]^2``.

    Paths may only use the integer ``offsets`` (each costing its Euclidean
    length) and must stay inside the box.  Returns the ratio and the first
    vertex attaining it in row-major order.
    """
    side = 2 * k + 1
    idx = np.arange(side * side).reshape(side, side)
    rows, cols, w = [], [], []
    for dx, dy in offsets:
        xs = np.arange(max(-k, -k - dx), min(k, k - dx) + 1)
        ys = np.arange(max(-k, -k - dy), min(k, k - dy) + 1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        rows.append(idx[X + k, Y + k].ravel())
        cols.append(idx[X + dx + k, Y + dy + k].ravel())
        w.append(np.full(X.size, math.hypot(dx, dy)))
    g = csr_matrix((np.concatenate(w), (np.concatenate(rows), np.concatenate(cols))), shape=(side * side,) * 2)
    d = dijkstra(g, indices=idx[k, k]).reshape(side, side)
    X, Y = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1), indexing="ij")
    norm = np.hypot(X, Y)
    ratio = np.where(norm > 0, d / np.where(norm > 0, norm, 1.0), 0.0)
    flat = int(np.argmax(ratio))
    i, j = divmod(flat, side)
    return float(ratio[i, j]), (i - k, j - k)
