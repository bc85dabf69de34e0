"""Lattices built from weighted digraphs, and a brute-force graph spanner.

Graph vertex ``m`` (0-based) sits on the upper unit semicircle at angle
``m * pi / n``.  Every ordered pair ``(x, y)`` with a directed path from
``x`` to ``y`` becomes a lattice vertex at ``pos(y) - pos(x)``; chords of a
circle are determined by their vector, so no two pairs collide.  Edges:

* ``s -> xy`` through primitive ``xy`` when ``(x, y)`` is an arc,
* ``xy -> xv`` through primitive ``yv`` when ``(y, v)`` is an arc, ``x != v``.

The cost of ``xy`` is the shortest-path weight from ``x`` to ``y``.  A set
of arc primitives then t-spans the lattice exactly when the same arcs form
a graph t-spanner, provided every arc is itself a shortest path (a
"metric" graph).  Otherwise a direct edge would be charged less than its
arc weight.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .lattice import EPS, Lattice, LatticeError
from .pose import Pose
from .spanner import T_MARGIN


@dataclass(frozen=True)
class GraphSpannerInstance:
    n_vertices: int
    arcs: tuple[tuple[int, int, float], ...]
    t: float = 1.0

    def __post_init__(self):
        arcs = tuple((int(a), int(b), float(w)) for a, b, w in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        seen = set()
        for a, b, w in arcs:
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise LatticeError(f"arc ({a}, {b}) has an endpoint outside 0..{self.n_vertices - 1}")
            if a == b:
                raise LatticeError(f"self-loop at {a}")
            if w <= 0:
                raise LatticeError(f"arc ({a}, {b}) has non-positive weight {w}")
            if (a, b) in seen:
                raise LatticeError(f"duplicate arc ({a}, {b})")
            seen.add((a, b))
        if self.t < 1.0:
            raise LatticeError("t must be at least 1")

    def distances(self, arcs: Optional[list[int]] = None) -> np.ndarray:
        """All-pairs shortest paths using the listed arc indices (default all)."""
        n = self.n_vertices
        idx = range(len(self.arcs)) if arcs is None else arcs
        rows = [self.arcs[k][0] for k in idx]
        cols = [self.arcs[k][1] for k in idx]
        w = [self.arcs[k][2] for k in idx]
        g = csr_matrix((w, (rows, cols)), shape=(n, n))
        return shortest_path(g, method="D", directed=True)

    def is_metric(self) -> bool:
        d = self.distances()
        return all(w <= d[a, b] * (1.0 + EPS) for a, b, w in self.arcs)

    def to_json(self) -> dict:
        return {"n": self.n_vertices, "arcs": [[a, b, w] for a, b, w in self.arcs], "t": self.t}

    @classmethod
    def from_json(cls, doc: dict) -> "GraphSpannerInstance":
        return cls(int(doc["n"]), tuple(tuple(a) for a in doc["arcs"]), float(doc.get("t", 1.0)))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "GraphSpannerInstance":
        return cls.from_json(json.loads(Path(path).read_text()))


def circle_position(m: int, n: int) -> tuple[float, float]:
    a = m * math.pi / n
    return math.cos(a), math.sin(a)


def reduce_graph_spanner(g: GraphSpannerInstance) -> Lattice:
    """Lattice whose minimum t-spanning control set mirrors ``g``'s t-spanner."""
    n = g.n_vertices
    dist = g.distances()
    pos = [circle_position(m, n) for m in range(n)]
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y and np.isfinite(dist[x, y])]
    # arcs first so their primitive ids are the small ones
    arc_set = {(a, b) for a, b, _ in g.arcs}
    pairs.sort(key=lambda xy: (xy not in arc_set, xy))
    index = {xy: k + 1 for k, xy in enumerate(pairs)}
    poses = [Pose(0.0, 0.0)]
    costs = [0.0]
    for x, y in pairs:
        poses.append(Pose(pos[y][0] - pos[x][0], pos[y][1] - pos[x][1]))
        costs.append(float(dist[x, y]))

    edges = []
    for a, b, _ in g.arcs:
        p = index[(a, b)]
        edges.append((0, p, p))
        for x, y in pairs:
            if y == a and x != b:
                edges.append((index[(x, y)], index[(x, b)], p))
    meta = {
        "preset": "reduction",
        "steering": "euclidean",
        "graph": g.to_json(),
        "pairs": [[x, y] for x, y in pairs],
    }
    return Lattice(poses, np.array(costs), np.array(edges, dtype=np.int64), None, (0,), meta)


def arc_primitive(lattice: Lattice, a: int, b: int) -> int:
    """Lattice index of the vertex standing for the pair ``(a, b)``."""
    pairs = lattice.meta["pairs"]
    return 1 + pairs.index([a, b])


def _floyd(n: int, arcs, subset) -> np.ndarray:
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for k in subset:
        a, b, w = arcs[k]
        d[a, b] = min(d[a, b], w)
    for m in range(n):
        np.minimum(d, d[:, m:m + 1] + d[m:m + 1, :], out=d)
    return d


def is_graph_spanner(g: GraphSpannerInstance, subset, t: Optional[float] = None) -> bool:
    t = g.t if t is None else t
    full = _floyd(g.n_vertices, g.arcs, range(len(g.arcs)))
    return _spans(g, subset, full, t)


def _spans(g, subset, full, t) -> bool:
    sub = _floyd(g.n_vertices, g.arcs, subset)
    reach = np.isfinite(full)
    return bool(np.all(sub[reach] <= t * full[reach] * (1.0 + T_MARGIN)))


def min_graph_spanner(g: GraphSpannerInstance, t: Optional[float] = None) -> list[int]:
    """Smallest arc subset that t-spans ``g``, by enumeration.

    Returns sorted arc indices of one minimum-size subset.  Arcs with no detour within the stretch bound are fixed up front;
    the rest are enumerated by increasing subset size.
    """
    t = g.t if t is None else t
    m = len(g.arcs)
    full = _floyd(g.n_vertices, g.arcs, range(m))
    forced = []
    for k, (a, b, w) in enumerate(g.arcs):
        rest = _floyd(g.n_vertices, g.arcs, [q for q in range(m) if q != k])
        if rest[a, b] > t * full[a, b] * (1.0 + T_MARGIN):
            forced.append(k)
    optional = [k for k in range(m) if k not in forced]
    if len(optional) > 24:
        raise LatticeError(f"{len(optional)} optional arcs is too many for enumeration")
    for size in range(len(optional) + 1):
        for extra in itertools.combinations(optional, size):
            subset = sorted(forced + list(extra))
            if _spans(g, subset, full, t):
                return subset
    return list(range(m))


def random_metric_graph(rng: np.random.Generator, n: int, density: float = 0.5,
                        w_range: tuple[float, float] = (1.0, 3.0), t: float = 1.0) -> GraphSpannerInstance:
    """Random digraph where every arc is a shortest path between its ends.

    Weights are drawn uniformly, then arcs that a detour beats are dropped.
    """
    arcs = []
    for a in range(n):
        for b in range(n):
            if a != b and rng.random() < density:
                arcs.append((a, b, round(float(rng.uniform(*w_range)), 3)))
    g = GraphSpannerInstance(n, tuple(arcs), t)
    d = g.distances()
    kept = tuple((a, b, w) for a, b, w in arcs if w <= d[a, b] * (1.0 + EPS))
    return GraphSpannerInstance(n, kept, t)
