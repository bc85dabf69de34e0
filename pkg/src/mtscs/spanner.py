"""Distances under a restricted control set and t-span verification."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .lattice import Lattice

# relative slack on d <= t * c; lattice costs are irrational in general
T_MARGIN = 1e-9
TIE_REL = 1e-12


class SpannerError(ValueError):
    pass


@dataclass(frozen=True)
class ControlSet:
    primitive_ids: frozenset[int]
    t: float

    def __post_init__(self):
        object.__setattr__(self, "primitive_ids", frozenset(int(p) for p in self.primitive_ids))
        if self.t < 1.0:
            raise SpannerError("t must be at least 1")

    def __len__(self):
        return len(self.primitive_ids)

    def validate(self, lattice: Lattice) -> None:
        for p in self.primitive_ids:
            if not 0 <= p < lattice.n:
                raise SpannerError(f"primitive {p + 1} is not a lattice vertex")
            if lattice.is_root(p):
                raise SpannerError(f"root vertex {p + 1} cannot be a primitive")

    def to_json(self, lattice: Lattice, **extra) -> dict:
        # poses are given in the frame where the primitive's root sits at the
        # origin; start_headings names that root's heading
        ids = sorted(self.primitive_ids)
        doc = {
            "t": self.t,
            "primitive_ids": [p + 1 for p in ids],
            "poses": [lattice.poses[p].to_list() for p in ids],
            "costs": [float(lattice.costs[p]) for p in ids],
        }
        if lattice.n_headings:
            doc["n_headings"] = lattice.n_headings
            doc["start_headings"] = [lattice.poses[lattice.root_of(p)].heading for p in ids]
        for k in ("steering", "R", "integral"):
            if k in lattice.meta:
                doc[k] = lattice.meta[k]
        doc.update(extra)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ControlSet":
        return cls(frozenset(p - 1 for p in doc["primitive_ids"]), float(doc["t"]))

    @classmethod
    def load(cls, path) -> "ControlSet":
        return cls.from_json(json.loads(Path(path).read_text()))


def within(d: Optional[float], t: float, c: float) -> bool:
    return d is not None and d <= t * c * (1.0 + T_MARGIN)


def _better(a: tuple[float, int, int], b: tuple[float, int, int]) -> bool:
    # lengths that differ only by summation rounding count as equal
    if abs(a[0] - b[0]) <= TIE_REL * max(1.0, abs(b[0])):
        return a[1:] < b[1:]
    return a[0] < b[0]


def _search(lattice: Lattice, allowed: Optional[Iterable[int]]):
    """Dijkstra from every root over edges whose primitive is allowed.

    Labels are compared as ``(length, hops, predecessor)`` so parents are
    deterministic among equal-length paths.
    """
    ok = None if allowed is None else set(allowed)
    adj: dict[int, list[tuple[int, int]]] = {}
    for i, j, p in lattice.edges.tolist():
        if ok is None or p in ok:
            adj.setdefault(i, []).append((j, p))
    c = lattice.costs
    label: dict[int, tuple[float, int, int]] = {r: (0.0, 0, -1) for r in lattice.roots}
    parent: dict[int, tuple[int, int]] = {}
    heap = [(0.0, 0, r) for r in lattice.roots]
    heapq.heapify(heap)
    done: set[int] = set()
    while heap:
        d, h, u = heapq.heappop(heap)
        if u in done or (d, h) != label[u][:2]:
            continue
        done.add(u)
        for v, p in adj.get(u, ()):
            if v in done:
                continue
            cand = (d + c[p], h + 1, u)
            old = label.get(v)
            if old is None or _better(cand, old):
                label[v] = cand
                parent[v] = (u, p)
                heapq.heappush(heap, (cand[0], cand[1], v))
    return label, parent


def restricted_distances(lattice: Lattice, control: Optional[Iterable[int]] = None) -> dict[int, Optional[float]]:
    """Shortest distance from the root to every vertex using only ``control``.

    Unreachable vertices map to ``None``.  ``control=None`` allows every
    primitive.
    """
    ids = None if control is None else _ids(control)
    label, _ = _search(lattice, ids)
    return {v: (label[v][0] if v in label else None) for v in range(lattice.n)}


def _ids(control) -> frozenset[int]:
    return control.primitive_ids if isinstance(control, ControlSet) else frozenset(control)


@dataclass(frozen=True)
class Witness:
    vertex: int
    distance: Optional[float]
    bound: float

    def __str__(self):
        d = "unreachable" if self.distance is None else f"{self.distance:.6g}"
        return f"vertex {self.vertex + 1}: d^E = {d} > {self.bound:.6g}"


@dataclass(frozen=True)
class SpanCheck:
    ok: bool
    witness: Optional[Witness] = None

    def __bool__(self):
        return self.ok


def is_t_spanning(lattice: Lattice, control, t: Optional[float] = None) -> SpanCheck:
    """Check every vertex is t-reachable; report the cheapest violation."""
    if t is None:
        if not isinstance(control, ControlSet):
            raise SpannerError("t is required when control is not a ControlSet")
        t = control.t
    dist = restricted_distances(lattice, _ids(control))
    costs = lattice.costs
    bad = [v for v in range(lattice.n) if not within(dist[v], t, costs[v])]
    if not bad:
        return SpanCheck(True)
    v = min(bad, key=lambda u: (costs[u], u))
    return SpanCheck(False, Witness(v, dist[v], t * float(costs[v])))


@dataclass
class Arborescence:
    parent: dict[int, tuple[int, int]]  # vertex -> (predecessor, primitive)
    z: dict[int, float]
    roots: tuple[int, ...] = (0,)

    def path_to(self, v: int) -> list[tuple[int, int, int]]:
        """Edges ``(i, j, p)`` from the root to ``v``."""
        out = []
        while v in self.parent:
            u, p = self.parent[v]
            out.append((u, v, p))
            v = u
        return out[::-1]

    def edges(self) -> list[tuple[int, int, int]]:
        return sorted((u, v, p) for v, (u, p) in self.parent.items())

    def to_json(self) -> dict:
        return {
            "parent": {str(v + 1): [u + 1, p + 1] for v, (u, p) in sorted(self.parent.items())},
            "z": {str(v + 1): z for v, z in sorted(self.z.items())},
        }


def extract_arborescence(lattice: Lattice, control) -> Arborescence:
    """Union of one shortest restricted path per vertex, as a rooted tree."""
    label, parent = _search(lattice, _ids(control))
    missing = [v for v in range(lattice.n) if v not in label]
    if missing:
        raise SpannerError(f"vertex {missing[0] + 1} is unreachable under the control set")
    return Arborescence(dict(parent), {v: label[v][0] for v in range(lattice.n)}, tuple(lattice.roots))
