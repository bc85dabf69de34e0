"""Lattices of group elements and their edge relation.

A :class:`Lattice` stores vertices (poses reached from a root), their
costs and every valid concatenation ``i . p = j`` as an edge triple of
vertex indices.  Index 0 is always the identity ``s``.  Files and
user-facing output use 1-based ids (``id = index + 1``).

Lattices can be produced in two ways: by closing a generator set under
valid concatenation (:func:`generate_lattice`) or from an explicit vertex
set (:func:`lattice_from_vertices`).  Some lattices carry more than one
root: with the integer-coordinate rule and 8 headings, primitives that
start on a diagonal heading can never be expressed as integer offsets
from ``s``, so diagonal starts get their own root ``(0, 0, pi/4)``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .pose import Pose, concat, identity, inverse, key
from .steering import Steering, n_samples

EPS = 1e-9
INT_TOL = 1e-6
DEFAULT_BUDGET = 100_000


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Workspace:
    """A box ``[lo, hi]`` or a ball of ``radius`` around the origin.

    Containment is tested on the first ``len(lo)`` coordinates for boxes.
    Points are shrunk by ``footprint_radius`` to account for the robot body.
    """

    shape: str = "box"
    lo: tuple[float, ...] = ()
    hi: tuple[float, ...] = ()
    radius: float = 0.0
    footprint_radius: float = 0.0

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float], footprint_radius: float = 0.0) -> "Workspace":
        if len(lo) != len(hi) or any(a > b for a, b in zip(lo, hi)):
            raise LatticeError("box needs lo <= hi per axis")
        return cls("box", tuple(map(float, lo)), tuple(map(float, hi)), 0.0, footprint_radius)

    @classmethod
    def ball(cls, radius: float, footprint_radius: float = 0.0) -> "Workspace":
        return cls("ball", (), (), float(radius), footprint_radius)

    @property
    def dimension(self) -> Optional[int]:
        return len(self.lo) if self.shape == "box" else None

    def contains(self, pts: np.ndarray) -> bool:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        r = self.footprint_radius
        if self.shape == "ball":
            return bool(np.all(np.linalg.norm(pts, axis=1) <= self.radius - r + EPS))
        d = len(self.lo)
        sub = pts[:, :d]
        lo = np.asarray(self.lo) + r
        hi = np.asarray(self.hi) - r
        return bool(np.all(sub >= lo - EPS) and np.all(sub <= hi + EPS))

    def to_dict(self) -> dict:
        if self.shape == "ball":
            return {"shape": "ball", "radius": self.radius, "footprint_radius": self.footprint_radius}
        return {"shape": "box", "lo": list(self.lo), "hi": list(self.hi), "footprint_radius": self.footprint_radius}

    @classmethod
    def from_dict(cls, d: dict) -> "Workspace":
        if d["shape"] == "ball":
            return cls.ball(d["radius"], d.get("footprint_radius", 0.0))
        return cls.box(d["lo"], d["hi"], d.get("footprint_radius", 0.0))


@dataclass
class Lattice:
    poses: list[Pose]
    costs: np.ndarray
    edges: np.ndarray  # (m, 3) int rows (i, j, p), sorted by (p, i)
    n_headings: Optional[int] = None
    roots: tuple[int, ...] = (0,)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 3)
        if len(self.edges):
            order = np.lexsort((self.edges[:, 1], self.edges[:, 0], self.edges[:, 2]))
            self.edges = self.edges[order]
        self._root_set = frozenset(self.roots)

    @property
    def n(self) -> int:
        return len(self.poses)

    @property
    def primitives(self) -> list[int]:
        """Candidate primitives: every non-root vertex index."""
        return [v for v in range(self.n) if v not in self._root_set]

    def is_root(self, v: int) -> bool:
        return v in self._root_set

    def pose_of(self, v: int) -> Pose:
        return self.poses[v]

    def motion(self, p: int) -> Pose:
        """The group element a primitive applies, relative to its root."""
        root = self.poses[self.root_of(p)]
        return concat(inverse(root, self.n_headings), self.poses[p], self.n_headings)

    def root_of(self, v: int) -> int:
        return int(self.meta.get("root_of", {}).get(v, 0)) if len(self.roots) > 1 else 0

    def index_of(self, pose: Pose) -> Optional[int]:
        if not hasattr(self, "_index"):
            self._index = {key(p): v for v, p in enumerate(self.poses)}
        return self._index.get(key(pose))

    def edge_sets(self) -> dict[int, list[tuple[int, int]]]:
        return edge_sets(self)

    # -- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        meta = dict(self.meta)
        meta.pop("root_of", None)
        verts = []
        for v, (pose, c) in enumerate(zip(self.poses, self.costs)):
            entry = {"id": v + 1, "pose": _pose_dict(pose), "cost": float(c)}
            if len(self.roots) > 1:
                entry["root"] = self.root_of(v) + 1
            verts.append(entry)
        return {
            "headings": [2.0 * math.pi * h / self.n_headings for h in range(self.n_headings)] if self.n_headings else [],
            "vertices": verts,
            "edges": [[int(i) + 1, int(j) + 1, int(p) + 1] for i, j, p in self.edges],
            "roots": [r + 1 for r in self.roots],
            "meta": meta,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n")

    @classmethod
    def from_json(cls, doc: dict) -> "Lattice":
        verts = sorted(doc["vertices"], key=lambda e: e["id"])
        if [e["id"] for e in verts] != list(range(1, len(verts) + 1)):
            raise LatticeError("vertex ids must be 1..n")
        H = len(doc.get("headings", [])) or None
        poses = [_pose_from(e["pose"]) for e in verts]
        costs = [e["cost"] for e in verts]
        edges = [[i - 1, j - 1, p - 1] for i, j, p in doc["edges"]]
        roots = tuple(r - 1 for r in doc.get("roots", [1]))
        meta = dict(doc.get("meta", {}))
        if len(roots) > 1:
            meta["root_of"] = {e["id"] - 1: e.get("root", 1) - 1 for e in verts}
        return cls(poses, np.array(costs), np.array(edges, dtype=np.int64).reshape(-1, 3), H, roots, meta)

    @classmethod
    def load(cls, path) -> "Lattice":
        return cls.from_json(json.loads(Path(path).read_text()))


def _pose_dict(p: Pose) -> dict:
    d = {"x": p.x, "y": p.y}
    if p.z is not None:
        d["z"] = p.z
    if p.heading is not None:
        d["heading"] = p.heading
    return d


def _pose_from(d) -> Pose:
    if isinstance(d, (list, tuple)):
        d = dict(zip(("x", "y", "heading"), d))
    return Pose(float(d["x"]), float(d.get("y", 0.0)), None if d.get("z") is None else float(d["z"]), d.get("heading"))


# -- validity ----------------------------------------------------------

def is_integral(p: Pose, tol: float = INT_TOL) -> bool:
    return all(abs(v - round(v)) <= tol for v in p.position())


class _Validator:
    """Valid-concatenation test for one lattice.

    ``mode`` is ``"swath"`` (sampled steering path must stay inside the
    workspace) or ``"endpoint"`` (only the resulting pose is tested).
    """

    def __init__(self, workspace: Workspace, steering: Steering, mode: str, per_unit: int,
                 extra: Optional[Callable[[Pose], bool]], frame: Callable[[Pose], Pose]):
        if mode not in ("swath", "endpoint"):
            raise LatticeError(f"unknown validity mode {mode!r}")
        self.ws = workspace
        self.steering = steering
        self.mode = mode
        self.per_unit = per_unit
        self.extra = extra
        self.frame = frame
        self._local: dict[tuple, np.ndarray] = {}

    def _local_samples(self, motion: Pose) -> np.ndarray:
        k = key(motion)
        pts = self._local.get(k)
        if pts is None:
            s = identity(self.steering.n_headings, 3 if motion.z is not None else 2)
            length = self.steering.cost(s, motion)
            pts = self.steering.sample_xy(s, motion, n_samples(length, self.per_unit))
            self._local[k] = pts
        return pts

    def __call__(self, i: Pose, motion: Pose, j: Pose) -> bool:
        if self.extra is not None and not self.extra(j):
            return False
        jl = self.frame(j)
        if not self.ws.contains(np.array([jl.position()])):
            return False
        if self.mode == "endpoint":
            return True
        pts = self._local_samples(motion)
        il = self.frame(i)
        if il.heading is not None:
            a = il.angle(self.steering.n_headings)
            c, s = math.cos(a), math.sin(a)
            world = np.column_stack((il.x + c * pts[:, 0] - s * pts[:, 1], il.y + s * pts[:, 0] + c * pts[:, 1]))
        else:
            world = pts + np.asarray(il.position())
        return self.ws.contains(world)


# -- construction ------------------------------------------------------

def _heading_classes(n_headings: Optional[int], integral: bool) -> int:
    # quarter-turn rotations keep Z^2 integral; other headings need a separate root
    if n_headings is None or not integral or n_headings % 4:
        return 1
    return n_headings // 4


def generate_lattice(
    generators: Iterable[Pose],
    workspace: Workspace,
    steering: Steering,
    *,
    validity: str = "swath",
    integral: bool = False,
    per_unit: int = 50,
    eps: float = EPS,
    budget: int = DEFAULT_BUDGET,
    cost_fn: Optional[Callable[[Pose], float]] = None,
    meta: Optional[dict] = None,
) -> Lattice:
    """Close ``generators`` under valid concatenation (breadth first).

    With ``integral=True`` a concatenation is only valid when the result has
    integer coordinates; generators are then sorted into heading classes
    by the root they are integral from (see module docstring).
    """
    gens = list(generators)
    H = steering.n_headings if steering.kind == "dubins" else None
    if H is None and gens and gens[0].heading is not None:
        H = max(g.heading for g in gens) + 1
    n_cls = _heading_classes(H, integral)
    roots = [Pose(0.0, 0.0, None, c) if H else identity(None, 3 if gens and gens[0].z is not None else 2)
             for c in range(n_cls)]
    by_class: list[list[Pose]] = [[] for _ in range(n_cls)]
    for g in gens:
        placed = False
        for c, r in enumerate(roots):
            if not integral or is_integral(concat(r, g, H)):
                by_class[c].append(g)
                placed = True
        if not placed:
            raise LatticeError(f"generator {g} is not integral from any root")
    frames = [_frame_fn(r, H) for r in roots]

    poses: list[Pose] = list(roots)
    root_of = {c: c for c in range(n_cls)}
    seen = {(c, key(r, eps)): c for c, r in enumerate(roots)}
    validators = [_Validator(workspace, steering, validity, per_unit, is_integral if integral else None, frames[c])
                  for c in range(n_cls)]
    queue = deque(range(n_cls))
    while queue:
        v = queue.popleft()
        c = root_of[v]
        i = poses[v]
        cls_i = (i.heading % n_cls) if n_cls > 1 else 0
        for g in by_class[cls_i]:
            j = concat(i, g, H)
            kj = (c, key(j, eps))
            if kj in seen:
                continue
            if not validators[c](i, g, j):
                continue
            if len(poses) >= budget:
                raise LatticeError(f"lattice closure exceeded the vertex budget of {budget}")
            seen[kj] = len(poses)
            root_of[len(poses)] = c
            poses.append(j)
            queue.append(len(poses) - 1)
    m = dict(meta or {})
    m.setdefault("generators", [_pose_dict(g) for g in gens])
    return _finish(poses, root_of, n_cls, workspace, steering, validity, integral, per_unit, eps, cost_fn, m, validators)


def lattice_from_vertices(
    poses: Iterable[Pose],
    workspace: Workspace,
    steering: Steering,
    *,
    validity: str = "swath",
    integral: bool = False,
    per_unit: int = 50,
    eps: float = EPS,
    cost_fn: Optional[Callable[[Pose], float]] = None,
    meta: Optional[dict] = None,
) -> Lattice:
    """Lattice over an explicit vertex set (single root ``s``).

    The identity is moved to index 0; duplicates within ``eps`` are dropped.
    """
    poses = list(poses)
    H = steering.n_headings if steering.kind == "dubins" else None
    s = identity(H, 3 if poses and poses[0].z is not None else 2)
    out = [s]
    seen = {key(s, eps)}
    for p in poses:
        k = key(p, eps)
        if k not in seen:
            seen.add(k)
            out.append(p)
    frame = _frame_fn(s, H)
    validator = _Validator(workspace, steering, validity, per_unit, is_integral if integral else None, frame)
    return _finish(out, {v: 0 for v in range(len(out))}, 1, workspace, steering, validity, integral,
                   per_unit, eps, cost_fn, dict(meta or {}), [validator])


def _frame_fn(root: Pose, H: Optional[int]) -> Callable[[Pose], Pose]:
    if root.heading in (None, 0):
        return lambda p: p
    inv = inverse(root, H)
    return lambda p: concat(inv, p, H)


def _finish(poses, root_of, n_cls, workspace, steering, validity, integral, per_unit, eps, cost_fn, meta, validators):
    H = steering.n_headings if steering.kind == "dubins" else None
    n = len(poses)
    index = {(root_of[v], key(p, eps)): v for v, p in enumerate(poses)}
    motions = []
    costs = np.zeros(n)
    for v, p in enumerate(poses):
        root = poses[root_of[v]]
        m = concat(inverse(root, H), p, H) if H else p
        motions.append(m)
        if v >= n_cls:
            costs[v] = cost_fn(m) if cost_fn else steering.cost(identity(H, 3 if m.z is not None else 2), m)
    edges = []
    for v, i in enumerate(poses):
        c = root_of[v]
        cls_i = (i.heading % n_cls) if n_cls > 1 else 0
        for p in range(n_cls, n):
            if root_of[p] != cls_i:
                continue
            j = concat(i, motions[p], H)
            u = index.get((c, key(j, eps)))
            if u is None:
                continue
            if validators[c](i, motions[p], j):
                edges.append((v, u, p))
    meta = dict(meta)
    meta.update(
        workspace=workspace.to_dict(),
        steering=steering.kind,
        R=steering.radius if steering.kind == "dubins" else None,
        validity=validity,
        integral=integral,
    )
    if n_cls > 1:
        meta["root_of"] = dict(root_of)
    return Lattice(poses, costs, np.array(edges, dtype=np.int64).reshape(-1, 3), H, tuple(range(n_cls)), meta)


# -- queries -----------------------------------------------------------

def edge_sets(lattice: Lattice) -> dict[int, list[tuple[int, int]]]:
    """Map primitive index ``p`` to its edge list ``S_p``."""
    out: dict[int, list[tuple[int, int]]] = {p: [] for p in lattice.primitives}
    for i, j, p in lattice.edges:
        out[int(p)].append((int(i), int(j)))
    return out


@dataclass(frozen=True)
class MetricViolation:
    axiom: int
    witness: tuple

    def __str__(self):
        return f"axiom {self.axiom} violated by {self.witness}"


def check_almost_metric(lattice: Lattice, tol: float = 1e-9) -> Optional[MetricViolation]:
    """``None`` when costs form an almost-metric, else the first violation.

    Axiom 3 is checked on every pair of chained edges ``i.p = j``,
    ``j.q = k`` for which a direct edge ``i.r = k`` exists.  The witness
    is ``(i, j, k, p, q, r)`` in vertex indices.
    """
    c = lattice.costs
    for v in range(lattice.n):
        if c[v] < 0:
            return MetricViolation(1, (v,))
        if lattice.is_root(v) != (c[v] == 0):
            if lattice.is_root(v):
                return MetricViolation(1, (v,))
            return MetricViolation(2, (v,))
    direct: dict[tuple[int, int], int] = {}
    out: dict[int, list[tuple[int, int]]] = {}
    for i, j, p in lattice.edges.tolist():
        direct.setdefault((i, j), p)
        out.setdefault(i, []).append((j, p))
    for i, j, p in lattice.edges.tolist():
        for k, q in out.get(j, ()):
            r = direct.get((i, k))
            if r is not None and c[r] > c[p] + c[q] + tol:
                return MetricViolation(3, (i, j, k, p, q, r))
    return None


def reachable(lattice: Lattice, primitives: Optional[Iterable[int]] = None) -> set[int]:
    """Vertices reachable from the roots over edges of ``primitives``."""
    allowed = None if primitives is None else set(primitives)
    adj: dict[int, list[int]] = {}
    for i, j, p in lattice.edges.tolist():
        if allowed is None or p in allowed:
            adj.setdefault(i, []).append(j)
    seen = set(lattice.roots)
    stack = list(lattice.roots)
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen
