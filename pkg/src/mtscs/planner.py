"""A* over occupancy grids with a motion-primitive set as the successor function.

World coordinates are in length units.  Cell ``(row, col)`` covers
``[col*res, (col+1)*res) x [row*res, (row+1)*res)``; row 0 is the bottom
of the map.  Text maps list rows top first, like an image.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import ndimage

from .lattice import INT_TOL, Lattice
from .pose import Pose, concat
from .spanner import ControlSet
from .steering import Steering, n_samples

QUANT = 1e-6


class PlannerError(ValueError):
    pass


# -- grids -------------------------------------------------------------

@dataclass
class OccupancyGrid:
    width: int
    height: int
    resolution: float
    occupied: np.ndarray  # (height, width) bool, row 0 at y = 0
    footprint_radius: float = 0.0

    def __post_init__(self):
        self.occupied = np.asarray(self.occupied, dtype=bool).reshape(self.height, self.width)
        self._blocked = self.occupied
        if self.footprint_radius > 0 and self.occupied.any():
            # cells whose centre lies within the footprint of an obstacle cell
            dist = ndimage.distance_transform_edt(~self.occupied) * self.resolution
            self._blocked = dist <= self.footprint_radius

    @classmethod
    def empty(cls, width: int, height: int, resolution: float = 1.0) -> "OccupancyGrid":
        return cls(width, height, resolution, np.zeros((height, width), dtype=bool))

    @property
    def extent(self) -> tuple[float, float]:
        return self.width * self.resolution, self.height * self.resolution

    def cells(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pts = np.atleast_2d(pts)
        col = np.floor(pts[:, 0] / self.resolution + 1e-9).astype(np.int64)
        row = np.floor(pts[:, 1] / self.resolution + 1e-9).astype(np.int64)
        return row, col

    def free(self, pts: np.ndarray) -> bool:
        """True when every point lies in a free cell inside the map."""
        row, col = self.cells(pts)
        w, h = self.extent
        pts = np.atleast_2d(pts)
        inside = (pts[:, 0] >= -1e-9) & (pts[:, 0] <= w + 1e-9) & (pts[:, 1] >= -1e-9) & (pts[:, 1] <= h + 1e-9)
        if not inside.all():
            return False
        # points on the far boundary belong to the last cell
        row = np.minimum(row, self.height - 1)
        col = np.minimum(col, self.width - 1)
        return not self._blocked[row, col].any()

    def fill_rect(self, x0: float, y0: float, x1: float, y1: float) -> None:
        """Mark every cell touching the world rectangle as occupied."""
        c0, c1 = int(math.floor(x0 / self.resolution)), int(math.ceil(x1 / self.resolution))
        r0, r1 = int(math.floor(y0 / self.resolution)), int(math.ceil(y1 / self.resolution))
        self.occupied[max(r0, 0):max(r1, 0), max(c0, 0):max(c1, 0)] = True
        self.__post_init__()

    def to_text(self) -> str:
        lines = [f"{self.width} {self.height} {self.resolution!r}"]
        for r in range(self.height - 1, -1, -1):
            lines.append("".join("#" if v else "." for v in self.occupied[r]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, footprint_radius: float = 0.0) -> "OccupancyGrid":
        lines = [ln.rstrip("\r") for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise PlannerError("empty map file")
        try:
            w, h, res = lines[0].split()
            w, h, res = int(w), int(h), float(res)
        except ValueError as exc:
            raise PlannerError("map header must be 'width height resolution'") from exc
        rows = lines[1:]
        if len(rows) != h or any(len(r) != w for r in rows):
            raise PlannerError(f"map body must be {h} rows of {w} characters")
        bad = set("".join(rows)) - {".", "#"}
        if bad:
            raise PlannerError(f"unexpected map characters {sorted(bad)}")
        occ = np.array([[ch == "#" for ch in r] for r in reversed(rows)], dtype=bool)
        return cls(w, h, res, occ, footprint_radius)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path, footprint_radius: float = 0.0) -> "OccupancyGrid":
        return cls.from_text(Path(path).read_text(), footprint_radius)


def sidecar_path(map_path) -> Path:
    p = Path(map_path)
    return p.with_suffix(".json")


def save_problem(map_path, grid: OccupancyGrid, start: Pose, goal: Pose, **extra) -> None:
    grid.save(map_path)
    doc = {"start": start.to_list(), "goal": goal.to_list(), **extra}
    sidecar_path(map_path).write_text(json.dumps(doc, indent=1) + "\n")


def load_problem(map_path) -> tuple[OccupancyGrid, Optional[Pose], Optional[Pose]]:
    grid = OccupancyGrid.load(map_path)
    side = sidecar_path(map_path)
    if not side.exists():
        return grid, None, None
    doc = json.loads(side.read_text())
    return grid, parse_pose(doc["start"]), parse_pose(doc["goal"])


def parse_pose(v) -> Pose:
    """``[x, y, h]`` or ``"x,y,h"`` with ``h`` a heading index."""
    if isinstance(v, str):
        v = [float(s) for s in v.split(",")]
    if len(v) != 3:
        raise PlannerError(f"pose needs x, y and a heading index, got {v!r}")
    return Pose(float(v[0]), float(v[1]), None, int(round(v[2])))


# -- primitive sets ----------------------------------------------------

@dataclass(frozen=True)
class Primitive:
    id: int  # 1-based id as written in the primitive file
    start_heading: int
    end: Pose  # relative to a start at the origin with heading start_heading
    cost: float


@dataclass
class PrimitiveSet:
    primitives: list[Primitive]
    n_headings: int
    radius: float
    integral: bool = True
    t: Optional[float] = None
    name: str = ""
    per_unit: int = 50
    _swaths: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.primitives:
            raise PlannerError("primitive set is empty")
        self.steering = Steering("dubins", self.radius, self.n_headings)
        self.step = self.n_headings // 4 if self.integral and self.n_headings % 4 == 0 else self.n_headings

    def __len__(self):
        return len(self.primitives)

    def applicable(self, heading: int) -> list[tuple[Primitive, int]]:
        """Primitives usable at ``heading`` with the rotation each needs."""
        out = []
        for p in self.primitives:
            d = (heading - p.start_heading) % self.n_headings
            if self.step == self.n_headings:
                # general rotations only for sets anchored at heading 0
                if p.start_heading == 0:
                    out.append((p, heading))
            elif d % self.step == 0:
                out.append((p, d))
        return out

    def apply(self, q: Pose, p: Primitive, rot: int) -> Pose:
        r = concat(Pose(q.x, q.y, None, rot), p.end, self.n_headings)
        if self.integral:
            r = Pose(_snap(r.x), _snap(r.y), None, r.heading)
        return r

    def swath(self, q: Pose, p: Primitive, rot: int) -> np.ndarray:
        k = (p.id, rot)
        local = self._swaths.get(k)
        if local is None:
            s = Pose(0.0, 0.0, None, p.start_heading)
            pts = self.steering.sample_xy(s, p.end, n_samples(p.cost, self.per_unit))
            a = 2.0 * math.pi * (rot % self.n_headings) / self.n_headings
            c, sn = math.cos(a), math.sin(a)
            local = np.column_stack((c * pts[:, 0] - sn * pts[:, 1], sn * pts[:, 0] + c * pts[:, 1]))
            self._swaths[k] = local
        return local + np.array([q.x, q.y])

    def by_id(self, pid: int) -> Primitive:
        for p in self.primitives:
            if p.id == pid:
                return p
        raise PlannerError(f"no primitive with id {pid}")

    # -- files ---------------------------------------------------------
    @classmethod
    def from_json(cls, doc: dict, name: str = "") -> "PrimitiveSet":
        H = int(doc["n_headings"])
        starts = doc.get("start_headings") or [0] * len(doc["poses"])
        prims = [
            Primitive(int(i), int(h), Pose(float(p[0]), float(p[1]), None, int(p[2])), float(c))
            for i, p, c, h in zip(doc["primitive_ids"], doc["poses"], doc["costs"], starts)
        ]
        R = doc.get("R")
        if R is None:
            raise PlannerError("primitive file lacks the turning radius R")
        return cls(prims, H, float(R), bool(doc.get("integral", True)), doc.get("t"), name or doc.get("name", ""))

    @classmethod
    def load(cls, path) -> "PrimitiveSet":
        p = Path(path)
        return cls.from_json(json.loads(p.read_text()), p.stem)

    @classmethod
    def from_control_set(cls, lattice: Lattice, control: ControlSet, name: str = "") -> "PrimitiveSet":
        return cls.from_json(control.to_json(lattice), name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "t": self.t,
            "primitive_ids": [p.id for p in self.primitives],
            "poses": [p.end.to_list() for p in self.primitives],
            "costs": [p.cost for p in self.primitives],
            "start_headings": [p.start_heading for p in self.primitives],
            "n_headings": self.n_headings,
            "steering": "dubins",
            "R": self.radius,
            "integral": self.integral,
        }


def _snap(v: float) -> float:
    r = round(v)
    return float(r) if abs(v - r) <= INT_TOL else v


def baseline_set() -> PrimitiveSet:
    """The shipped 8-primitive comparison set (8 headings, R = 0.5)."""
    text = resources.files("mtscs.data").joinpath("baseline8.json").read_text()
    return PrimitiveSet.from_json(json.loads(text), "baseline8")


# -- search ------------------------------------------------------------

@dataclass
class PlanResult:
    status: str  # "found" | "no_path"
    primitive_sequence: list[int]
    pose_sequence: list[Pose]
    length: float
    nodes_expanded: int
    wall_time: float

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "primitive_sequence": self.primitive_sequence,
            "pose_sequence": [p.to_list() for p in self.pose_sequence],
            "length": self.length,
            "nodes_expanded": self.nodes_expanded,
            "wall_time": self.wall_time,
        }


def _qkey(p: Pose) -> tuple[int, int, int]:
    return int(round(p.x / QUANT)), int(round(p.y / QUANT)), p.heading


def _at_goal(q: Pose, goal: Pose, tol: float) -> bool:
    return q.heading == goal.heading and math.hypot(q.x - goal.x, q.y - goal.y) <= tol


def pose_valid(grid: OccupancyGrid, q: Pose, integral: bool = True) -> bool:
    if integral and not (abs(q.x - round(q.x)) <= INT_TOL and abs(q.y - round(q.y)) <= INT_TOL):
        return False
    return grid.free(np.array([[q.x, q.y]]))


def plan(grid: OccupancyGrid, start: Pose, goal: Pose, prims: PrimitiveSet, goal_tol: float = 1e-6,
         max_expansions: Optional[int] = None, check_consistency: bool = False) -> PlanResult:
    """A* from ``start`` to ``goal`` using ``prims`` as successor moves.

    ``g`` is the summed primitive cost and ``h`` the Dubins distance to the
    goal, which no primitive path can beat.  Successors must satisfy the
    integer-coordinate rule (for integral sets) and have a collision-free
    sampled swath.  Ties on ``f`` prefer larger ``g``, then insertion order.
    """
    t0 = time.perf_counter()
    H = prims.n_headings
    for name, q in (("start", start), ("goal", goal)):
        if q.heading is None or not 0 <= q.heading < H:
            raise PlannerError(f"{name} heading must be an index in [0, {H})")
        if not grid.free(np.array([[q.x, q.y]])):
            raise PlannerError(f"{name} is not in a free cell")
    steer = prims.steering

    def h(q: Pose) -> float:
        return max(0.0, steer.cost(q, goal) - goal_tol)

    counter = itertools.count()
    sk = _qkey(start)
    g_best = {sk: 0.0}
    parent: dict[tuple, tuple[tuple, int]] = {}
    poses = {sk: start}
    hs = {sk: h(start)}
    heap = [(hs[sk], -0.0, next(counter), sk)]
    closed: set[tuple] = set()
    expanded = 0
    succ_cache: dict[int, list[tuple[Primitive, int]]] = {}
    while heap:
        f, neg_g, _, k = heapq.heappop(heap)
        if k in closed:
            continue
        g = -neg_g
        if g > g_best[k]:
            continue
        closed.add(k)
        q = poses[k]
        if _at_goal(q, goal, goal_tol):
            seq, path = [], [q]
            while k in parent:
                k, pid = parent[k]
                seq.append(pid)
                path.append(poses[k])
            seq.reverse()
            path.reverse()
            return PlanResult("found", seq, path, g, expanded, time.perf_counter() - t0)
        expanded += 1
        if max_expansions is not None and expanded > max_expansions:
            break
        moves = succ_cache.get(q.heading)
        if moves is None:
            moves = succ_cache[q.heading] = prims.applicable(q.heading)
        for p, rot in moves:
            r = prims.apply(q, p, rot)
            rk = _qkey(r)
            if rk in closed:
                continue
            ng = g + p.cost
            if ng >= g_best.get(rk, math.inf):
                continue
            if not pose_valid(grid, r, prims.integral) or not grid.free(prims.swath(q, p, rot)):
                continue
            if rk not in hs:
                hs[rk] = h(r)
            if check_consistency and hs[k] > p.cost + hs[rk] + 1e-9:
                raise PlannerError(f"inconsistent heuristic at {q} via primitive {p.id}")
            g_best[rk] = ng
            poses[rk] = r
            parent[rk] = (k, p.id)
            heapq.heappush(heap, (ng + hs[rk], -ng, next(counter), rk))
    return PlanResult("no_path", [], [], math.inf, expanded, time.perf_counter() - t0)


def replay(start: Pose, sequence: list[int], prims: PrimitiveSet) -> list[Pose]:
    """Poses visited by executing ``sequence`` from ``start``."""
    out = [start]
    q = start
    for pid in sequence:
        p = prims.by_id(pid)
        d = (q.heading - p.start_heading) % prims.n_headings
        rot = q.heading if prims.step == prims.n_headings else d
        if rot % prims.step and prims.step != prims.n_headings:
            raise PlannerError(f"primitive {pid} does not apply at heading {q.heading}")
        q = prims.apply(q, p, rot)
        out.append(q)
    return out


# -- random problems ---------------------------------------------------

@dataclass
class MapInstance:
    seed: int
    grid: OccupancyGrid
    start: Pose
    goal: Pose


def random_map(seed: int, n_obstacles: int = 20, size: tuple[int, int] = (80, 80), resolution: float = 0.25,
               check: Optional[PrimitiveSet] = None, max_tries: int = 200, min_distance: float = 6.0,
               obstacle_cells: tuple[int, int] = (2, 12)) -> MapInstance:
    """Seeded random map with rectangular obstacles and a start/goal pair.

    Start and goal sit on integer coordinates at least ``min_distance``
    apart.  The map is redrawn until both are free and ``check`` (default:
    the baseline set) finds a path between them.
    """
    check = baseline_set() if check is None else check
    rng = np.random.default_rng(seed)
    w, h = size
    W, Hh = w * resolution, h * resolution
    xs = np.arange(1, int(math.floor(W)))
    ys = np.arange(1, int(math.floor(Hh)))
    if len(xs) < 2 or len(ys) < 2:
        raise PlannerError("map too small for integer start and goal poses")
    for _ in range(max_tries):
        grid = OccupancyGrid.empty(w, h, resolution)
        for _ in range(n_obstacles):
            ow, oh = rng.integers(obstacle_cells[0], obstacle_cells[1] + 1, size=2)
            c0 = int(rng.integers(0, max(w - ow, 1)))
            r0 = int(rng.integers(0, max(h - oh, 1)))
            grid.occupied[r0:r0 + oh, c0:c0 + ow] = True
        grid.__post_init__()
        start = Pose(float(rng.choice(xs)), float(rng.choice(ys)), None, int(rng.integers(check.n_headings)))
        goal = Pose(float(rng.choice(xs)), float(rng.choice(ys)), None, int(rng.integers(check.n_headings)))
        if math.hypot(goal.x - start.x, goal.y - start.y) < min_distance:
            continue
        if not (grid.free(np.array([[start.x, start.y]])) and grid.free(np.array([[goal.x, goal.y]]))):
            continue
        if plan(grid, start, goal, check).status == "found":
            return MapInstance(seed, grid, start, goal)
    raise PlannerError(f"no connected map after {max_tries} draws for seed {seed}")
