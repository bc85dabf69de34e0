"""Head-to-head comparison of two primitive sets on seeded random maps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .planner import MapInstance, PlannerError, PrimitiveSet, plan, random_map


@dataclass
class BenchRecord:
    map_index: int
    seed: int
    start: list
    goal: list
    length_a: float
    length_b: float
    time_a: float
    time_b: float
    nodes_a: int
    nodes_b: int

    @property
    def length_ratio(self) -> float:
        return self.length_a / self.length_b if self.length_b > 0 else 1.0

    @property
    def time_ratio(self) -> float:
        return self.time_a / self.time_b if self.time_b > 0 else math.nan

    @property
    def node_ratio(self) -> float:
        return self.nodes_a / self.nodes_b if self.nodes_b > 0 else 1.0

    def row(self) -> dict:
        d = asdict(self)
        d.update(length_ratio=self.length_ratio, time_ratio=self.time_ratio, node_ratio=self.node_ratio)
        return d


@dataclass
class BenchReport:
    name_a: str
    name_b: str
    seed: int
    records: list[BenchRecord]

    def mean(self, attr: str) -> float:
        vals = [getattr(r, attr) for r in self.records]
        return float(np.nanmean(vals)) if vals else math.nan

    def summary(self) -> dict:
        return {
            "set_a": self.name_a,
            "set_b": self.name_b,
            "seed": self.seed,
            "maps": len(self.records),
            "length_ratio_avg": self.mean("length_ratio"),
            "time_ratio_avg": self.mean("time_ratio"),
            "node_ratio_avg": self.mean("node_ratio"),
        }

    def table(self) -> str:
        lines = [f"{'map':>4} {'L_a':>9} {'L_b':>9} {'L_a/L_b':>8} {'T_a/T_b':>8} {'N_a/N_b':>8}"]
        for r in self.records:
            lines.append(f"{r.map_index:>4} {r.length_a:>9.3f} {r.length_b:>9.3f} "
                         f"{r.length_ratio:>8.3f} {r.time_ratio:>8.3f} {r.node_ratio:>8.3f}")
        s = self.summary()
        lines.append(f" avg {'':>9} {'':>9} {s['length_ratio_avg']:>8.3f} "
                     f"{s['time_ratio_avg']:>8.3f} {s['node_ratio_avg']:>8.3f}")
        return "\n".join(lines)


def map_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def make_maps(n_maps: int, seed: int, **map_kw) -> list[MapInstance]:
    return [random_map(map_seed(seed, i), **map_kw) for i in range(n_maps)]


def _run_one(args) -> BenchRecord:
    index, inst, a_doc, b_doc = args
    a = PrimitiveSet.from_json(a_doc)
    b = PrimitiveSet.from_json(b_doc)
    ra = plan(inst.grid, inst.start, inst.goal, a)
    rb = plan(inst.grid, inst.start, inst.goal, b)
    for name, r in (("a", ra), ("b", rb)):
        if r.status != "found":
            raise PlannerError(f"set {name} found no path on map {index} (seed {inst.seed})")
    return BenchRecord(index, inst.seed, inst.start.to_list(), inst.goal.to_list(), ra.length, rb.length,
                       ra.wall_time, rb.wall_time, ra.nodes_expanded, rb.nodes_expanded)


def bench(set_a: PrimitiveSet, set_b: PrimitiveSet, maps: list[MapInstance], seed: int = 0,
          workers: int = 1) -> BenchReport:
    """Plan every map with both sets; ratios are always ``a / b``.

    Each search runs single-threaded; with ``workers > 1`` maps are spread
    over a process pool, so timings stay per-search.
    """
    jobs = [(i, m, set_a.to_json(), set_b.to_json()) for i, m in enumerate(maps)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    return BenchReport(set_a.name or "a", set_b.name or "b", seed, records)


def run_bench(set_a: PrimitiveSet, set_b: PrimitiveSet, n_maps: int = 40, seed: int = 7,
              workers: int = 1, check: Optional[PrimitiveSet] = None, **map_kw) -> BenchReport:
    maps = make_maps(n_maps, seed, check=check, **map_kw)
    return bench(set_a, set_b, maps, seed, workers)
