"""Command-line entry point: ``mtscs {build,solve,verify,plan,bench,render}``.

Exit status is 0 on success, 1 for domain failures (infeasible instance,
no path, failed verification) and 2 for usage errors.  Results go to
files; standard output carries a short human summary.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, presets
from .lattice import Lattice, LatticeError
from .planner import (
    OccupancyGrid,
    PlannerError,
    PlanResult,
    PrimitiveSet,
    baseline_set,
    load_problem,
    parse_pose,
    plan,
)
from .reduction import GraphSpannerInstance, random_metric_graph, reduce_graph_spanner
from .spanner import ControlSet, SpannerError, extract_arborescence, is_t_spanning
from .solver import (
    ModelError,
    SolverError,
    brute_force,
    build_model,
    export_lp,
    greedy_control_set,
    solve_exact,
    solve_milp,
)


class UsageError(Exception):
    pass


DOMAIN_ERRORS = (LatticeError, SpannerError, SolverError, ModelError, PlannerError)


def _dump(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


# -- build -------------------------------------------------------------

def _cmd_build(args) -> int:
    p = args.preset
    if p in ("L1", "L2", "L1-closure"):
        lat = presets.PRESETS[p](args.k, args.R, args.validity)
    elif p == "planning":
        lat = presets.planning_lattice(args.k, args.R)
    elif p in ("euclidean2d", "euclidean3d"):
        lat = presets.euclidean(args.k, 2 if p == "euclidean2d" else 3)
    elif p == "reduction":
        if args.graph:
            g = GraphSpannerInstance.load(args.graph)
        else:
            rng = np.random.default_rng(args.seed)
            g = random_metric_graph(rng, args.graph_vertices, args.density, t=args.t or 1.0)
        lat = reduce_graph_spanner(g)
    else:
        raise UsageError(f"unknown preset {p!r}")
    lat.save(args.out)
    print(f"lattice {p}: {lat.n} vertices, {len(lat.edges)} edges, {len(lat.roots)} root(s) -> {args.out}")
    return 0


# -- solve -------------------------------------------------------------

def _primitive_doc(lat: Lattice, control: ControlSet, status: str, bound: int, **extra) -> dict:
    return control.to_json(lat, status=status, bound=bound, **extra)


def _cmd_solve(args) -> int:
    lat = Lattice.load(args.lattice)
    t = args.t
    if t is None:
        raise UsageError("--t is required")
    mode = args.mode
    if mode == "export-lp":
        model = build_model(lat, t, tighten=not args.no_tighten)
        out = args.lp or args.out or "model.lp"
        export_lp(model, out)
        fam = model.family_counts()
        print(f"LP model: {model.n_vars} variables, {len(model.rows)} rows {fam} -> {out}")
        return 0
    if mode == "greedy":
        cs = greedy_control_set(lat, t)
        status, bound, info = "feasible", 0, ""
    elif mode == "brute":
        r = brute_force(lat, t)
        cs, status, bound, info = r.control_set, r.status, r.lower_bound, ""
    elif mode == "exact":
        r = solve_exact(lat, t, node_limit=args.node_limit, time_limit=args.time_limit)
        cs, status, bound = r.control_set, r.status, r.lower_bound
        info = f", {r.nodes_explored} nodes, {r.wall_time:.2f} s"
    elif mode == "milp":
        model = build_model(lat, t, tighten=not args.no_tighten)
        sol = solve_milp(model, args.time_limit)
        if sol.values is None:
            print(f"MILP solver status: {sol.status}")
            return 1
        cs = ControlSet(frozenset(sol.selected(model)), t)
        status = sol.status
        bound = int(round(sol.objective)) if status == "optimal" else 0
        info = f", {sol.wall_time:.2f} s"
    else:
        raise UsageError(f"unknown mode {mode!r}")
    if status == "infeasible":
        print("infeasible: some vertex is unreachable even with every primitive")
        return 1
    check = is_t_spanning(lat, cs)
    if not check:
        print(f"internal check failed: {check.witness}")
        return 1
    if args.out:
        _dump(_primitive_doc(lat, cs, status, bound, mode=mode), args.out)
    print(f"{mode}: |E| = {len(cs)} ({status}, lower bound {bound}{info})"
          + (f" -> {args.out}" if args.out else ""))
    return 0


# -- verify ------------------------------------------------------------

def _cmd_verify(args) -> int:
    lat = Lattice.load(args.lattice)
    cs = ControlSet.load(args.primitives)
    if args.t is not None:
        cs = ControlSet(cs.primitive_ids, args.t)
    cs.validate(lat)
    res = is_t_spanning(lat, cs)
    if not res:
        print(f"FAIL t={cs.t:g}: {res.witness}")
        return 1
    print(f"ok: {len(cs)} primitives {cs.t:g}-span {lat.n} vertices")
    if args.arborescence:
        _dump(extract_arborescence(lat, cs).to_json(), args.arborescence)
        print(f"arborescence -> {args.arborescence}")
    return 0


# -- plan / bench ------------------------------------------------------

def _load_set(source: Optional[str]) -> PrimitiveSet:
    if source in (None, "baseline", "baseline8"):
        return baseline_set()
    return PrimitiveSet.load(source)


def _cmd_plan(args) -> int:
    grid, start, goal = load_problem(args.grid)
    if args.footprint:
        grid = OccupancyGrid(grid.width, grid.height, grid.resolution, grid.occupied, args.footprint)
    start = parse_pose(args.start) if args.start else start
    goal = parse_pose(args.goal) if args.goal else goal
    if start is None or goal is None:
        raise UsageError("start and goal must come from flags or the map's JSON sidecar")
    prims = _load_set(args.primitives)
    res = plan(grid, start, goal, prims, goal_tol=args.goal_tol, max_expansions=args.max_expansions)
    if args.out:
        doc = res.to_json()
        doc.pop("wall_time")
        doc["primitives"] = args.primitives
        _dump(doc, args.out)
    if args.svg:
        from .render import render_plan, write

        write(render_plan(grid, prims, res, start, goal), args.svg)
    if res.status != "found":
        print(f"no path ({res.nodes_expanded} expansions)")
        return 1
    print(f"found: length {res.length:.4f}, {len(res.primitive_sequence)} primitives, "
          f"{res.nodes_expanded} expansions, {res.wall_time * 1000:.1f} ms")
    return 0


def _cmd_bench(args) -> int:
    from .bench import run_bench
    from .report import write_report

    a = _load_set(args.set_a)
    b = _load_set(args.set_b)
    rep = run_bench(a, b, args.maps, args.seed, args.threads, n_obstacles=args.obstacles,
                    size=(args.size, args.size), resolution=args.resolution)
    print(rep.table())
    if args.out_dir:
        for p in write_report(rep, args.out_dir, args.delimiter):
            print(f"wrote {p}")
    return 0


# -- render ------------------------------------------------------------

def _cmd_render(args) -> int:
    from . import render

    if args.grid:
        grid, start, goal = load_problem(args.grid)
        res = None
        source = args.primitives
        if args.plan:
            doc = json.loads(Path(args.plan).read_text())
            source = source or doc.get("primitives")
            res = PlanResult(doc["status"], doc["primitive_sequence"],
                             [parse_pose(p) for p in doc["pose_sequence"]], doc["length"],
                             doc["nodes_expanded"], 0.0)
            if res.pose_sequence:
                start, goal = res.pose_sequence[0], res.pose_sequence[-1]
        prims = _load_set(source)
        if start is None or goal is None:
            raise UsageError("render --grid needs a JSON sidecar or a --plan file")
        text = render.render_plan(grid, prims, res, start, goal)
    elif args.lattice:
        lat = Lattice.load(args.lattice)
        cs = ControlSet.load(args.primitives) if args.primitives else None
        text = render.render_lattice(lat, cs)
    elif args.primitives:
        text = render.render_primitives(_load_set(args.primitives))
    else:
        raise UsageError("render needs --lattice, --primitives or --grid")
    render.write(text, args.out)
    print(f"svg -> {args.out}")
    return 0


# -- parser ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mtscs", description="Minimum t-spanning control sets for state lattices.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", help="JSON file of option defaults; explicit flags override it")
    ap.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    ap.add_argument("--threads", type=int, default=1, help="worker processes where supported")
    # the same two options are accepted after the subcommand name as well
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="build a lattice file")
    b.add_argument("--preset", default="L1",
                   choices=["L1", "L2", "L1-closure", "planning", "euclidean2d", "euclidean3d", "reduction"])
    b.add_argument("--k", type=int, default=3)
    b.add_argument("--R", type=float, default=0.5)
    b.add_argument("--validity", choices=["endpoint", "swath"], default="endpoint")
    b.add_argument("--graph", help="graph instance JSON for --preset reduction")
    b.add_argument("--graph-vertices", type=int, default=5)
    b.add_argument("--density", type=float, default=0.5)
    b.add_argument("--t", type=float)
    b.add_argument("--out", default="lattice.json")
    b.set_defaults(func=_cmd_build)

    s = sub.add_parser("solve", parents=[common], help="compute a t-spanning control set")
    s.add_argument("--lattice", required=True)
    s.add_argument("--t", type=float)
    s.add_argument("--mode", choices=["exact", "greedy", "brute", "export-lp", "milp"], default="exact")
    s.add_argument("--time-limit", type=float)
    s.add_argument("--node-limit", type=int)
    s.add_argument("--no-tighten", action="store_true", help="omit the z >= c bounds from the MILP")
    s.add_argument("--lp", help="LP output path for --mode export-lp")
    s.add_argument("--out")
    s.set_defaults(func=_cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check that a primitive set t-spans a lattice")
    v.add_argument("--lattice", required=True)
    v.add_argument("--primitives", required=True)
    v.add_argument("--t", type=float)
    v.add_argument("--arborescence")
    v.set_defaults(func=_cmd_verify)

    p = sub.add_parser("plan", parents=[common], help="A* on an occupancy grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--primitives", default="baseline")
    p.add_argument("--start")
    p.add_argument("--goal")
    p.add_argument("--goal-tol", type=float, default=1e-6)
    p.add_argument("--max-expansions", type=int)
    p.add_argument("--footprint", type=float, default=0.0)
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plan)

    c = sub.add_parser("bench", parents=[common], help="compare two primitive sets on random maps")
    c.add_argument("--set-a", required=True)
    c.add_argument("--set-b", default="baseline")
    c.add_argument("--maps", type=int, default=40)
    c.add_argument("--obstacles", type=int, default=20)
    c.add_argument("--size", type=int, default=80, help="map side in cells")
    c.add_argument("--resolution", type=float, default=0.25)
    c.add_argument("--delimiter", default=",")
    c.add_argument("--out-dir")
    c.set_defaults(func=_cmd_bench)

    r = sub.add_parser("render", parents=[common], help="write an SVG drawing")
    r.add_argument("--lattice")
    r.add_argument("--primitives")
    r.add_argument("--grid")
    r.add_argument("--plan")
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_render)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    pre, _ = ap.parse_known_args(argv)
    if not pre.config:
        return ap.parse_args(argv)
    try:
        cfg = json.loads(Path(pre.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {pre.config}: {exc}") from exc
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    ap.set_defaults(**{k: v for k, v in cfg.items() if k in ("seed", "threads")})
    for action in ap._subparsers._group_actions:
        for subp in action.choices.values():
            subp.set_defaults(**cfg)
            # a config value satisfies a required option
            for a in subp._actions:
                if a.required and a.dest in cfg:
                    a.required = False
    return ap.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        if getattr(args, "t", None) is not None and args.t < 1.0:
            raise UsageError("--t must be at least 1")
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"mtscs: error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"mtscs: error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"mtscs: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
