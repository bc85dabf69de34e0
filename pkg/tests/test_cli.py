import json

import pytest

from mtscs import __version__
from mtscs.cli import main
from mtscs.planner import random_map, save_problem


def run(*args):
    return main([str(a) for a in args])


def test_pipeline(tmp_path, capsys):
    lat = tmp_path / "l1.json"
    assert run("build", "--preset", "L1", "--k", 3, "--R", 0.5, "--out", lat) == 0
    assert len(json.loads(lat.read_text())["vertices"]) == 112
    prim = tmp_path / "p.json"
    assert run("solve", "--lattice", lat, "--t", 1.5, "--mode", "exact", "--out", prim) == 0
    doc = json.loads(prim.read_text())
    assert len(doc["primitive_ids"]) == 9 and doc["status"] == "optimal" and doc["bound"] == 9
    arb = tmp_path / "arb.json"
    assert run("verify", "--lattice", lat, "--primitives", prim, "--arborescence", arb) == 0
    assert "ok" in capsys.readouterr().out
    assert len(json.loads(arb.read_text())["parent"]) == 111
    assert run("verify", "--lattice", lat, "--primitives", prim, "--t", 1.1) == 1


def test_outputs_are_byte_identical(tmp_path):
    for tag in "ab":
        run("build", "--preset", "euclidean2d", "--k", 3, "--out", tmp_path / f"e{tag}.json")
        run("solve", "--lattice", tmp_path / f"e{tag}.json", "--t", 1.1, "--out", tmp_path / f"p{tag}.json")
        run("solve", "--lattice", tmp_path / f"e{tag}.json", "--t", 1.1, "--mode", "export-lp",
            "--lp", tmp_path / f"m{tag}.lp")
    for name in ("e", "p", "m"):
        ext = "lp" if name == "m" else "json"
        assert (tmp_path / f"{name}a.{ext}").read_bytes() == (tmp_path / f"{name}b.{ext}").read_bytes()


def test_modes(tmp_path):
    lat = tmp_path / "sq.json"
    run("build", "--preset", "euclidean2d", "--k", 1, "--out", lat)
    sizes = {}
    for mode in ("exact", "greedy", "brute", "milp"):
        out = tmp_path / f"{mode}.json"
        assert run("solve", "--lattice", lat, "--t", 1.0, "--mode", mode, "--out", out) == 0
        sizes[mode] = len(json.loads(out.read_text())["primitive_ids"])
    assert sizes["exact"] == sizes["brute"] == sizes["milp"] <= sizes["greedy"]


def test_reduction_preset(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"n": 3, "arcs": [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 2.0]], "t": 1.0}))
    out = tmp_path / "r.json"
    assert run("build", "--preset", "reduction", "--graph", g, "--out", out) == 0
    assert len(json.loads(out.read_text())["vertices"]) == 4


def test_plan_and_render(tmp_path, capsys):
    m = random_map(0)
    save_problem(tmp_path / "m.map", m.grid, m.start, m.goal)
    out, svg = tmp_path / "plan.json", tmp_path / "plan.svg"
    assert run("plan", "--grid", tmp_path / "m.map", "--svg", svg, "--out", out) == 0
    assert svg.read_text().startswith("<svg")
    assert json.loads(out.read_text())["status"] == "found"
    assert run("render", "--grid", tmp_path / "m.map", "--plan", out, "--out", tmp_path / "r.svg") == 0
    assert run("render", "--primitives", "baseline", "--out", tmp_path / "b.svg") == 0


def test_bench(tmp_path):
    from mtscs.planner import baseline_set

    a = tmp_path / "a.json"
    a.write_text(json.dumps(baseline_set().to_json()))
    assert run("bench", "--set-a", a, "--maps", 2, "--seed", 7, "--out-dir", tmp_path / "b") == 0
    assert (tmp_path / "b" / "length_ratio.png").exists()


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"preset": "euclidean2d", "k": 2, "out": str(tmp_path / "c.json")}))
    assert run("--config", cfg, "build") == 0
    assert len(json.loads((tmp_path / "c.json").read_text())["vertices"]) == 25
    assert run("--config", cfg, "build", "--k", 1) == 0
    assert len(json.loads((tmp_path / "c.json").read_text())["vertices"]) == 9


def test_exit_codes(tmp_path, capsys):
    assert run("solve") == 2
    assert run("solve", "--lattice", tmp_path / "missing.json", "--t", 1.5) == 2
    assert run("bogus") == 2
    lat = tmp_path / "l.json"
    run("build", "--preset", "euclidean2d", "--k", 1, "--out", lat)
    assert run("solve", "--lattice", lat, "--t", 0.5) == 2
    grid = tmp_path / "w.map"
    grid.write_text("8 4 1.0\n...#....\n...#....\n...#....\n...#....\n")
    assert run("plan", "--grid", grid, "--start", "1,1,0", "--goal", "6,1,0") == 1


def test_version(capsys):
    with pytest.raises(SystemExit):
        from mtscs.cli import build_parser

        build_parser().parse_args(["--version"])
    assert __version__ in capsys.readouterr().out
    assert run("--version") == 0
