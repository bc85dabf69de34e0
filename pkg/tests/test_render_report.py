import xml.etree.ElementTree as ET

import pytest

from mtscs.bench import bench, make_maps
from mtscs.planner import baseline_set, plan, random_map
from mtscs.render import Viewport, render_lattice, render_plan, render_primitives
from mtscs.report import write_report
from mtscs.solver import solve_exact

NS = "{http://www.w3.org/2000/svg}"


def test_viewport():
    v = Viewport(0.0, 0.0, 10.0, 5.0, scale=20.0, margin=10.0)
    assert v.size == (220.0, 120.0)
    assert v.px(0.0, 0.0) == (10.0, 110.0)
    assert v.px(10.0, 5.0) == (210.0, 10.0)


def test_plan_svg():
    m = random_map(1)
    b = baseline_set()
    r = plan(m.grid, m.start, m.goal, b)
    text = render_plan(m.grid, b, r, m.start, m.goal)
    root = ET.fromstring(text)
    assert root.tag == NS + "svg"
    assert len(root.findall(NS + "polyline")) >= len(r.primitive_sequence)
    assert text == render_plan(m.grid, b, r, m.start, m.goal)


def test_primitive_and_lattice_svg(l1_lattice):
    ET.fromstring(render_primitives(baseline_set()))
    r = solve_exact(l1_lattice, 1.5)
    root = ET.fromstring(render_lattice(l1_lattice, r.control_set))
    assert len(root.findall(NS + "polyline")) == 9


def test_identical_sets_ratio_one(tmp_path):
    b = baseline_set()
    rep = bench(b, b, make_maps(3, 1), seed=1)
    assert all(r.length_ratio == 1.0 and r.node_ratio == 1.0 for r in rep.records)
    files = write_report(rep, tmp_path, delimiter=";")
    assert [f.name for f in files] == ["bench.csv", "bench.json", "length_ratio.png", "expansions.png"]
    head = (tmp_path / "bench.csv").read_text().splitlines()[0]
    assert head.startswith("map_index;seed;start")
    assert rep.summary()["length_ratio_avg"] == pytest.approx(1.0)
