import numpy as np
import pytest

from mtscs import presets
from mtscs.lattice import Lattice
from mtscs.solver import ModelError, build_model, export_lp, solve_exact, solve_milp
from mtscs.solver.model import solve_lp_file


def test_chain_model(chain):
    m = build_model(chain, 1.5)
    assert len(m.y_ids) == 3 and len(m.edges) == 6
    assert m.family_counts() == {"xy": 6, "cost": 6, "span": 3, "tree": 3}
    e = [k for k, (i, j, p) in enumerate(m.edges) if (i, j, p) == (1, 2, 1)][0]
    assert m.big_m[e] == pytest.approx(1.5 - 1.0)


def test_root_edges_have_zero_m(l1_lattice):
    m = build_model(l1_lattice, 1.5)
    root = m.edges[:, 0] == 0
    assert np.allclose(m.big_m[root], 0.0)
    assert np.all(m.big_m >= -1e-12)
    assert m.upper[m.z_slice][0] == 0.0


def test_refuses_non_metric(chain):
    costs = chain.costs.copy()
    costs[3] = 10.0
    with pytest.raises(ModelError):
        build_model(Lattice(chain.poses, costs, chain.edges), 1.5)


def test_lp_text(chain, tmp_path):
    text = export_lp(build_model(chain, 1.0), tmp_path / "c.lp")
    assert text.startswith("\\")
    for head in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
        assert f"\n{head}\n" in text or text.endswith(f"{head}\n")
    assert " obj: y_2 + y_3 + y_4" in text
    assert "x_2_3" in text and "z_1 = 0" in text
    assert (tmp_path / "c.lp").read_text() == text


def test_lp_round_trip(chain, tmp_path):
    export_lp(build_model(chain, 1.0), tmp_path / "c.lp")
    sol = solve_lp_file(tmp_path / "c.lp")
    assert sol.status == "optimal" and sol.objective == pytest.approx(1.0)


def test_empty_model(tmp_path):
    lat = Lattice([presets.Pose(0.0, 0.0)], np.zeros(1), np.zeros((0, 3)))
    m = build_model(lat, 1.0)
    text = export_lp(m, tmp_path / "e.lp")
    assert "End" in text
    assert solve_milp(m).objective == 0.0
    assert solve_lp_file(tmp_path / "e.lp").status == "optimal"


def test_milp_matches_search(unit_square, chain):
    for lat in (unit_square, chain, presets.l1(2, 0.5)):
        for t in (1.0, 1.5):
            m = build_model(lat, t)
            sol = solve_milp(m)
            assert round(sol.objective) == solve_exact(lat, t).size


def test_inactive_cost_rows(l1_lattice):
    m = build_model(l1_lattice, 1.5)
    sol = solve_milp(m)
    x = sol.values[m.x_slice]
    z = sol.values[m.z_slice]
    c = l1_lattice.costs
    for e, (i, j, p) in enumerate(m.edges):
        if x[e] < 0.5:
            # with z_i <= t c_i and z_j >= c_j the row holds with slack >= 0
            slack = m.big_m[e] - c[p] - (z[i] - z[j] + m.big_m[e] * x[e])
            assert slack >= -1e-6
    # one parent per non-root vertex
    for j in l1_lattice.primitives:
        assert sum(x[e] for e in np.flatnonzero(m.edges[:, 1] == j)) == pytest.approx(1.0)


def test_l1_export_t3(l1_lattice, tmp_path):
    export_lp(build_model(l1_lattice, 3.0), tmp_path / "l1.lp")
    sol = solve_lp_file(tmp_path / "l1.lp", time_limit=600)
    assert sol.status == "optimal" and round(sol.objective) == 6
