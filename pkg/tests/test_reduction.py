import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtscs.lattice import LatticeError, check_almost_metric, reachable
from mtscs.pose import concat
from mtscs.reduction import (
    GraphSpannerInstance,
    arc_primitive,
    is_graph_spanner,
    min_graph_spanner,
    random_metric_graph,
    reduce_graph_spanner,
)
from mtscs.solver import brute_force, solve_exact
from mtscs.spanner import ControlSet, is_t_spanning


def test_single_arc():
    lat = reduce_graph_spanner(GraphSpannerInstance(2, ((0, 1, 2.5),)))
    assert lat.n == 2
    assert lat.costs[1] == 2.5
    assert lat.edges.tolist() == [[0, 1, 1]]


def test_triangle():
    g = GraphSpannerInstance(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))
    lat = reduce_graph_spanner(g)
    assert lat.n == 4
    ab, bc, ac = (arc_primitive(lat, *e) for e in ((0, 1), (1, 2), (0, 2)))
    assert lat.costs[ac] == 1.0
    assert [ab, ac, bc] in lat.edges.tolist()


def test_positions_follow_the_circle():
    g = GraphSpannerInstance(4, ((0, 1, 1.0), (2, 3, 1.0)))
    lat = reduce_graph_spanner(g)
    p = lat.poses[arc_primitive(lat, 0, 1)]
    assert (p.x, p.y) == pytest.approx((math.cos(math.pi / 4) - 1.0, math.sin(math.pi / 4)))


def test_rejects_bad_graphs():
    with pytest.raises(LatticeError):
        GraphSpannerInstance(2, ((0, 1, 1.0), (0, 1, 2.0)))
    with pytest.raises(LatticeError):
        GraphSpannerInstance(2, ((0, 0, 1.0),))
    with pytest.raises(LatticeError):
        GraphSpannerInstance(2, ((0, 1, 0.0),))


def test_json_round_trip(tmp_path):
    g = GraphSpannerInstance(3, ((0, 1, 1.0), (1, 2, 2.0)), 1.5)
    g.save(tmp_path / "g.json")
    assert GraphSpannerInstance.load(tmp_path / "g.json") == g


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6))
def test_structure(seed, n):
    g = random_metric_graph(np.random.default_rng(seed), n, 0.5)
    if not g.arcs:
        return
    lat = reduce_graph_spanner(g)
    assert g.is_metric()
    assert check_almost_metric(lat) is None
    assert reachable(lat) == set(range(lat.n))
    for u, v in itertools.combinations(range(lat.n), 2):
        a, b = lat.poses[u], lat.poses[v]
        assert math.hypot(a.x - b.x, a.y - b.y) > 1e-9
    for i, j, p in lat.edges:
        r = concat(lat.poses[i], lat.poses[p])
        assert math.hypot(r.x - lat.poses[j].x, r.y - lat.poses[j].y) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5), st.sampled_from([1.0, 1.25, 1.5, 2.0, 3.0]))
def test_same_optimum(seed, n, t):
    g = random_metric_graph(np.random.default_rng(seed), n, 0.6, t=t)
    if not g.arcs:
        return
    lat = reduce_graph_spanner(g)
    q = min_graph_spanner(g)
    assert is_graph_spanner(g, q)
    ex = solve_exact(lat, t)
    assert ex.size == len(q)
    if len(lat.primitives) <= 20:
        assert brute_force(lat, t).size == len(q)
    # the optimal arcs are a t-spanning control set of the lattice too
    assert is_t_spanning(lat, ControlSet([arc_primitive(lat, *g.arcs[k][:2]) for k in q], t))
