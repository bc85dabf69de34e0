import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtscs import presets
from mtscs.lattice import check_almost_metric
from mtscs.spanner import (
    ControlSet,
    SpannerError,
    extract_arborescence,
    is_t_spanning,
    restricted_distances,
)

from oracles import random_lattice


def _axis_units(lat):
    return [lat.index_of(type(lat.poses[0])(x, y)) for x, y in ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))]


def test_full_set_gives_costs(l1_lattice):
    d = restricted_distances(l1_lattice, l1_lattice.primitives)
    assert all(d[v] == pytest.approx(l1_lattice.costs[v]) for v in range(l1_lattice.n))
    assert is_t_spanning(l1_lattice, ControlSet(l1_lattice.primitives, 1.0))


def test_chain_distance(chain):
    d = restricted_distances(chain, [1])
    assert d[3] == 3.0 and d[0] == 0.0


def test_unreachable_marker(chain):
    d = restricted_distances(chain, [2])
    assert d[1] is None and d[3] is None and d[2] == 2.0


def test_axis_units_witness():
    lat = presets.euclidean(3)
    E = ControlSet(_axis_units(lat), 1.3)
    res = is_t_spanning(lat, E)
    assert not res
    w = res.witness
    assert abs(lat.poses[w.vertex].x) == 1.0 and abs(lat.poses[w.vertex].y) == 1.0
    assert w.distance == pytest.approx(2.0)
    assert w.bound == pytest.approx(1.3 * math.sqrt(2))
    assert is_t_spanning(lat, ControlSet(E.primitive_ids, 1.4143))


def test_control_set_validation(l1_lattice):
    with pytest.raises(SpannerError):
        ControlSet([1], 0.9)
    with pytest.raises(SpannerError):
        ControlSet([0], 1.5).validate(l1_lattice)
    with pytest.raises(SpannerError):
        ControlSet([10_000], 1.5).validate(l1_lattice)


def test_chain_arborescence(chain):
    arb = extract_arborescence(chain, [1])
    assert arb.edges() == [(0, 1, 1), (1, 2, 1), (2, 3, 1)]
    assert arb.path_to(3) == [(0, 1, 1), (1, 2, 1), (2, 3, 1)]


def test_full_set_star(l1_lattice):
    arb = extract_arborescence(l1_lattice, l1_lattice.primitives)
    assert all(u == 0 and p == v for v, (u, p) in arb.parent.items())


def test_arborescence_unreachable(chain):
    with pytest.raises(SpannerError, match="vertex 2"):
        extract_arborescence(chain, [2])


def _check_arborescence(lat, E):
    arb = extract_arborescence(lat, E)
    d = restricted_distances(lat, E)
    assert len(arb.parent) == lat.n - len(lat.roots)
    for v in range(lat.n):
        assert arb.z[v] == d[v]
    for v, (u, p) in arb.parent.items():
        assert arb.z[v] == arb.z[u] + lat.costs[p]
        assert arb.z[v] > arb.z[u]
        assert not lat.is_root(v)
    for v in arb.parent:  # acyclic: every walk up ends at a root
        seen = set()
        while v in arb.parent:
            assert v not in seen
            seen.add(v)
            v = arb.parent[v][0]
        assert lat.is_root(v)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 14))
def test_random_arborescence(seed, n):
    lat = random_lattice(np.random.default_rng(seed), n)
    _check_arborescence(lat, lat.primitives)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 14), st.data())
def test_monotone_and_lower_bound(seed, n, data):
    lat = random_lattice(np.random.default_rng(seed), n)
    prims = lat.primitives
    e2 = data.draw(st.sets(st.sampled_from(prims)))
    e1 = data.draw(st.sets(st.sampled_from(sorted(e2)))) if e2 else set()
    d1 = restricted_distances(lat, e1)
    d2 = restricted_distances(lat, e2)
    for v in range(lat.n):
        if d1[v] is not None:
            assert d2[v] is not None and d2[v] <= d1[v] + 1e-12
        if d2[v] is not None:
            assert d2[v] >= lat.costs[v] - 1e-9


def test_round_trip(tmp_path, l1_lattice):
    import json

    E = ControlSet([1, 5, 9], 1.5)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(E.to_json(l1_lattice)))
    back = ControlSet.load(path)
    assert back == E
    doc = E.to_json(l1_lattice)
    assert doc["primitive_ids"] == [2, 6, 10]
    assert check_almost_metric(l1_lattice) is None
