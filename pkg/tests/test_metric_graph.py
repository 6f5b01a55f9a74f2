from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SPACE_NAMES, graph_points
from oracles import graph_distance
from peano_chaos.metric_graph import Cell, GraphError, MetricGraph
from peano_chaos.spaces import GOLDEN


def points_on(name):
    g = GOLDEN[name]()
    return st.tuples(st.just(g), graph_points(g), graph_points(g), graph_points(g))


spaces_and_points = st.sampled_from(SPACE_NAMES).flatmap(points_on)


@given(spaces_and_points)
def test_distance_matches_dijkstra(data):
    g, p, q, _ = data
    assert F(g.distance(p, q)) == graph_distance(g, p, q)


@given(spaces_and_points)
def test_metric_axioms(data):
    g, p, q, r = data
    assert g.distance(p, q) == g.distance(q, p)
    assert (g.distance(p, q) == 0) == (p == q)
    assert g.distance(p, r) <= g.distance(p, q) + g.distance(q, r)


@given(spaces_and_points)
def test_geodesic_realizes_distance(data):
    g, p, q, _ = data
    arc = g.geodesic(p, q)
    assert arc.contains_point(p) and arc.contains_point(q)
    assert arc.is_connected()
    assert arc.length() == g.distance(p, q)


@given(spaces_and_points, st.integers(0, 16))
def test_ball_is_exact(data, k):
    g, c, p, _ = data
    r = g.diameter() * k / 16
    assert g.ball(c, r).contains_point(p) == (g.distance(c, p) <= r)


def test_vertex_points_are_canonical():
    g = GOLDEN["triod"]()
    ends = {g.point(e.index, 0) for e in g.edges}
    assert len(ends) == 1
    assert g.vertex_of(ends.pop()) == "o"


def test_golden_diameters():
    expect = {"interval": 1, "circle": F(1, 2), "triod": 2}
    for name, d in expect.items():
        assert GOLDEN[name]().diameter() == d


def test_cell_normalization_and_algebra():
    g = GOLDEN["interval"]()
    a = Cell(g, [(0, 0, "1/4"), (0, "1/8", "1/2"), (0, "3/4", "3/4")])
    assert a.segments == ((0, 0, F(1, 2)), (0, F(3, 4), F(3, 4)))
    assert not a.is_connected()
    b = Cell(g, [(0, "1/4", 1)])
    assert a.intersection(b).segments == ((0, F(1, 4), F(1, 2)), (0, F(3, 4), F(3, 4)))
    assert a.union(b).is_whole()
    assert Cell(g, [(0, 0, "1/4")]).distance(Cell(g, [(0, "1/2", 1)])) == F(1, 4)
    assert Cell(g, [(0, "1/4", "1/2")]).complement_closure().segments == (
        (0, 0, F(1, 4)), (0, F(1, 2), 1))


def test_cell_json_round_trip(space):
    c = space.ball(space.vertex_point(space.vertices[0]), F(1, 3))
    assert Cell.from_json(space, c.to_json()) == c
    assert MetricGraph.from_json(space.to_json()) == space


@pytest.mark.parametrize("edges", [
    [("e", "a", "b", 0)],
    [("e", "a", "z", 1)],
    [("e", "a", "b", 1), ("e", "b", "a", 1)],
])
def test_bad_graphs_rejected(edges):
    with pytest.raises(GraphError):
        MetricGraph(["a", "b"], edges)


def test_disconnected_graph_rejected():
    with pytest.raises(GraphError):
        MetricGraph(["a", "b", "c", "d"], [("e0", "a", "b", 1), ("e1", "c", "d", 1)])
