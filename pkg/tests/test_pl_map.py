from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import dyadic, graph_points, knot_maps
from peano_chaos.metric_graph import Cell
from peano_chaos.pl_map import (MapError, PieceOverflowError, PLMap, compose, constant,
                                identity, iterate, lay, sup_distance, surjective_traversal,
                                tent, with_pieces)
from peano_chaos.spaces import GOLDEN, interval

interval_segments = st.tuples(dyadic(128), dyadic(128)).map(sorted)


@given(knot_maps(), interval_segments)
def test_image_matches_oracle(knots, seg):
    f = oracles.to_plmap(knots)
    lo, hi = seg
    ylo, yhi = oracles.image(knots, lo, hi)
    assert f.image(Cell(f.graph, [(0, lo, hi)])).segments == ((0, ylo, yhi),)


@given(knot_maps(), dyadic(128))
def test_evaluate_matches_oracle(knots, x):
    f = oracles.to_plmap(knots)
    assert f.evaluate(f.graph.point(0, x)).t == oracles.evaluate(knots, x)


@given(knot_maps(), dyadic(64))
def test_point_preimage(knots, y):
    f = oracles.to_plmap(knots)
    g = f.graph
    pre = f.point_preimage(g.point(0, y))
    for x in oracles.preimage_points(knots, y):
        assert pre.contains_point(g.point(0, x))
    for _, lo, hi in pre.segments:
        for x in (lo, hi, (lo + hi) / 2):
            assert oracles.evaluate(knots, x) == y


@given(knot_maps(), interval_segments)
def test_preimage_is_exact(knots, seg):
    f = oracles.to_plmap(knots)
    target = Cell(f.graph, [(0, *seg)])
    pre = f.preimage(target)
    assert f.image(pre).issubset(target) or pre.is_empty()
    for k in range(65):
        x = F(k, 64)
        inside = seg[0] <= oracles.evaluate(knots, x) <= seg[1]
        assert pre.contains_point(f.graph.point(0, x)) == inside


@given(knot_maps(max_pieces=6), knot_maps(max_pieces=6), dyadic(256))
def test_compose_evaluates_pointwise(k1, k2, x):
    f, g = oracles.to_plmap(k1), oracles.to_plmap(k2)
    g = PLMap(f.graph, g.pieces)
    h = compose(f, g)
    assert h.evaluate(f.graph.point(0, x)).t == oracles.evaluate(k1, oracles.evaluate(k2, x))


@given(knot_maps())
def test_fixed_points_match_linear_solves(knots):
    f = oracles.to_plmap(knots)
    expect = oracles.fixed_points(knots)
    points, segs = f.fixed_points()
    if expect is None:
        assert not segs.is_empty()
    else:
        assert {p.t for p in points} == expect
        assert segs.is_empty()


@given(knot_maps(), knot_maps())
def test_sup_distance_matches_oracle(k1, k2):
    f = oracles.to_plmap(k1)
    g = PLMap(f.graph, oracles.to_plmap(k2).pieces)
    d = sup_distance(f, g)
    assert d.lower == d.upper == oracles.sup_distance(k1, k2)


def _space_with_point(name):
    g = GOLDEN[name]()
    return st.tuples(st.just(g), graph_points(g, den=8))


@given(st.sampled_from(sorted(GOLDEN)).flatmap(_space_with_point))
def test_sup_distance_to_a_constant(data):
    """sup d(x, c) over the graph, bracketed by a grid of Dijkstra distances."""
    g, c = data
    d = F(sup_distance(identity(g), constant(g, c)).upper)
    grid = [g.point(e.index, e.length * k / 64) for e in g.edges for k in range(65)]
    best = max(oracles.graph_distance(g, x, c) for x in grid)
    step = F(max(e.length for e in g.edges)) / 64
    assert best <= d <= best + step / 2


def test_tent_iterates_use_image_tree():
    f7 = iterate(tent(), 7)
    assert len(f7.pieces) == 128
    g = f7.graph
    for j in range(0, 128, 5):
        lo, hi = F(j, 256), F(j + 7, 256)
        img = f7.image(Cell(g, [(0, lo, hi)]))
        ys = [F(int(x * 128) % 2) for x in (F(k, 128) for k in range(129)) if lo < x < hi]
        ylo = min([oracles_tent(7, lo), oracles_tent(7, hi), *ys])
        yhi = max([oracles_tent(7, lo), oracles_tent(7, hi), *ys])
        assert img.segments == ((0, ylo, yhi),)


def oracles_tent(k, x):
    knots = [(F(0), F(0)), (F(1, 2), F(1)), (F(1), F(0))]
    for _ in range(k):
        x = oracles.evaluate(knots, x)
    return x


def test_json_round_trip(space):
    v = space.vertices[0]
    e0 = space.edges[0]
    f = with_pieces(constant(space, space.vertex_point(v)),
                    surjective_traversal(space, e0.id, 0, e0.length / 2, start=v))
    assert f.image(space.whole()).is_whole()
    assert PLMap.from_json(f.to_json()).pieces == f.pieces


def test_discontinuous_maps_rejected():
    g = interval()
    with pytest.raises(MapError):
        PLMap(g, [(0, 0, "1/2", 0, 0, 1), (0, "1/2", 1, 0, 0, 0)])
    with pytest.raises(MapError):
        PLMap(g, [(0, 0, "1/2", 0, 0, 1)])


def test_lay_normalizes_weights():
    pieces = lay(0, 0, 1, [(0, 0, 0, 1), (0, 0, 1, 1)])
    assert [(p.lo, p.hi, p.a, p.b) for p in pieces] == [(0, F(1, 2), 0, 0), (F(1, 2), 1, 0, 1)]


def test_piece_cap():
    with pytest.raises(PieceOverflowError):
        iterate(tent(), 12, cap=1000)


def test_lc_fraction_and_lipschitz():
    g = interval()
    f = PLMap(g, [(0, 0, "1/4", 0, 0, 0), (0, "1/4", "3/4", 0, 0, 1), (0, "3/4", 1, 0, 1, 1)])
    assert f.lc_fraction() == F(1, 2)
    assert f.lipschitz() == 2
    assert f.modulus("1/2") == F(1, 4)
