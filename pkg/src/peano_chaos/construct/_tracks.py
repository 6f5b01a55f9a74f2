"""Paths inside cells and their conversion into laddered PL moves.

A *path* is a list of oriented segments ``(e, a, b)`` walked in order; a
*move list* is what :func:`peano_chaos.pl_map.lay` consumes.
"""

from __future__ import annotations

import math

import networkx as nx

from .._rational import Q, ZERO
from ..metric_graph import Cell, GraphError, GraphPoint, MetricGraph
from ..pl_map import MapError


def geodesic_path(g: MetricGraph, p: GraphPoint, q: GraphPoint) -> list[tuple]:
    return [s for s in g._geodesic_segments(p, q) if s[1] != s[2]]


def path_length(path) -> object:
    return sum((abs(b - a) for _, a, b in path), ZERO)


def _split_graph(Y: Cell, marks):
    """Multigraph on canonical points, one edge per piece of Y cut at marks."""
    g = Y.graph
    mg = nx.MultiGraph()
    for e, lo, hi in Y.segments:
        if lo == hi:
            mg.add_node(g.point(e, lo))
            continue
        cuts = sorted({lo, hi} | {m.t for m in marks if m.e == e and lo < m.t < hi})
        for a, b in zip(cuts, cuts[1:]):
            mg.add_edge(g.point(e, a), g.point(e, b), key=(e, a, b), weight=b - a)
    for m in marks:
        mg.add_node(m)
    return mg


def _orient(g: MetricGraph, key, x) -> tuple:
    e, a, b = key[:3]
    if g.point(e, a) == x:
        return (e, a, b)
    return (e, b, a)


def cell_walk(Y: Cell, p: GraphPoint, q: GraphPoint, cover: bool = True) -> list[tuple]:
    """A path inside ``Y`` from ``p`` to ``q``; with ``cover`` it visits all of ``Y``.

    The covering walk is an Euler circuit of the doubled piece graph based
    at ``p``, followed by a shortest path to ``q`` inside ``Y``.
    """
    g = Y.graph
    p, q = g.check_point(p), g.check_point(q)
    if not (Y.contains_point(p) and Y.contains_point(q)):
        raise GraphError("walk endpoints must lie in the cell")
    mg = _split_graph(Y, (p, q))
    path = []
    if cover and mg.number_of_edges():
        if not Y.is_connected():
            raise GraphError("a covering walk needs a connected cell")
        doubled = nx.MultiGraph()
        for x, y, key in mg.edges(keys=True):
            doubled.add_edge(x, y, key=key + (0,))
            doubled.add_edge(x, y, key=key + (1,))
        for x, _, key in nx.eulerian_circuit(doubled, source=p, keys=True):
            path.append(_orient(g, key, x))
    if p != q:
        try:
            nodes = nx.dijkstra_path(mg, p, q, weight="weight")
        except nx.NetworkXNoPath as exc:
            raise GraphError("endpoints lie in different components") from exc
        for x, y in zip(nodes, nodes[1:]):
            key = min(mg[x][y], key=lambda k: mg[x][y][k]["weight"])
            path.append(_orient(g, key, x))
    return path


def ladder(path, start: GraphPoint, nbits: int, share) -> list[tuple]:
    """Weighted moves: holds interleaved with ``nbits`` equal chunks of ``path``.

    Traversals get the fraction ``share`` of the domain and the
    ``nbits + 1`` holds split the rest evenly; weights sum to one.
    """
    share = Q(share)
    if not 0 < share < 1:
        raise MapError("share must lie in (0, 1)")
    total = path_length(path)
    if total == 0:
        return [(start.e, start.t, start.t, Q(1))]
    nbits = max(int(nbits), 1)
    hold = (1 - share) / (nbits + 1)
    chunk = total / nbits
    moves = [(start.e, start.t, start.t, hold)]
    done = ZERO
    k = 1
    for e, a, b in path:
        seg = abs(b - a)
        sign = 1 if b > a else -1
        pos = ZERO
        while pos < seg:
            room = min(seg - pos, k * chunk - done)
            x0 = a + sign * pos
            x1 = a + sign * (pos + room)
            moves.append((e, x0, x1, share * room / total))
            pos += room
            done += room
            if done == k * chunk:
                moves.append((e, x1, x1, hold))
                k += 1
    return moves


def bits_for(width, grain) -> int:
    if grain is None:
        return 1
    return max(1, math.ceil(Q(width) / Q(grain)))
