"""Locally constant surjections and staircase approximations."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .._rational import Q, ZERO
from ..metric_graph import Cell, GraphPoint, MetricGraph
from ..pl_map import MapError, Piece, PLMap, lay
from ._tracks import bits_for, cell_walk, geodesic_path, ladder


class ConstructionError(RuntimeError):
    """A construction could not meet its contract; ``clause`` names the check."""

    def __init__(self, message: str, clause: str | None = None):
        super().__init__(message)
        self.clause = clause


def _pin(table: dict, p: GraphPoint, value: GraphPoint, what: str):
    old = table.get(p)
    if old is not None and old != value:
        raise MapError(f"conflicting values pinned at {p!r} ({what})")
    table[p] = value


def surjective_lc(g: MetricGraph, K: Cell | None = None,
                  anchors: Sequence[tuple[GraphPoint, GraphPoint]] = (),
                  y0: GraphPoint | None = None, eta="1/8", *,
                  onto_cells: Iterable[Cell] | None = None, grain=None) -> PLMap:
    """A continuous surjection, constant on most of the space.

    ``K`` (a finite point set) is sent to ``y0`` and each anchor ``x`` to its
    ``y``.  Between consecutive pinned knots the map holds, walks, holds;
    one leg per cell of ``onto_cells`` (or a single leg overall) walks
    around the whole graph, so those cells are mapped onto ``X``.
    Traversals use at most ``eta / 2`` of every leg's domain.
    """
    eta = Q(eta)
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    K = K if K is not None else Cell(g, [])
    if K.length() > 0:
        raise MapError("K must be nowhere dense (a finite point set)")
    pinned: dict[GraphPoint, GraphPoint] = {}
    k_points = K.points()
    if k_points:
        if y0 is None:
            raise MapError("y0 is required when K is nonempty")
        y0 = g.check_point(y0)
        for p in k_points:
            _pin(pinned, p, y0, "K")
    for x, y in anchors:
        x, y = g.check_point(x), g.check_point(y)
        if K.contains_point(x):
            raise MapError(f"anchor {x!r} lies in K")
        _pin(pinned, x, y, "anchor")
    default = g.vertex_point(g.vertices[0])

    onto = list(onto_cells) if onto_cells is not None else None
    marks: dict[int, set] = {e.index: {ZERO, e.length} for e in g.edges}
    for p in pinned:
        v = g.vertex_of(p)
        if v is None:
            marks[p.e].add(p.t)
    for c in onto or ():
        for e, lo, hi in c.segments:
            marks[e].update((lo, hi))

    def value(e, t):
        return pinned.get(g.point(e, t), default)

    whole = g.whole()
    share = eta / 2
    pieces: list[Piece] = []
    pending = [c for c in onto] if onto is not None else None
    covered_once = False
    for edge in g.edges:
        cuts = sorted(marks[edge.index])
        for lo, hi in zip(cuts, cuts[1:]):
            a, b = value(edge.index, lo), value(edge.index, hi)
            cover = False
            if pending is None:
                cover = not covered_once
                covered_once = True
            else:
                leg = Cell(g, [(edge.index, lo, hi)])
                for c in pending:
                    if leg.issubset(c):
                        pending.remove(c)
                        cover = True
                        break
            path = cell_walk(whole, a, b, cover=True) if cover else geodesic_path(g, a, b)
            moves = ladder(path, a, bits_for(hi - lo, grain), share)
            pieces.extend(lay(edge.index, lo, hi, moves))
    if pending:
        raise MapError("onto cells must be unions of edge segments of positive length")
    return PLMap(g, pieces)


def lc_approx(f: PLMap, eps, eta) -> PLMap:
    """A staircase within ``eps`` of ``f`` with plateau share at least ``1 - eta``.

    Every non-constant piece is cut into steps moving the image by at
    most ``eps / 2``; each step holds for a ``1 - eta`` fraction and then
    climbs.
    """
    eps, eta = Q(eps), Q(eta)
    if eps <= 0 or eta <= 0:
        raise ValueError("eps and eta must be positive")
    if f.lc_fraction() >= 1 - eta:
        return f
    eta = min(eta, Q("1/2"))
    out = []
    for p in f.pieces:
        if p.constant:
            out.append(p)
            continue
        steps = max(1, math.ceil(abs(p.b - p.a) / (eps / 2)))
        w = p.width / steps
        for j in range(steps):
            s0 = p.lo + w * j
            s1 = p.hi if j == steps - 1 else s0 + w
            t0, t1 = p.at(s0), p.at(s1)
            mid = s0 + (s1 - s0) * (1 - eta)
            out.append(Piece(p.e, s0, mid, p.te, t0, t0))
            out.append(Piece(p.e, mid, s1, p.te, t0, t1))
    return PLMap(f.graph, out)
