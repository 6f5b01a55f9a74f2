"""Partitions, refinements and interior covers of metric graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ._rational import Q, ZERO, fmt
from .metric_graph import Cell, GraphError, MetricGraph

PARTITION = "PARTITION"
INTERIOR_COVER = "INTERIOR_COVER"


@dataclass(frozen=True)
class Partition:
    graph: MetricGraph
    cells: tuple
    mesh: object
    kind: str = PARTITION
    parent: Optional["Partition"] = field(default=None, repr=False, compare=False)
    parent_index: tuple = ()

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def depth(self) -> int:
        return 0 if self.parent is None else 1 + self.parent.depth()

    def cell_containing(self, p):
        """Index of the first cell (canonical order) containing point ``p``."""
        for i, c in enumerate(self.cells):
            if c.contains_point(p):
                return i
        raise GraphError(f"no cell contains {p!r}")

    def to_json(self) -> dict:
        out = {
            "schema": 1,
            "kind": self.kind,
            "mesh": fmt(self.mesh),
            "cells": [c.to_json() for c in self.cells],
        }
        if self.parent is not None:
            out["parent_index"] = list(self.parent_index)
        return out


@dataclass(frozen=True)
class InteriorCover:
    graph: MetricGraph
    cells: tuple
    mesh: object
    lebesgue: object
    private_parts: tuple  # open segments (e, lo, hi), one per cell
    base: Partition = field(repr=False, compare=False, default=None)

    def private_cell(self, i) -> Cell:
        """Closure of the ``i``-th private part."""
        e, lo, hi = self.private_parts[i]
        return Cell(self.graph, [(e, lo, hi)])

    def to_json(self) -> dict:
        g = self.graph
        return {
            "schema": 1,
            "kind": INTERIOR_COVER,
            "mesh": fmt(self.mesh),
            "lebesgue": fmt(self.lebesgue),
            "cells": [c.to_json() for c in self.cells],
            "private_parts": [
                {"edge": g.edges[e].id, "lo": fmt(lo), "hi": fmt(hi), "open": True}
                for e, lo, hi in self.private_parts
            ],
        }


def _slices(length, eps) -> int:
    """Smallest k with length / k < eps."""
    k = math.floor(length / eps) + 1
    return max(k, 1)


def _mesh(cells) -> object:
    return max(c.diameter() for c in cells)


def partition(g: MetricGraph, eps) -> Partition:
    """Uniform edge slicing into cells of diameter < ``eps``."""
    eps = Q(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if g.diameter() < eps:
        whole = g.whole()
        return Partition(g, (whole,), whole.diameter())
    cells = []
    for e in g.edges:
        k = _slices(e.length, eps)
        step = e.length / k
        cells.extend(Cell(g, [(e.index, step * i, step * (i + 1))]) for i in range(k))
    return Partition(g, tuple(cells), _mesh(cells))


CutAdjust = Callable[[int, object, object, object], object]


def refine(p: Partition, eps, adjust: CutAdjust | None = None) -> Partition:
    """Slice every cell of ``p`` into pieces of diameter < ``eps``.

    ``adjust(e, t, lo, hi)`` may move each interior cut ``t`` anywhere in
    the open window ``(lo, hi)`` of a quarter slice on either side; slices
    are then made at two thirds of the size so the moved cuts still
    respect the mesh bound.
    """
    eps = Q(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps >= p.mesh:
        raise ValueError(f"refine needs eps < mesh ({fmt(p.mesh)})")
    g = p.graph
    target = eps * 2 / 3 if adjust else eps
    cells, parents = [], []
    for pi, cell in enumerate(p.cells):
        for e, lo, hi in cell.segments:
            if lo == hi:
                continue
            k = _slices(hi - lo, target)
            step = (hi - lo) / k
            cuts = [lo + step * i for i in range(k + 1)]
            if adjust:
                for i in range(1, k):
                    t = adjust(e, cuts[i], cuts[i] - step / 4, cuts[i] + step / 4)
                    if not cuts[i] - step / 4 < t < cuts[i] + step / 4:
                        raise ValueError("cut adjustment left its window")
                    cuts[i] = t
            for a, b in zip(cuts, cuts[1:]):
                cells.append(Cell(g, [(e, a, b)]))
                parents.append(pi)
    mesh = _mesh(cells)
    if mesh >= eps:
        raise AssertionError("refinement missed its mesh bound")
    return Partition(g, tuple(cells), mesh, PARTITION, p, tuple(parents))


def refinement_chain(g: MetricGraph, n: int) -> list[Partition]:
    """H_1, ..., H_n with mesh H_k < 2^-k, each refining the previous."""
    chain = [partition(g, Q("1/2"))]
    for k in range(2, n + 1):
        # a level may already beat 2^-k; keep the meshes strictly decreasing
        chain.append(refine(chain[-1], min(Q(1) / 2**k, chain[-1].mesh * 3 / 4)))
    return chain


def _distance_profile(cell: Cell, e: int):
    """Affine components of s -> d(point(e, s), cell) on edge ``e``.

    Returns (lines, ivs): the distance is min over ``lines`` (slope, icept)
    outside the closed intervals ``ivs`` where it vanishes.
    """
    g = cell.graph
    edge = g.edges[e]
    ivs = cell.restrict(e)
    lines = [
        (1, cell.distance_to_point(g.point(e, 0))),
        (-1, edge.length + cell.distance_to_point(g.point(e, edge.length))),
    ]
    for lo, hi in ivs:
        lines.append((1, -hi))
        lines.append((-1, lo))
    return lines, ivs


def lebesgue_number(g: MetricGraph, cells) -> object:
    """min over x of max over cells F of d(x, cl(X \\ F)), computed exactly."""
    comps = [c.complement_closure() for c in cells]
    best = None
    for edge in g.edges:
        relevant = [c for c, cell in zip(comps, cells) if cell.restrict(edge.index)]
        cand = {ZERO, edge.length}
        all_lines = []
        for c in relevant:
            lines, ivs = _distance_profile(c, edge.index)
            for lo, hi in ivs:
                cand.update((lo, hi))
            all_lines.extend(lines)
        all_lines = list(set(all_lines))
        for i in range(len(all_lines)):
            m1, b1 = all_lines[i]
            for j in range(i + 1, len(all_lines)):
                m2, b2 = all_lines[j]
                if m1 != m2:
                    s = (b2 - b1) / (m1 - m2)
                    if 0 <= s <= edge.length:
                        cand.add(s)
        for s in cand:
            pt = g.point(edge.index, s)
            val = max((c.distance_to_point(pt) for c in relevant), default=ZERO)
            if best is None or val < best:
                best = val
    return best


def interior_cover(g: MetricGraph, delta) -> InteriorCover:
    """Fattened partition whose interiors cover ``g``, with private parts."""
    delta = Q(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if g.diameter() < delta:
        whole = g.whole()
        e = max(g.edges, key=lambda e: e.length)
        # no complement: the Lebesgue number is encoded as the diameter bound
        return InteriorCover(g, (whole,), whole.diameter(), g.diameter(),
                             ((e.index, ZERO, e.length),))
    base = partition(g, delta / 2)
    shortest = min(c.length() for c in base.cells)
    r = min(delta / 8, shortest / 4)
    cells = tuple(c.neighborhood(r) for c in base.cells)
    privates = []
    for c in base.cells:
        e, lo, hi = max(c.segments, key=lambda s: s[2] - s[1])
        privates.append((e, lo + r, hi - r))
    lam = lebesgue_number(g, cells)
    return InteriorCover(g, cells, _mesh(cells), lam, tuple(privates), base)


class CellIndex:
    """Per-edge interval index over the cells of a family, for overlap queries."""

    def __init__(self, cells):
        self.cells = tuple(cells)
        by_edge: dict[int, list] = {}
        for i, c in enumerate(self.cells):
            for e, lo, hi in c.segments:
                by_edge.setdefault(e, []).append((lo, hi, i))
        self._by_edge = {}
        for e, items in by_edge.items():
            items.sort()
            run = ZERO
            maxhi = []
            for lo, hi, _ in items:
                run = max(run, hi)
                maxhi.append(run)
            self._by_edge[e] = (items, [it[0] for it in items], maxhi)

    def meeting(self, query: Cell) -> list[int]:
        """Indices of cells meeting ``query`` (closed sets, contact counts)."""
        from bisect import bisect_left, bisect_right

        hits = set()
        for e in {s[0] for s in query.segments} | {
                ei for v in query.covered_vertices for ei in query.graph.incident[v]}:
            entry = self._by_edge.get(e)
            if entry is None:
                continue
            items, los, maxhi = entry
            for lo, hi in query.restrict(e):
                j = bisect_right(los, hi)
                i = bisect_left(maxhi, lo)
                for k in range(i, j):
                    a, b, idx = items[k]
                    if b >= lo and a <= hi:
                        hits.add(idx)
        return sorted(hits)
