"""Decision procedures and replayable certificates for map dynamics.

Every verifier returns a plain result object carrying the evidence it
relied on.  Certificates expose ``replay(f)``, which re-checks the claim
from raw data using only point evaluation, exact images and distances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from ._parallel import pmap
from ._rational import Q, ZERO, fmt
from .cover import CellIndex, Partition, partition
from .metric_graph import Cell, GraphPoint, MetricGraph
from .pl_map import PLMap, compose, iterate

PASS = "PASS"
FAIL = "FAIL"
DEFAULT_SCHEDULE = (Q("1/4"), Q("1/16"), Q("1/64"))
SHRINK = Q("127/128")


def _pt(g: MetricGraph, p: GraphPoint) -> dict:
    return {"edge": g.edges[p.e].id, "offset": fmt(p.t)}


def point_from_json(g: MetricGraph, d) -> GraphPoint:
    return g.point(d["edge"], d["offset"])


def closest_points(a: Cell, b: Cell):
    """A pair (p in a, q in b) realizing the distance between the cells."""
    g = a.graph
    meet = a & b
    if meet:
        p = meet.first_point()
        return p, p
    best = None
    for p in a.points():
        for q in b.points():
            d = g._distance(p, q)
            if best is None or d < best[0]:
                best = (d, p, q)
    return best[1], best[2]


def point_preimage(f: PLMap, z: GraphPoint, within: Cell) -> GraphPoint:
    """First point of ``within`` that ``f`` sends to ``z``."""
    pre = f.preimage(Cell(f.graph, [(z.e, z.t, z.t)]), within=within)
    if pre.is_empty():
        raise ValueError("point has no preimage in the cell")
    return pre.first_point()


# transition graphs -------------------------------------------------------------------------


@dataclass
class TransitionGraph:
    partition: Partition
    delta: object
    images: tuple
    adjacency: tuple  # adjacency[i] = sorted tuple of successor indices

    def matrix(self) -> np.ndarray:
        n = len(self.adjacency)
        m = np.zeros((n, n), dtype=bool)
        for i, succ in enumerate(self.adjacency):
            m[i, list(succ)] = True
        return m

    def digraph(self) -> nx.DiGraph:
        dg = nx.DiGraph()
        dg.add_nodes_from(range(len(self.adjacency)))
        dg.add_edges_from((i, j) for i, succ in enumerate(self.adjacency) for j in succ)
        return dg

    def related(self, i: int, j: int) -> bool:
        return j in self.adjacency[i]


def transition_graph(f: PLMap, p: Partition, delta, index: CellIndex | None = None
                     ) -> TransitionGraph:
    """F -> H iff dist(f(F), H) < delta; delta = 0 means f(F) meets H."""
    delta = Q(delta)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    index = index or CellIndex(p.cells)
    images = tuple(pmap(f.image, p.cells))

    def successors(img: Cell):
        if delta == 0:
            return tuple(index.meeting(img))
        near = index.meeting(img.neighborhood(delta))
        return tuple(j for j in near if img.distance(p.cells[j]) < delta)

    adjacency = tuple(pmap(successors, images))
    return TransitionGraph(p, delta, images, adjacency)


# certificates -------------------------------------------------------------------------------


@dataclass
class ChainCertificate:
    points: tuple
    delta: object

    def replay(self, f: PLMap) -> bool:
        g = f.graph
        return all(g.distance(f.evaluate(x), y) < self.delta
                   for x, y in zip(self.points, self.points[1:]))

    def to_json(self, g: MetricGraph) -> dict:
        return {"delta": fmt(self.delta), "points": [_pt(g, p) for p in self.points]}


@dataclass
class TrappingCertificate:
    L: Cell
    gap: object

    def replay(self, f: PLMap) -> bool:
        L = self.L
        if L.is_empty() or L.is_whole():
            return False
        gap = f.image(L).distance(L.complement_closure())
        return gap == self.gap and gap > 0

    def to_json(self) -> dict:
        return {"L": self.L.to_json(), "gap": fmt(self.gap)}


@dataclass
class ShadowWitness:
    x: GraphPoint
    chain: tuple
    eps: object

    def replay(self, f: PLMap) -> bool:
        g = f.graph
        y = self.x
        for i, xi in enumerate(self.chain):
            if i:
                y = f.evaluate(y)
            if not g.distance(xi, y) < self.eps:
                return False
        return True

    def to_json(self, g: MetricGraph) -> dict:
        return {"x": _pt(g, self.x), "eps": fmt(self.eps),
                "chain": [_pt(g, p) for p in self.chain]}


@dataclass
class PeriodicAtlas:
    orbits: tuple  # (k, tuple of points fixed by f^k)
    fixed_segments: tuple  # (k, Cell of points fixed by f^k)
    density_radius: object
    sample: int

    def points(self) -> set:
        return {p for _, pts in self.orbits for p in pts}

    def replay(self, f: PLMap) -> bool:
        for k, pts in self.orbits:
            h = iterate(f, k)
            if any(h.evaluate(p) != p for p in pts):
                return False
        for k, cell in self.fixed_segments:
            h = iterate(f, k)
            if any(h.evaluate(p) != p for p in cell.points()):
                return False
        return True

    def to_json(self, g: MetricGraph) -> dict:
        return {
            "density_radius": fmt(self.density_radius),
            "sample": self.sample,
            "orbits": [{"k": k, "points": [_pt(g, p) for p in sorted(pts)]}
                       for k, pts in self.orbits],
            "fixed_segments": [{"k": k, "cell": c.to_json()} for k, c in self.fixed_segments],
        }


# chain transitivity --------------------------------------------------------------------------


@dataclass
class CTLevel:
    delta: object
    verdict: str
    cells: int
    threshold: object
    root: int = 0
    out_tree: dict = field(default_factory=dict)  # cell -> (parent, witness in parent)
    in_tree: dict = field(default_factory=dict)  # cell -> (next, witness in cell)
    trapping: Optional[TrappingCertificate] = None
    partition: Optional[Partition] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def chain(self, x: GraphPoint, y: GraphPoint, f: PLMap) -> ChainCertificate:
        """A delta-chain from ``x`` to ``y`` assembled from the two trees."""
        p = self.partition
        first = p.cell_containing(f.evaluate(x))
        last = p.cell_containing(y)
        pts = [x]
        # first -> root along the in-tree
        c = first
        while c != self.root:
            nxt, w = self.in_tree[c]
            pts.append(w)
            c = nxt
        # root -> last along the out-tree, collected backwards
        tail = []
        c = last
        while c != self.root:
            parent, w = self.out_tree[c]
            tail.append(w)
            c = parent
        pts.extend(reversed(tail))
        pts.append(y)
        return ChainCertificate(tuple(pts), self.delta)

    def replay(self, f: PLMap) -> bool:
        g = f.graph
        if self.verdict == FAIL:
            return self.trapping is not None and self.trapping.replay(f)
        cells = self.partition.cells
        if self.partition.mesh >= self.delta - self.threshold:
            return False
        for c, (parent, w) in self.out_tree.items():
            if not cells[parent].contains_point(w):
                return False
            if not f.image(Cell(g, [(w.e, w.t, w.t)])).distance(cells[c]) < self.threshold:
                return False
        for c, (nxt, w) in self.in_tree.items():
            if not cells[c].contains_point(w):
                return False
            if not f.image(Cell(g, [(w.e, w.t, w.t)])).distance(cells[nxt]) < self.threshold:
                return False
        n = len(cells)
        return len(self.out_tree) == n - 1 and len(self.in_tree) == n - 1

    def to_json(self, g: MetricGraph) -> dict:
        out = {"delta": fmt(self.delta), "verdict": self.verdict, "cells": self.cells,
               "threshold": fmt(self.threshold), "mesh": fmt(self.partition.mesh)}
        if self.passed:
            out["root"] = self.root
            out["out_tree"] = {str(c): {"parent": pa, "witness": _pt(g, w)}
                               for c, (pa, w) in sorted(self.out_tree.items())}
            out["in_tree"] = {str(c): {"next": nx_, "witness": _pt(g, w)}
                              for c, (nx_, w) in sorted(self.in_tree.items())}
        else:
            out["trapping"] = self.trapping.to_json()
        return out


@dataclass
class CTReport:
    levels: tuple

    @property
    def verdict(self) -> str:
        return PASS if all(l.passed for l in self.levels) else FAIL

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def trapping(self) -> Optional[TrappingCertificate]:
        for l in self.levels:
            if l.trapping is not None:
                return l.trapping
        return None


def ct_partition(g: MetricGraph, delta) -> Partition:
    """Partition with mesh < delta/4, the resolution used for delta-chains."""
    return partition(g, Q(delta) / 4)


def _witness(f: PLMap, src: Cell, img: Cell, dst: Cell) -> GraphPoint:
    z, _ = closest_points(img, dst)
    return point_preimage(f, z, src)


CT_DIVISORS = (4, 16)


def chain_transitive_at(f: PLMap, delta, p: Partition | None = None) -> CTLevel:
    """Cell-level delta-chain transitivity.

    Cells are linked below ``delta - delta/k`` on a partition of mesh
    ``< delta/k``, which keeps PASS sound.  A FAIL at ``k = 4`` is retried
    at ``k = 16``, where the threshold is closer to ``delta``.
    """
    delta = Q(delta)
    if p is not None:
        return _ct_level(f, delta, p, delta - delta / 4)
    for k in CT_DIVISORS:
        lvl = _ct_level(f, delta, partition(f.graph, delta / k), delta - delta / k)
        if lvl.passed:
            break
    return lvl


def _ct_level(f: PLMap, delta, p: Partition, threshold) -> CTLevel:
    g = f.graph
    tg = transition_graph(f, p, threshold)
    dg = tg.digraph()
    n = len(p.cells)
    if nx.is_strongly_connected(dg):
        root = 0
        out_tree, in_tree = {}, {}
        for parent, child in nx.bfs_edges(dg, root):
            out_tree[child] = (parent, _witness(f, p.cells[parent], tg.images[parent],
                                                p.cells[child]))
        for child, parent in nx.bfs_edges(dg.reverse(copy=False), root):
            # edge parent -> child in the original graph
            in_tree[parent] = (child, _witness(f, p.cells[parent], tg.images[parent],
                                               p.cells[child]))
        return CTLevel(delta, PASS, n, threshold, root, out_tree, in_tree, None, p)
    cond = nx.condensation(dg)
    sinks = sorted(min(cond.nodes[c]["members"]) for c in cond.nodes
                   if cond.out_degree(c) == 0)
    start = sinks[0]
    members = next(cond.nodes[c]["members"] for c in cond.nodes
                   if start in cond.nodes[c]["members"])
    L = Cell(g, [s for i in sorted(members) for s in p.cells[i].segments])
    gap = f.image(L).distance(L.complement_closure())
    return CTLevel(delta, FAIL, n, threshold, trapping=TrappingCertificate(L, gap),
                   partition=p)


def chain_transitive(f: PLMap, schedule: Sequence = DEFAULT_SCHEDULE) -> CTReport:
    schedule = [Q(d) for d in schedule]
    if not schedule:
        raise ValueError("schedule must be nonempty")
    if any(b >= a for a, b in zip(schedule, schedule[1:])) or schedule[-1] <= 0:
        raise ValueError("schedule must be positive and strictly decreasing")
    levels = []
    for d in schedule:
        lvl = chain_transitive_at(f, d)
        levels.append(lvl)
        if not lvl.passed:
            # a trapping set refutes every finer resolution as well
            break
    return CTReport(tuple(levels))


def chain_mixing_length(f: PLMap, delta, horizon: int, p: Partition | None = None,
                        threshold=None) -> Optional[int]:
    """Least n0 with walks of every length in [n0, horizon] joining all cell pairs."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    delta = Q(delta)
    p = p or ct_partition(f.graph, delta)
    threshold = delta - delta / 4 if threshold is None else Q(threshold)
    m = transition_graph(f, p, threshold).matrix().astype(np.int64)
    full = []
    power = m.copy()
    for _ in range(horizon):
        full.append(bool(power.all()))
        power = ((power @ m) > 0).astype(np.int64)
    if not full[-1]:
        return None
    n0 = horizon
    while n0 > 1 and full[n0 - 2]:
        n0 -= 1
    return n0


# LEO, G_n and shadowing ------------------------------------------------------------------------


def leo_order(f: PLMap, c: Cell, k_max: int) -> Optional[int]:
    if c.length() <= 0:
        raise ValueError("cell must have positive length")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    whole = f.graph.whole()
    cur = c
    for k in range(1, k_max + 1):
        cur = f.image(cur)
        if cur == whole:
            return k
    return None


@dataclass
class GnReport:
    verdict: str
    horizon: int
    k0: dict  # (i, j) -> least k0, or None
    failing: Optional[tuple] = None
    gap: object = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "horizon": self.horizon,
               "k0": [[i, j, k] for (i, j), k in sorted(self.k0.items())]}
        if self.failing is not None:
            out["failing_pair"] = list(self.failing)
            out["gap"] = fmt(self.gap)
        return out


def gn_membership(f: PLMap, H: Partition, K: int) -> GnReport:
    if K < 1:
        raise ValueError("horizon must be at least 1")
    index = CellIndex(H.cells)
    n = len(H.cells)

    def row(i):
        hits = []
        cur = H.cells[i]
        for _ in range(K):
            cur = f.image(cur)
            hits.append(set(index.meeting(cur)))
        last = cur
        k0s = {}
        for j in range(n):
            k0 = None
            for k in range(K, 0, -1):
                if j in hits[k - 1]:
                    k0 = k
                else:
                    break
            k0s[j] = k0
        return k0s, last

    rows = pmap(row, range(n))
    table = {}
    failing = None
    gap = None
    for i, (k0s, last) in enumerate(rows):
        for j, k0 in k0s.items():
            table[(i, j)] = k0
            if k0 is None and failing is None:
                failing = (i, j)
                gap = last.distance(H.cells[j])
    verdict = PASS if failing is None else FAIL
    return GnReport(verdict, K, table, failing, gap)


def _prune(A: Cell, beam: Optional[int]) -> Cell:
    """Keep the ``beam`` longest segments; any surviving point still works."""
    if beam is None or len(A.segments) <= beam:
        return A
    keep = sorted(A.segments, key=lambda s: (-(s[2] - s[1]), s))[:beam]
    return Cell(A.graph, keep)


SHADOW_BEAMS = (16, 256, None)


def shadowing_witness(f: PLMap, chain: Sequence[GraphPoint], eps,
                      delta=None, beams: Sequence = SHADOW_BEAMS) -> Optional[ShadowWitness]:
    """Search a true orbit staying eps-close to the chain by nested preimages.

    Working backwards, ``A`` holds the points whose orbit tail shadows the
    chain tail.  Large ``A`` are thinned to their longest segments first;
    the last beam (``None``) runs the exact, unpruned search.
    """
    g = f.graph
    eps = Q(eps)
    chain = tuple(g.check_point(p) for p in chain)
    if delta is not None and not ChainCertificate(chain, Q(delta)).replay(f):
        raise ValueError("the sequence is not a delta-chain of the map")
    top = eps * SHRINK
    for beam in beams:
        for r in (top / 8, top / 2, top):
            A = g.ball(chain[-1], r)
            for x in reversed(chain[:-1]):
                A = f.preimage(_prune(A, beam), within=g.ball(x, r))
                if A.is_empty():
                    break
            if not A.is_empty():
                w = ShadowWitness(A.first_point(), chain, eps)
                if not w.replay(f):
                    raise AssertionError("shadowing witness failed its own replay")
                return w
    return None


def periodic_atlas(f: PLMap, k_max: int, sample: int = 64) -> PeriodicAtlas:
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    g = f.graph
    orbits, segs = [], []
    h = None
    for k in range(1, k_max + 1):
        h = f if h is None else compose(f, h)
        pts, cell = h.fixed_points()
        orbits.append((k, tuple(sorted(pts))))
        if not cell.is_empty():
            segs.append((k, cell))
    everything = Cell(g, [(p.e, p.t, p.t) for _, pts in orbits for p in pts]
                      + [s for _, c in segs for s in c.segments])
    radius = ZERO
    if not everything.is_empty():
        for q in sample_grid(g, sample):
            radius = max(radius, everything.distance_to_point(q))
    return PeriodicAtlas(tuple(orbits), tuple(segs), radius, sample)


def sample_grid(g: MetricGraph, n: int) -> list[GraphPoint]:
    """About ``n`` points spread evenly by arclength across every edge."""
    out = []
    for e in g.edges:
        k = max(1, round(n * e.length / g.total_length))
        out.extend(g.point(e.index, e.length * i / k) for i in range(k + 1))
    return list(dict.fromkeys(out))
