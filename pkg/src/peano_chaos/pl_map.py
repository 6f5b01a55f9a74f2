"""Exact piecewise-linear self-maps of a metric graph.

A map is stored as pieces ``(e, lo, hi, te, a, b)``: on edge ``e`` the
domain interval ``[lo, hi]`` is sent affinely onto the offsets ``a -> b`` of
target edge ``te``.  A piece with ``a == b`` is constant.  A traversal of a
longer edge path is simply several consecutive pieces, so every piece lands
inside a single edge and images stay cheap to compute.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from ._rational import Q, ZERO, fmt
from .metric_graph import Cell, GraphError, GraphPoint, MetricGraph

DEFAULT_PIECE_CAP = 10**6


class MapError(ValueError):
    """Discontinuous, non-covering or otherwise invalid map data."""


class PieceOverflowError(RuntimeError):
    """A composition exceeded the configured piece budget."""


@dataclass(frozen=True)
class Piece:
    e: int
    lo: object
    hi: object
    te: int
    a: object
    b: object

    @property
    def constant(self) -> bool:
        return self.a == self.b

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def speed(self):
        return abs(self.b - self.a) / (self.hi - self.lo)

    def at(self, s):
        """Target offset at domain offset ``s``."""
        if self.a == self.b:
            return self.a
        return self.a + (self.b - self.a) * (s - self.lo) / (self.hi - self.lo)

    def inverse(self, t):
        """Domain offset mapped to target offset ``t`` (non-constant pieces)."""
        return self.lo + (t - self.a) * (self.hi - self.lo) / (self.b - self.a)


@dataclass(frozen=True)
class MapDistance:
    lower: object
    upper: object

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper


def _mergeable(p: Piece, q: Piece) -> bool:
    if p.e != q.e or p.hi != q.lo or p.te != q.te:
        return False
    if p.constant and q.constant:
        return p.a == q.a
    if p.constant or q.constant:
        return False
    return p.b == q.a and (p.b - p.a) * q.width == (q.b - q.a) * p.width


class PLMap:
    """A continuous piecewise-linear self-map; immutable once built."""

    def __init__(self, graph: MetricGraph, pieces: Iterable, *, check: bool = True):
        self.graph = graph
        raw = []
        for p in pieces:
            if not isinstance(p, Piece):
                p = Piece(*p)
            p = Piece(p.e, Q(p.lo), Q(p.hi), p.te, Q(p.a), Q(p.b))
            if p.lo >= p.hi:
                raise MapError("pieces need positive width")
            if p.constant:
                # canonical target representation for constants
                c = graph.point(p.te, p.a)
                p = Piece(p.e, p.lo, p.hi, c.e, c.t, c.t)
            raw.append(p)
        raw.sort(key=lambda p: (p.e, p.lo))
        merged: list[Piece] = []
        for p in raw:
            if merged and _mergeable(merged[-1], p):
                m = merged[-1]
                merged[-1] = Piece(m.e, m.lo, p.hi, m.te, m.a, p.b)
            else:
                merged.append(p)
        self.pieces = tuple(merged)
        self._los: dict[int, list] = {}
        self._edge_pieces: dict[int, list[Piece]] = {}
        for p in self.pieces:
            self._edge_pieces.setdefault(p.e, []).append(p)
        for e, ps in self._edge_pieces.items():
            self._los[e] = [p.lo for p in ps]
        if check:
            self._validate()

    # validation -----------------------------------------------------------------

    def _validate(self):
        g = self.graph
        at_vertex: dict[str, GraphPoint] = {}
        for edge in g.edges:
            ps = self._edge_pieces.get(edge.index)
            if not ps:
                raise MapError(f"edge {edge.id!r} is not covered")
            if ps[0].lo != 0 or ps[-1].hi != edge.length:
                raise MapError(f"edge {edge.id!r} is not covered")
            for p, q in zip(ps, ps[1:]):
                if p.hi != q.lo:
                    raise MapError(f"gap or overlap on edge {edge.id!r} at {fmt(p.hi)}")
                if self._value(p, p.hi) != self._value(q, q.lo):
                    raise MapError(f"discontinuity on edge {edge.id!r} at {fmt(p.hi)}")
            for vert, piece, s in ((edge.u, ps[0], ZERO), (edge.v, ps[-1], edge.length)):
                val = self._value(piece, s)
                if at_vertex.setdefault(vert, val) != val:
                    raise MapError(f"discontinuity at vertex {vert!r}")

    def is_continuous(self) -> bool:
        try:
            self._validate()
        except MapError:
            return False
        return True

    # evaluation -------------------------------------------------------------------

    def _value(self, piece: Piece, s) -> GraphPoint:
        return self.graph.point(piece.te, piece.at(s))

    def piece_at(self, p: GraphPoint) -> Piece:
        ps = self._edge_pieces[p.e]
        i = bisect_right(self._los[p.e], p.t) - 1
        return ps[max(i, 0)]

    def __call__(self, p: GraphPoint) -> GraphPoint:
        return self.evaluate(p)

    def evaluate(self, p: GraphPoint) -> GraphPoint:
        p = self.graph.check_point(p)
        return self._value(self.piece_at(p), p.t)

    def pieces_on(self, e: int, lo, hi) -> list[Piece]:
        """Pieces of edge ``e`` whose domain meets ``[lo, hi]``."""
        ps = self._edge_pieces[e]
        los = self._los[e]
        i = max(bisect_right(los, lo) - 1, 0)
        j = bisect_right(los, hi)
        return [p for p in ps[i:j] if p.hi >= lo]

    def __eq__(self, other):
        return (isinstance(other, PLMap) and self.graph == other.graph
                and self.pieces == other.pieces)

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return f"PLMap({len(self.pieces)} pieces)"

    # quantities ---------------------------------------------------------------------

    def lc_fraction(self):
        const = sum((p.width for p in self.pieces if p.constant), ZERO)
        return const / self.graph.total_length

    def lipschitz(self):
        return max((p.speed for p in self.pieces), default=ZERO)

    def modulus(self, eps):
        eps = Q(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        return eps / max(self.lipschitz(), 1)

    def plateaus(self) -> list[Piece]:
        return [p for p in self.pieces if p.constant]

    # sets -----------------------------------------------------------------------------

    def image(self, c: Cell) -> Cell:
        if c.graph is not self.graph:
            raise GraphError("cell lives on a different graph")
        out = []
        for e, lo, hi in c.segments:
            ps = self._edge_pieces[e]
            if len(ps) > _TREE_MIN:
                out.extend(self._tree(e).query(lo, hi))
                continue
            for p in self.pieces_on(e, lo, hi):
                s0, s1 = max(lo, p.lo), min(hi, p.hi)
                if s0 > s1:
                    continue
                out.append((p.te, p.at(s0), p.at(s1)))
        return Cell(self.graph, out)

    def _tree(self, e: int) -> "_ImageTree":
        trees = self.__dict__.setdefault("_trees", {})
        t = trees.get(e)
        if t is None:
            t = trees[e] = _ImageTree(self._edge_pieces[e], self._los[e])
        return t

    def _target_index(self):
        """Per target edge, buckets of pieces whose target range meets each bucket."""
        idx = self.__dict__.get("_tindex")
        if idx is None:
            by_edge: dict[int, list] = {}
            for p in self.pieces:
                by_edge.setdefault(p.te, []).append(p)
            idx = {}
            for te, ps in by_edge.items():
                length = self.graph.edges[te].length
                nb = min(max(len(ps), 1), 4096)
                buckets = [[] for _ in range(nb)]
                for p in ps:
                    lo, hi = min(p.a, p.b), max(p.a, p.b)
                    for k in range(_bucket(lo, length, nb), _bucket(hi, length, nb) + 1):
                        buckets[k].append(p)
                idx[te] = (length, nb, buckets)
            self._tindex = idx
        return idx

    def point_preimage(self, q: GraphPoint) -> Cell:
        """Exact ``f^{-1}(q)`` via an index over piece targets."""
        g = self.graph
        q = g.check_point(q)
        v = g.vertex_of(q)
        targets = [(q.e, q.t)]
        if v is not None:
            for ei in g.incident[v]:
                edge = g.edges[ei]
                if edge.u == v:
                    targets.append((ei, ZERO))
                if edge.v == v:
                    targets.append((ei, edge.length))
        idx = self._target_index()
        out = []
        for te, t in targets:
            entry = idx.get(te)
            if entry is None:
                continue
            length, nb, buckets = entry
            for p in buckets[_bucket(t, length, nb)]:
                if min(p.a, p.b) <= t <= max(p.a, p.b):
                    if p.constant:
                        out.append((p.e, p.lo, p.hi))
                    else:
                        s = p.inverse(t)
                        out.append((p.e, s, s))
        return Cell(g, out)

    def image_point_set(self, points: Iterable[GraphPoint]) -> set:
        return {self.evaluate(p) for p in points}

    def preimage(self, c: Cell, within: Cell | None = None) -> Cell:
        """Exact ``f^{-1}(c)``, optionally intersected with ``within``."""
        g = self.graph
        if c.graph is not g:
            raise GraphError("cell lives on a different graph")
        if within is not None:
            cands = []
            for e, lo, hi in within.segments:
                cands.extend(self.pieces_on(e, lo, hi))
            cands = list(dict.fromkeys(cands))
        else:
            cands = self.pieces
        restricted: dict[int, list] = {}
        out = []
        for p in cands:
            ivs = restricted.get(p.te)
            if ivs is None:
                ivs = restricted[p.te] = c.restrict(p.te)
            if not ivs:
                continue
            if p.constant:
                if c.contains_point(g.point(p.te, p.a)):
                    out.append((p.e, p.lo, p.hi))
                continue
            lo_t, hi_t = min(p.a, p.b), max(p.a, p.b)
            i = max(bisect_right(ivs, (lo_t, lo_t)) - 1, 0)
            for x, y in ivs[i:]:
                if x > hi_t:
                    break
                x, y = max(x, lo_t), min(y, hi_t)
                if x <= y:
                    out.append((p.e, p.inverse(x), p.inverse(y)))
        res = Cell(g, out)
        if within is not None:
            res = res & within
        return res

    def fixed_points(self):
        """Isolated fixed points and fixed segments, as (points, cell)."""
        g = self.graph
        points = set()
        segs = []
        for p in self.pieces:
            if p.constant:
                c = g.point(p.te, p.a)
                if p.te == p.e and p.lo <= p.a <= p.hi:
                    points.add(c)
                else:
                    # a constant at a vertex may sit at an end of this piece
                    for s in (p.lo, p.hi):
                        if g.point(p.e, s) == c:
                            points.add(c)
                continue
            for s in (p.lo, p.hi):
                q = g.point(p.e, s)
                if self._value(p, s) == q:
                    points.add(q)
            if p.te != p.e:
                continue
            slope = (p.b - p.a) / (p.hi - p.lo)
            if slope == 1:
                if p.a == p.lo:
                    segs.append((p.e, p.lo, p.hi))
                continue
            # a + slope (s - lo) = s
            s = (p.a - slope * p.lo) / (1 - slope)
            if p.lo <= s <= p.hi:
                points.add(g.point(p.e, s))
        return points, Cell(g, segs)

    # serialization -----------------------------------------------------------------------

    def to_json(self, include_space: bool = True) -> dict:
        g = self.graph
        body = []
        for p in self.pieces:
            seg = {"edge": g.edges[p.e].id, "lo": fmt(p.lo), "hi": fmt(p.hi)}
            if p.constant:
                act = {"constant": {"edge": g.edges[p.te].id, "offset": fmt(p.a)}}
            else:
                act = {"traverse": [{"edge": g.edges[p.te].id,
                                     "from": fmt(p.a), "to": fmt(p.b)}]}
            body.append({"segment": seg, "action": act})
        out = {"schema": 1, "map": body}
        if include_space:
            out["space"] = g.to_json()
        return out

    @classmethod
    def from_json(cls, data, graph: MetricGraph | None = None) -> "PLMap":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        if isinstance(data, dict):
            if graph is None:
                if "space" not in data:
                    raise MapError("map JSON lacks a space and none was given")
                graph = MetricGraph.from_json(data["space"])
            body = data.get("map")
        else:
            body = data
        if graph is None or not isinstance(body, list):
            raise MapError("malformed map JSON")
        pieces = []
        try:
            for item in body:
                seg = item["segment"]
                e = graph.edge(seg["edge"]).index
                lo, hi = Q(seg["lo"]), Q(seg["hi"])
                act = item["action"]
                if "constant" in act:
                    pt = act["constant"]
                    te = graph.edge(pt["edge"]).index
                    t = Q(pt["offset"])
                    pieces.append((e, lo, hi, te, t, t))
                elif "traverse" in act:
                    moves = [(graph.edge(m["edge"]).index, Q(m["from"]), Q(m["to"]))
                             for m in act["traverse"]]
                    pieces.extend(lay(e, lo, hi, moves))
                else:
                    raise MapError("action must be constant or traverse")
        except (KeyError, TypeError, GraphError) as exc:
            raise MapError(f"malformed map JSON: {exc}") from exc
        return cls(graph, pieces)


_TREE_MIN = 48


def _bucket(t, length, nb) -> int:
    return min(int(t * nb / length), nb - 1)


def _merge_raw(segs):
    """Sort and merge raw (e, lo, hi) tuples; cheap stand-in for Cell()."""
    segs = sorted(segs)
    out = []
    for e, lo, hi in segs:
        if out and out[-1][0] == e and lo <= out[-1][2]:
            if hi > out[-1][2]:
                out[-1] = (e, out[-1][1], hi)
        else:
            out.append((e, lo, hi))
    return out


class _ImageTree:
    """Segment tree over the pieces of one edge, storing merged images."""

    def __init__(self, pieces, los):
        self.pieces = pieces
        self.los = los
        n = len(pieces)
        size = 1
        while size < n:
            size *= 2
        self.size = size
        self.nodes = [()] * (2 * size)
        for i, p in enumerate(pieces):
            a, b = (p.a, p.b) if p.a <= p.b else (p.b, p.a)
            self.nodes[size + i] = ((p.te, a, b),)
        for i in range(size - 1, 0, -1):
            left, right = self.nodes[2 * i], self.nodes[2 * i + 1]
            if not right:
                self.nodes[i] = left
            elif not left:
                self.nodes[i] = right
            else:
                self.nodes[i] = tuple(_merge_raw(left + right))

    def query(self, lo, hi):
        ps = self.pieces
        i = max(bisect_right(self.los, lo) - 1, 0)
        j = bisect_right(self.los, hi) - 1
        out = []
        # partial pieces at both ends, whole pieces in between
        for k in {i, j}:
            p = ps[k]
            s0, s1 = max(lo, p.lo), min(hi, p.hi)
            if s0 <= s1:
                a, b = p.at(s0), p.at(s1)
                out.append((p.te, min(a, b), max(a, b)))
        a, b = i + 1 + self.size, j + self.size
        while a < b:
            if a & 1:
                out.extend(self.nodes[a])
                a += 1
            if b & 1:
                b -= 1
                out.extend(self.nodes[b])
            a //= 2
            b //= 2
        return out


# construction helpers ------------------------------------------------------------------


def lay(e: int, lo, hi, moves: Sequence) -> list[Piece]:
    """Lay a sequence of moves onto the domain ``[lo, hi]`` of edge ``e``.

    A move is ``(te, a, b)`` or ``(te, a, b, w)``; domain widths are
    proportional to ``w``, which defaults to the move's length.  Holds
    (``a == b``) must carry an explicit positive weight.
    """
    lo, hi = Q(lo), Q(hi)
    norm = []
    for m in moves:
        te, a, b = m[0], Q(m[1]), Q(m[2])
        w = Q(m[3]) if len(m) > 3 else abs(b - a)
        if w < 0:
            raise MapError("negative move weight")
        if w == 0:
            if a != b:
                raise MapError("a traversal needs positive weight")
            continue
        norm.append((te, a, b, w))
    total = sum((m[3] for m in norm), ZERO)
    if total == 0 or lo >= hi:
        raise MapError("nothing to lay")
    out = []
    cursor = lo
    acc = ZERO
    for i, (te, a, b, w) in enumerate(norm):
        acc += w
        nxt = hi if i == len(norm) - 1 else lo + (hi - lo) * acc / total
        out.append(Piece(e, cursor, nxt, te, a, b))
        cursor = nxt
    return out


def identity(g: MetricGraph) -> PLMap:
    return PLMap(g, [(e.index, 0, e.length, e.index, 0, e.length) for e in g.edges])


def constant(g: MetricGraph, c: GraphPoint) -> PLMap:
    c = g.check_point(c)
    return PLMap(g, [(e.index, 0, e.length, c.e, c.t, c.t) for e in g.edges])


def tent(g: MetricGraph | None = None) -> PLMap:
    """The full tent map on the unit interval."""
    from .spaces import interval

    g = g or interval()
    if len(g.edges) != 1 or g.edges[0].length != 1 or g.edges[0].is_loop:
        raise MapError("the tent map needs the unit interval")
    half = Q("1/2")
    return PLMap(g, [(0, 0, half, 0, 0, 1), (0, half, 1, 0, 1, 0)])


def euler_walk(g: MetricGraph, start: str | None = None) -> list[tuple[int, str, str]]:
    """A closed walk using every edge at least once, as (edge, from, to).

    The graph's own circuit is used when every degree is even; otherwise
    every edge is doubled, which always yields an Eulerian multigraph.
    """
    mg = nx.MultiGraph()
    mg.add_nodes_from(g.vertices)
    for e in g.edges:
        mg.add_edge(e.u, e.v, key=(e.index, 0))
    if not nx.is_eulerian(mg):
        for e in g.edges:
            mg.add_edge(e.u, e.v, key=(e.index, 1))
    start = start if start is not None else g.vertices[0]
    walk = []
    for x, y, key in nx.eulerian_circuit(mg, source=start, keys=True):
        walk.append((key[0], x, y))
    return walk


def walk_moves(g: MetricGraph, walk) -> list[tuple]:
    """Turn an (edge, from, to) vertex walk into offset moves."""
    moves = []
    for ei, x, y in walk:
        e = g.edges[ei]
        if e.is_loop or x == e.u and (y == e.v):
            moves.append((ei, ZERO, e.length))
        else:
            moves.append((ei, e.length, ZERO))
    return moves


def surjective_traversal(g: MetricGraph, e, lo, hi, start: str | None = None) -> list[Piece]:
    """Pieces on ``[lo, hi]`` of edge ``e`` whose image is the whole graph."""
    e = g.edge(e).index
    if Q(hi) <= Q(lo):
        raise MapError("segment needs positive length")
    return lay(e, lo, hi, walk_moves(g, euler_walk(g, start)))


def with_pieces(f: PLMap, replacement: Sequence[Piece]) -> PLMap:
    """Replace ``f`` on the domains covered by ``replacement``."""
    spans: dict[int, list] = {}
    for p in replacement:
        spans.setdefault(p.e, []).append((p.lo, p.hi))
    starts = {}
    for e in spans:
        spans[e].sort()
        starts[e] = [lo for lo, _ in spans[e]]
    out = list(replacement)
    for p in f.pieces:
        cut = spans.get(p.e)
        if not cut:
            out.append(p)
            continue
        i = max(bisect_right(starts[p.e], p.lo) - 1, 0)
        cursor = p.lo
        for lo, hi in cut[i:]:
            if lo >= p.hi:
                break
            if hi <= cursor:
                continue
            if lo > cursor:
                out.append(Piece(p.e, cursor, lo, p.te, p.at(cursor), p.at(lo)))
            cursor = max(cursor, hi)
        if cursor < p.hi:
            out.append(Piece(p.e, cursor, p.hi, p.te, p.at(cursor), p.b))
    return PLMap(f.graph, out)


# algebra ---------------------------------------------------------------------------------


def compose(f: PLMap, g: PLMap, cap: int = DEFAULT_PIECE_CAP) -> PLMap:
    """The composite ``f o g`` on the common refinement."""
    if f.graph is not g.graph:
        raise GraphError("maps live on different graphs")
    G = f.graph
    out: list[Piece] = []
    for p in g.pieces:
        if p.constant:
            q = f.evaluate(G.point(p.te, p.a))
            out.append(Piece(p.e, p.lo, p.hi, q.e, q.t, q.t))
        else:
            t0, t1 = min(p.a, p.b), max(p.a, p.b)
            fps = f.pieces_on(p.te, t0, t1)
            if p.a > p.b:
                fps = fps[::-1]
            for fp in fps:
                x, y = max(t0, fp.lo), min(t1, fp.hi)
                if x >= y:
                    continue
                if p.a > p.b:
                    x, y = y, x
                s0, s1 = p.inverse(x), p.inverse(y)
                out.append(Piece(p.e, s0, s1, fp.te, fp.at(x), fp.at(y)))
        if len(out) > 2 * cap:
            raise PieceOverflowError(f"composition exceeds {cap} pieces")
    h = PLMap(G, out, check=False)
    if len(h.pieces) > cap:
        raise PieceOverflowError(f"composition has {len(h.pieces)} pieces (cap {cap})")
    return h


def iterate(f: PLMap, k: int, cap: int = DEFAULT_PIECE_CAP) -> PLMap:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return identity(f.graph)
    h = f
    for _ in range(k - 1):
        h = compose(f, h, cap)
    return h


def _forms(G: MetricGraph, te: int, a0, a1):
    """Distances from a point moving affinely on edge te to each vertex end.

    Returns [(vertex, c0, c1)] where the distance to that end is the affine
    function c0 + (c1 - c0) * u for u in [0, 1].
    """
    e = G.edges[te]
    return [(e.u, a0, a1), (e.v, e.length - a0, e.length - a1)]


def _max_min_1d(lines):
    """max over u in [0,1] of min of affine lines (c0 + (c1-c0) u)."""
    cands = {ZERO, Q(1)}
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            a0, a1 = lines[i]
            b0, b1 = lines[j]
            den = (a1 - a0) - (b1 - b0)
            if den != 0:
                u = (b0 - a0) / den
                if 0 < u < 1:
                    cands.add(u)
    return max(min(c0 + (c1 - c0) * u for c0, c1 in lines) for u in cands)


def sup_distance(f: PLMap, g: PLMap, tol=None) -> MapDistance:
    """Exact supremum distance; the bracket returned has zero width."""
    if f.graph is not g.graph:
        raise GraphError("maps live on different graphs")
    G = f.graph
    best = ZERO
    for edge in G.edges:
        cuts = sorted({p.lo for p in f._edge_pieces[edge.index]}
                      | {p.lo for p in g._edge_pieces[edge.index]} | {edge.length})
        for s0, s1 in zip(cuts, cuts[1:]):
            mid = (s0 + s1) / 2
            pf = f.piece_at(GraphPoint(edge.index, mid))
            pg = g.piece_at(GraphPoint(edge.index, mid))
            fa, fb = pf.at(s0), pf.at(s1)
            ga, gb = pg.at(s0), pg.at(s1)
            routes = []
            for vf, c0, c1 in _forms(G, pf.te, fa, fb):
                for vg, d0, d1 in _forms(G, pg.te, ga, gb):
                    D = G.vdist(vf, vg)
                    routes.append((c0 + d0 + D, c1 + d1 + D))
            if pf.te == pg.te:
                # direct along-edge distance |f - g|, split where it vanishes
                d0, d1 = fa - ga, fb - gb
                pieces = [(ZERO, Q(1))]
                if d0 * d1 < 0:
                    z = d0 / (d0 - d1)
                    pieces = [(ZERO, z), (z, Q(1))]
                for u0, u1 in pieces:
                    w0, w1 = d0 + (d1 - d0) * u0, d0 + (d1 - d0) * u1
                    sgn = 1 if (w0 + w1) >= 0 else -1
                    lines = [(r0 + (r1 - r0) * u0, r0 + (r1 - r0) * u1) for r0, r1 in routes]
                    lines.append((sgn * w0, sgn * w1))
                    best = max(best, _max_min_1d(lines))
            else:
                best = max(best, _max_min_1d(routes))
    return MapDistance(best, best)


def subcell_with_image(f: PLMap, c: Cell, target: Cell) -> Cell:
    """A connected ``Y`` inside ``c`` with ``f(Y) = target``.

    Any such ``Y`` lies in one component of ``c ∩ f^{-1}(target)``, and
    that whole component then maps onto the target, so the first component
    whose image is the target is returned.
    """
    if target.is_empty():
        raise MapError("empty target")
    if not target.issubset(f.image(c)):
        raise MapError("target is not contained in the image of the cell")
    pre = f.preimage(target, within=c)
    for comp in pre.components():
        if f.image(comp) == target:
            return comp
    raise MapError("no connected subcell maps onto the target")


def load_map(path, graph: MetricGraph | None = None) -> PLMap:
    with open(path, encoding="utf-8") as fh:
        return PLMap.from_json(json.load(fh), graph)
