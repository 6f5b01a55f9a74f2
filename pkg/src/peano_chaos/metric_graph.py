"""Finite metric graphs with an exact geodesic metric.

A graph is a finite set of vertices joined by edges of positive rational
length.  Points live on edges at a rational offset measured from the edge's
``from`` endpoint; points sitting on a vertex are stored in one canonical
form so that equality is meaningful.  :class:`Cell` is a finite union of
closed edge segments and carries all of the set arithmetic the rest of the
package needs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._rational import Q, ZERO, fmt


class GraphError(ValueError):
    """Invalid graph data, point or cell."""


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: object
    index: int

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True, order=True)
class GraphPoint:
    """A point of a metric graph: edge index plus offset from the edge start.

    Build points through :meth:`MetricGraph.point`, which canonicalizes
    vertex points; two canonical points are equal iff they are the same
    point of the space.
    """

    e: int
    t: object

    def __repr__(self) -> str:
        return f"GraphPoint({self.e}, {fmt(self.t)})"


class MetricGraph:
    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple]):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex identifiers")
        vset = set(self.vertices)
        built = []
        for i, spec in enumerate(edges):
            eid, u, v, length = spec
            length = Q(length)
            if length <= 0:
                raise GraphError(f"edge {eid!r} must have positive length")
            if u not in vset or v not in vset:
                raise GraphError(f"edge {eid!r} uses an unknown vertex")
            built.append(Edge(str(eid), str(u), str(v), length, i))
        if not built:
            raise GraphError("a graph needs at least one edge")
        self.edges = tuple(built)
        self.edge_index = {e.id: e.index for e in self.edges}
        if len(self.edge_index) != len(self.edges):
            raise GraphError("duplicate edge identifiers")
        self.incident: dict[str, list[int]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self.incident[e.u].append(e.index)
            if not e.is_loop:
                self.incident[e.v].append(e.index)
        for v, inc in self.incident.items():
            if not inc:
                raise GraphError(f"vertex {v!r} is isolated")
        self._all_pairs()
        if any(self._dist[self.vertices[0]].get(v) is None for v in self.vertices):
            raise GraphError("graph is not connected")
        self.total_length = sum((e.length for e in self.edges), ZERO)
        self._vpoint = {v: self._canonical_vertex(v) for v in self.vertices}
        self._diameter = None

    def _key(self):
        return (self.vertices, tuple((e.id, e.u, e.v, e.length) for e in self.edges))

    def __eq__(self, other):
        return self is other or (isinstance(other, MetricGraph) and self._key() == other._key())

    def __hash__(self):
        return hash(self._key())

    # construction helpers -------------------------------------------------

    @classmethod
    def from_json(cls, data) -> "MetricGraph":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        try:
            return cls(
                data["vertices"],
                [(e["id"], e["from"], e["to"], e["length"]) for e in data["edges"]],
            )
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "vertices": list(self.vertices),
            "edges": [
                {"id": e.id, "from": e.u, "to": e.v, "length": fmt(e.length)}
                for e in self.edges
            ],
        }

    def _all_pairs(self):
        # Floyd-Warshall in exact arithmetic; graphs here are small.
        dist = {a: {a: ZERO} for a in self.vertices}
        nxt = {a: {a: None} for a in self.vertices}
        for e in self.edges:
            if e.is_loop:
                continue
            for a, b in ((e.u, e.v), (e.v, e.u)):
                if dist[a].get(b) is None or e.length < dist[a][b]:
                    dist[a][b] = e.length
                    nxt[a][b] = (e.index, b)
        for k in self.vertices:
            dk = dist[k]
            for a in self.vertices:
                dak = dist[a].get(k)
                if dak is None:
                    continue
                da = dist[a]
                for b, dkb in dk.items():
                    cand = dak + dkb
                    if da.get(b) is None or cand < da[b]:
                        da[b] = cand
                        nxt[a][b] = nxt[a][k]
        self._dist = dist
        self._next = nxt

    def _canonical_vertex(self, v: str) -> GraphPoint:
        e = self.edges[min(self.incident[v])]
        return GraphPoint(e.index, ZERO if e.u == v else e.length)

    # points ---------------------------------------------------------------

    def edge(self, key) -> Edge:
        if isinstance(key, Edge):
            return key
        if isinstance(key, int) and not isinstance(key, bool):
            if 0 <= key < len(self.edges):
                return self.edges[key]
            raise GraphError(f"unknown edge index {key}")
        try:
            return self.edges[self.edge_index[str(key)]]
        except KeyError:
            raise GraphError(f"unknown edge {key!r}") from None

    def point(self, edge, offset) -> GraphPoint:
        e = self.edge(edge)
        t = Q(offset)
        if t < 0 or t > e.length:
            raise GraphError(f"offset {fmt(t)} outside edge {e.id!r}")
        if t == 0:
            return self._vpoint[e.u]
        if t == e.length:
            return self._vpoint[e.v]
        return GraphPoint(e.index, t)

    def vertex_point(self, v: str) -> GraphPoint:
        try:
            return self._vpoint[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def vertex_of(self, p: GraphPoint):
        e = self.edges[p.e]
        if p.t == 0:
            return e.u
        if p.t == e.length:
            return e.v
        return None

    def check_point(self, p: GraphPoint) -> GraphPoint:
        if not isinstance(p, GraphPoint):
            raise GraphError(f"not a graph point: {p!r}")
        if not 0 <= p.e < len(self.edges):
            raise GraphError(f"unknown edge index {p.e}")
        return self.point(p.e, p.t)

    def _ends(self, p: GraphPoint):
        v = self.vertex_of(p)
        if v is not None:
            return ((v, ZERO),)
        e = self.edges[p.e]
        return ((e.u, p.t), (e.v, e.length - p.t))

    def vdist(self, a: str, b: str):
        return self._dist[a][b]

    # metric -----------------------------------------------------------------

    def distance(self, p: GraphPoint, q: GraphPoint):
        p = self.check_point(p)
        q = self.check_point(q)
        return self._distance(p, q)

    def _distance(self, p: GraphPoint, q: GraphPoint):
        if p == q:
            return ZERO
        best = None
        if p.e == q.e and self.vertex_of(p) is None and self.vertex_of(q) is None:
            best = abs(p.t - q.t)
        for a, da in self._ends(p):
            row = self._dist[a]
            for b, db in self._ends(q):
                cand = da + row[b] + db
                if best is None or cand < best:
                    best = cand
        return best

    def _vertex_path(self, a: str, b: str) -> list[tuple[int, str, str]]:
        out = []
        while a != b:
            ei, nxt = self._next[a][b]
            out.append((ei, a, nxt))
            a = nxt
        return out

    def geodesic(self, p: GraphPoint, q: GraphPoint) -> "Cell":
        """An arc from ``p`` to ``q`` whose length is ``distance(p, q)``."""
        p = self.check_point(p)
        q = self.check_point(q)
        return Cell(self, self._geodesic_segments(p, q))

    def _geodesic_segments(self, p, q):
        """Oriented segments (e, a, b) of a shortest path from p to q."""
        d = self._distance(p, q)
        if d == 0:
            return [(p.e, p.t, p.t)]
        if (p.e == q.e and self.vertex_of(p) is None and self.vertex_of(q) is None
                and abs(p.t - q.t) == d):
            return [(p.e, p.t, q.t)]
        for a, da in self._ends(p):
            for b, db in self._ends(q):
                if da + self._dist[a][b] + db != d:
                    continue
                segs = []
                if da:
                    e = self.edges[p.e]
                    segs.append((p.e, p.t, ZERO if a == e.u and p.t == da else e.length))
                for ei, x, y in self._vertex_path(a, b):
                    e = self.edges[ei]
                    segs.append((ei, ZERO, e.length) if x == e.u else (ei, e.length, ZERO))
                if db:
                    e = self.edges[q.e]
                    segs.append((q.e, ZERO if b == e.u and q.t == db else e.length, q.t))
                return segs
        raise AssertionError("distance not realized by any route")

    def ball(self, center: GraphPoint, r) -> "Cell":
        """Closed ball of radius ``r`` as a cell."""
        center = self.check_point(center)
        r = Q(r)
        if r < 0:
            raise GraphError("negative radius")
        segs = []
        ends = self._ends(center)
        cv = self.vertex_of(center)
        for e in self.edges:
            du = min(dc + self._dist[a][e.u] for a, dc in ends)
            dv = min(dc + self._dist[a][e.v] for a, dc in ends)
            if r >= du:
                segs.append((e.index, ZERO, min(e.length, r - du)))
            if r >= dv:
                segs.append((e.index, max(ZERO, e.length - (r - dv)), e.length))
            if cv is None and center.e == e.index:
                segs.append((e.index, max(ZERO, center.t - r), min(e.length, center.t + r)))
        return Cell(self, segs)

    def whole(self) -> "Cell":
        return Cell(self, [(e.index, ZERO, e.length) for e in self.edges])

    def diameter(self):
        if self._diameter is None:
            self._diameter = self.whole().diameter()
        return self._diameter

    def segment_length(self, e: int, lo, hi):
        return hi - lo


# ---------------------------------------------------------------------------
# exact LP used for diameters: maximize z subject to z <= affine forms on a
# polygon in the (s, t) plane.  Vertex enumeration over constraint triples.


def _solve3(rows):
    (a1, b1, c1, d1), (a2, b2, c2, d2), (a3, b3, c3, d3) = rows
    det = a1 * (b2 * c3 - b3 * c2) - b1 * (a2 * c3 - a3 * c2) + c1 * (a2 * b3 - a3 * b2)
    if det == 0:
        return None
    ds = d1 * (b2 * c3 - b3 * c2) - b1 * (d2 * c3 - d3 * c2) + c1 * (d2 * b3 - d3 * b2)
    dt = a1 * (d2 * c3 - d3 * c2) - d1 * (a2 * c3 - a3 * c2) + c1 * (a2 * d3 - a3 * d2)
    dz = a1 * (b2 * d3 - b3 * d2) - b1 * (a2 * d3 - a3 * d2) + d1 * (a2 * b3 - a3 * b2)
    return ds / det, dt / det, dz / det


def _max_min_affine(cons):
    """max z over constraints a*s + b*t + c*z <= d (bounded, nonempty)."""
    best = None
    for trio in itertools.combinations(cons, 3):
        sol = _solve3(trio)
        if sol is None:
            continue
        s, t, z = sol
        if all(a * s + b * t + c * z <= d for a, b, c, d in cons):
            if best is None or z > best:
                best = z
    return best


class Cell:
    """A finite union of closed edge segments, normalized.

    Segments are stored as ``(edge_index, lo, hi)`` with ``lo <= hi``; a
    segment with ``lo == hi`` is an isolated point and only survives
    normalization when no other segment covers it.  Despite the name a
    Cell may be disconnected; :meth:`is_connected` tells.
    """

    __slots__ = ("graph", "segments", "_covered", "_hash")

    def __init__(self, graph: MetricGraph, segments: Iterable[Sequence] = ()):
        self.graph = graph
        self.segments, self._covered = self._normalize(graph, segments)
        self._hash = None

    @staticmethod
    def _normalize(g, segments):
        by_edge: dict[int, list] = {}
        points = []
        for seg in segments:
            e, lo, hi = seg
            e = g.edge(e).index
            lo, hi = Q(lo), Q(hi)
            if lo > hi:
                lo, hi = hi, lo
            if lo < 0 or hi > g.edges[e].length:
                raise GraphError("segment leaves its edge")
            if lo == hi:
                points.append(g.point(e, lo))
            else:
                by_edge.setdefault(e, []).append((lo, hi))
        out = []
        covered = set()
        for e in sorted(by_edge):
            ivs = sorted(by_edge[e])
            cur_lo, cur_hi = ivs[0]
            merged = []
            for lo, hi in ivs[1:]:
                if lo <= cur_hi:
                    if hi > cur_hi:
                        cur_hi = hi
                else:
                    merged.append((cur_lo, cur_hi))
                    cur_lo, cur_hi = lo, hi
            merged.append((cur_lo, cur_hi))
            edge = g.edges[e]
            for lo, hi in merged:
                out.append((e, lo, hi))
                if lo == 0:
                    covered.add(edge.u)
                if hi == edge.length:
                    covered.add(edge.v)
        pts = set()
        for p in points:
            v = g.vertex_of(p)
            if v is not None:
                if v in covered:
                    continue
            elif any(lo <= p.t <= hi for lo, hi in
                     ((lo, hi) for ee, lo, hi in out if ee == p.e)):
                continue
            pts.add(p)
        for p in pts:
            out.append((p.e, p.t, p.t))
            v = g.vertex_of(p)
            if v is not None:
                covered.add(v)
        out.sort()
        return tuple(out), frozenset(covered)

    # basic protocol ---------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Cell) and self.graph is other.graph
                and self.segments == other.segments)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.segments)
        return self._hash

    def __repr__(self):
        body = ", ".join(f"({e}, {fmt(lo)}, {fmt(hi)})" for e, lo, hi in self.segments)
        return f"Cell[{body}]"

    def __bool__(self):
        return bool(self.segments)

    def is_empty(self) -> bool:
        return not self.segments

    def _same_graph(self, other: "Cell"):
        if self.graph is not other.graph:
            raise GraphError("cells live on different graphs")

    @property
    def covered_vertices(self):
        return self._covered

    def length(self):
        return sum((hi - lo for _, lo, hi in self.segments), ZERO)

    def points(self):
        """Canonical endpoints of every segment, in order."""
        g = self.graph
        seen = []
        for e, lo, hi in self.segments:
            for t in (lo, hi):
                p = g.point(e, t)
                if p not in seen:
                    seen.append(p)
        return seen

    def first_point(self) -> GraphPoint:
        e, lo, _ = self.segments[0]
        return self.graph.point(e, lo)

    def contains_point(self, p: GraphPoint) -> bool:
        v = self.graph.vertex_of(p)
        if v is not None:
            return v in self._covered
        return any(e == p.e and lo <= p.t <= hi for e, lo, hi in self.segments)

    def restrict(self, e: int):
        """Closed intervals of this cell on edge ``e`` (vertex hits included)."""
        edge = self.graph.edges[e]
        ivs = [(lo, hi) for ee, lo, hi in self.segments if ee == e]
        if edge.u in self._covered and not any(lo == 0 for lo, _ in ivs):
            ivs.append((ZERO, ZERO))
        if edge.v in self._covered and not any(hi == edge.length for _, hi in ivs):
            ivs.append((edge.length, edge.length))
        ivs.sort()
        return ivs

    # set algebra ------------------------------------------------------------

    def union(self, other: "Cell") -> "Cell":
        self._same_graph(other)
        return Cell(self.graph, self.segments + other.segments)

    __or__ = union

    def intersection(self, other: "Cell") -> "Cell":
        self._same_graph(other)
        out = []
        edges = {e for e, _, _ in self.segments} | {e for e, _, _ in other.segments}
        for v in self._covered & other._covered:
            p = self.graph.vertex_point(v)
            out.append((p.e, p.t, p.t))
        for e in edges:
            a = self.restrict(e)
            b = other.restrict(e)
            i = j = 0
            while i < len(a) and j < len(b):
                lo = max(a[i][0], b[j][0])
                hi = min(a[i][1], b[j][1])
                if lo <= hi:
                    out.append((e, lo, hi))
                if a[i][1] < b[j][1]:
                    i += 1
                else:
                    j += 1
        return Cell(self.graph, out)

    __and__ = intersection

    def complement_closure(self) -> "Cell":
        """Closure of the complement of this cell in the whole graph."""
        out = []
        for edge in self.graph.edges:
            cursor = ZERO
            for lo, hi in self.restrict(edge.index):
                if lo > cursor:
                    out.append((edge.index, cursor, lo))
                cursor = max(cursor, hi)
            if cursor < edge.length:
                out.append((edge.index, cursor, edge.length))
        return Cell(self.graph, out)

    def issubset(self, other: "Cell") -> bool:
        self._same_graph(other)
        return self.intersection(other) == self

    def in_interior_of(self, other: "Cell") -> bool:
        """True iff this cell lies in the topological interior of ``other``."""
        return self.intersection(other.complement_closure()).is_empty()

    def interior_contains(self, p: GraphPoint) -> bool:
        return not self.complement_closure().contains_point(p)

    def is_whole(self) -> bool:
        return self == self.graph.whole()

    def is_connected(self) -> bool:
        if not self.segments:
            return True
        g = self.graph
        parent = list(range(len(self.segments)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        owner: dict = {}
        for i, (e, lo, hi) in enumerate(self.segments):
            for t in (lo, hi):
                key = g.point(e, t)
                if key in owner:
                    parent[find(i)] = find(owner[key])
                else:
                    owner[key] = i
        return len({find(i) for i in range(len(self.segments))}) == 1

    def components(self) -> list["Cell"]:
        g = self.graph
        parent = list(range(len(self.segments)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        owner: dict = {}
        for i, (e, lo, hi) in enumerate(self.segments):
            for t in (lo, hi):
                key = g.point(e, t)
                if key in owner:
                    parent[find(i)] = find(owner[key])
                else:
                    owner[key] = i
        groups: dict[int, list] = {}
        for i, seg in enumerate(self.segments):
            groups.setdefault(find(i), []).append(seg)
        return [Cell(g, segs) for segs in groups.values()]

    # metric quantities --------------------------------------------------------

    def distance_to_point(self, p: GraphPoint):
        if self.contains_point(p):
            return ZERO
        g = self.graph
        return min(g._distance(p, q) for q in self.points())

    def distance(self, other: "Cell"):
        """Infimum distance between two cells (0 when they meet)."""
        self._same_graph(other)
        if self.is_empty() or other.is_empty():
            raise GraphError("distance to an empty cell")
        if not self.intersection(other).is_empty():
            return ZERO
        g = self.graph
        mine = self.points()
        theirs = other.points()
        return min(g._distance(p, q) for p in mine for q in theirs)

    def neighborhood(self, r) -> "Cell":
        """Closed r-neighborhood: every point within distance r of the cell."""
        g = self.graph
        out = list(self.segments)
        for p in self.points():
            out.extend(g.ball(p, r).segments)
        return Cell(g, out)

    def diameter(self):
        if not self.segments:
            return ZERO
        g = self.graph
        if len(self.segments) == 1:
            e, lo, hi = self.segments[0]
            if lo == hi:
                return ZERO
            if g._distance(g.point(e, lo), g.point(e, hi)) == hi - lo:
                # the segment is itself geodesic, so distances inside it are |s - t|
                return hi - lo
        best = ZERO
        segs = self.segments
        for i in range(len(segs)):
            for j in range(i, len(segs)):
                d = _segment_pair_diameter(g, segs[i], segs[j])
                if d > best:
                    best = d
        return best

    # serialization --------------------------------------------------------------

    def to_json(self) -> list:
        g = self.graph
        return [{"edge": g.edges[e].id, "lo": fmt(lo), "hi": fmt(hi)}
                for e, lo, hi in self.segments]

    @classmethod
    def from_json(cls, graph: MetricGraph, data) -> "Cell":
        try:
            return cls(graph, [(graph.edge(s["edge"]).index, s["lo"], s["hi"]) for s in data])
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed cell JSON: {exc}") from exc


def _segment_pair_diameter(g: MetricGraph, s1, s2):
    """max d(x, y) for x in segment s1, y in segment s2."""
    e1, lo1, hi1 = s1
    e2, lo2, hi2 = s2
    E1, E2 = g.edges[e1], g.edges[e2]
    box = [(1, 0, 0, hi1), (-1, 0, 0, -lo1), (0, 1, 0, hi2), (0, -1, 0, -lo2)]
    forms = []
    for end1, sign1, off1 in ((E1.u, 1, 0), (E1.v, -1, E1.length)):
        for end2, sign2, off2 in ((E2.u, 1, 0), (E2.v, -1, E2.length)):
            # z <= sign1*s + off1 + D + sign2*t + off2
            forms.append((-sign1, -sign2, 1, off1 + off2 + g._dist[end1][end2]))
    if e1 != e2:
        return _max_min_affine(box + forms)
    best = None
    # same edge: split into s >= t and s <= t so |s - t| is affine
    for side in (1, -1):
        half = [(-side, side, 0, 0)]
        direct = [(-side, side, 1, 0)]  # z <= side*(s - t)
        val = _max_min_affine(box + half + forms + direct)
        if val is not None and (best is None or val > best):
            best = val
    return best


def load_graph(path) -> MetricGraph:
    with open(path, encoding="utf-8") as fh:
        return MetricGraph.from_json(json.load(fh))
