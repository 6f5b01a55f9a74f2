"""Exact Devaney chaos by induction over refining partitions.

Round ``n -> n+1`` plants, inside a plateau of every new cell ``F``, a
tiny excursion ``F'`` that sweeps a cell ``H_F`` of the previous partition
and sends the plateau point ``x_F`` to a point whose orbit returns to
``x_F``.  That closes a periodic orbit through every cell while keeping
every cell eventually onto.  Each round is checked against seven clauses
with exact set arithmetic.
"""

from __future__ import annotations

import hashlib
import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Optional

from .._rational import Q, ZERO, fmt
from ..cover import Partition, partition, refine
from ..metric_graph import Cell, GraphPoint, MetricGraph
from ..pl_map import PLMap, lay, sup_distance, with_pieces
from ..verify import chain_mixing_length, chain_transitive
from ._tracks import bits_for, cell_walk, ladder
from .lc import ConstructionError, surjective_lc

CLAUSES = ("1", "2", "3", "4", "5", "6", "7")
MIXING_HORIZON = 64


@dataclass
class Round:
    g: PLMap
    F: Partition
    S: frozenset
    checks: dict = field(default_factory=dict)
    distance: object = None  # d(g_{n-1}, g_n)


@dataclass
class DevaneyBuild:
    rounds: list
    N: int
    n0: int
    eps: object
    eta: object
    source: PLMap
    seed: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def final(self) -> PLMap:
        return self.rounds[-1].g

    @property
    def passed(self) -> bool:
        return all(all(r.checks.values()) for r in self.rounds)

    def manifest(self, kind: str) -> dict:
        rounds = []
        for n, r in enumerate(self.rounds):
            rounds.append({
                "round": n,
                "cells": len(r.F.cells),
                "mesh": fmt(r.F.mesh),
                "periodic_points": len(r.S),
                "pieces": len(r.g.pieces),
                "distance_from_previous": None if r.distance is None else fmt(r.distance),
                "clauses": {k: ("PASS" if v else "FAIL") for k, v in sorted(r.checks.items())},
            })
        out = {
            "schema": 1,
            "kind": kind,
            "params": {"eps": fmt(self.eps), "eta": fmt(self.eta), "N": self.N,
                       "n0": self.n0, "seed": self.seed},
            "input_sha256": map_digest(self.source),
            "output_sha256": map_digest(self.final),
            "rounds": rounds,
            "verdict": "PASS" if self.passed else "FAIL",
        }
        out.update(self.extra)
        return out


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def map_digest(f: PLMap) -> str:
    return hashlib.sha256(canonical_json(f.to_json()).encode()).hexdigest()


def _sorted_points(points) -> list:
    return sorted(points, key=lambda p: (p.e, p.t))


# exact checks ----------------------------------------------------------------------


class _Images:
    """Memoized exact images under one map."""

    def __init__(self, g: PLMap):
        self.g = g
        self.memo: dict[Cell, Cell] = {}
        self.whole = g.graph.whole()

    def __call__(self, c: Cell) -> Cell:
        img = self.memo.get(c)
        if img is None:
            img = self.memo[c] = self.g.image(c)
        return img

    def onto_within(self, c: Cell, k: int) -> bool:
        cur = c
        for _ in range(k):
            cur = self(cur)
            if cur == self.whole:
                return True
        return False


class _Locator:
    """Which cells of a single-segment partition contain a point."""

    def __init__(self, F: Partition):
        self.g = F.graph
        self.by_edge: dict[int, list] = {}
        self.at_vertex: dict[str, list] = {}
        for i, c in enumerate(F.cells):
            for e, lo, hi in c.segments:
                self.by_edge.setdefault(e, []).append((lo, hi, i))
            for v in c.covered_vertices:
                self.at_vertex.setdefault(v, []).append(i)
        self.los = {}
        for e, items in self.by_edge.items():
            items.sort()
            self.los[e] = [it[0] for it in items]

    def cells(self, p: GraphPoint) -> list[int]:
        v = self.g.vertex_of(p)
        if v is not None:
            return sorted(self.at_vertex.get(v, []))
        items = self.by_edge.get(p.e, [])
        j = bisect_right(self.los[p.e], p.t) if items else 0
        return sorted(i for lo, hi, i in items[max(j - 2, 0):j] if lo <= p.t <= hi)


class _EdgePoints:
    """A finite point set sorted per edge, for range queries."""

    def __init__(self, points):
        self.by_edge: dict[int, list] = {}
        for p in points:
            self.by_edge.setdefault(p.e, []).append(p.t)
        for ts in self.by_edge.values():
            ts.sort()

    def inside(self, e: int, a, b) -> list:
        ts = self.by_edge.get(e, [])
        return ts[bisect_right(ts, a):bisect_left(ts, b)]

    def nearest_gap(self, e: int, t):
        ts = self.by_edge.get(e, [])
        j = bisect_left(ts, t)
        return [abs(t - ts[k]) for k in (j - 1, j, j + 1)
                if 0 <= k < len(ts) and ts[k] != t]


def check_round(prev: Optional[Round], cur: Round, n: int, n0: int, eps, levels) -> dict:
    """Evaluate the seven clauses for round ``n`` (``prev`` is round n-1)."""
    g, S = cur.g, cur.S
    images = _Images(g)
    checks = {}
    if prev is not None:
        checks["1"] = cur.distance <= eps / 2 ** (n - 1)
    ok = True
    for i, Fi in enumerate(levels[: n + 1]):
        for c in Fi.cells:
            if not images.onto_within(c, i + n0):
                ok = False
                break
        if not ok:
            break
    checks["2"] = ok
    checks["3"] = cur.F.mesh <= eps / 2 ** (n + 1)
    if prev is not None:
        parents = cur.F.parent_index
        checks["4"] = (cur.F.parent is prev.F and all(
            c.issubset(prev.F.cells[j]) for c, j in zip(cur.F.cells, parents)))
    checks["5"] = {g(s) for s in S} == set(S)
    if prev is not None:
        checks["6"] = prev.S <= S and all(g(s) == prev.g(s) for s in prev.S)
        loc = _Locator(cur.F)
        hit = set()
        for p in S:
            hit.update(loc.cells(p))
        checks["7"] = len(hit) == len(cur.F.cells)
    return checks


# one refinement round ----------------------------------------------------------------


def _plateau_gaps(g: PLMap, e: int, lo, hi, avoid: _EdgePoints | None) -> list[tuple]:
    """Open intervals inside ``(lo, hi)`` where ``g`` is constant, cut at ``avoid``."""
    out = []
    for p in g.pieces_on(e, lo, hi):
        if not p.constant:
            continue
        a, b = max(lo, p.lo), min(hi, p.hi)
        if a >= b:
            continue
        cuts = [a] + (avoid.inside(e, a, b) if avoid else []) + [b]
        out.extend((x, y) for x, y in zip(cuts, cuts[1:]) if x < y)
    return out


def _cut_adjuster(g: PLMap, S: _EdgePoints):
    def adjust(e, t, lo, hi):
        gaps = _plateau_gaps(g, e, lo, hi, S)
        if not gaps:
            return t
        a, b = max(gaps, key=lambda ab: ab[1] - ab[0])
        return (a + b) / 2
    return adjust


def _backtrack_orbit(g: PLMap, H: Cell, target: GraphPoint, m: int, avoid: set) -> list:
    """Points p_0 in H, ..., p_{m-1} with g(p_k) = p_{k+1} and p_m = target.

    Intermediate points avoid ``avoid``; the search walks back from the
    target through exact point preimages restricted to the forward images
    of ``H``, so a dead end only occurs when ``avoid`` blocks every branch.
    """
    G = g.graph
    forward = [H]
    for _ in range(m - 1):
        forward.append(g.image(forward[-1]))

    def candidates(z, k):
        pre = g.point_preimage(z) & forward[k]
        pts = []
        for e, lo, hi in pre.segments:
            for t in ((lo,) if lo == hi else (lo, (lo + hi) / 2, hi)):
                p = G.point(e, t)
                if p not in avoid and p not in pts:
                    pts.append(p)
        return pts

    def search(z, k, tail):
        if k < 0:
            return tail
        for p in candidates(z, k):
            if p in tail:
                continue
            found = search(p, k - 1, [p] + tail)
            if found is not None:
                return found
        return None

    return search(target, m - 1, [])


def _refine_round(prev: Round, n: int, n0: int, eps, eta, grain) -> Round:
    g, Fn, S = prev.g, prev.F, prev.S
    G = g.graph
    target = min(eps / 2 ** (n + 2), Fn.mesh * Q("3/4"))
    S_idx = _EdgePoints(S)
    Fnext = refine(Fn, target, adjust=_cut_adjuster(g, S_idx))
    m = n + n0

    # anchors x_F, one per new cell, in plateaus away from S_n
    picks = []
    for idx, c in enumerate(Fnext.cells):
        e, lo, hi = c.segments[0]
        gaps = _plateau_gaps(g, e, lo, hi, S_idx)
        if not gaps:
            raise ConstructionError(f"cell {idx} of round {n + 1} holds no plateau", "7")
        a, b = gaps[0]
        picks.append((c, G.point(e, (a + b) / 2), (a, b)))
    anchors = {x for _, x, _ in picks}

    orbits = []
    loc = _Locator(Fn)
    for idx, (c, x, _) in enumerate(picks):
        value = g(x)
        H = Fn.cells[loc.cells(value)[0]]
        orbit = _backtrack_orbit(g, H, x, m, anchors)
        if orbit is None:
            raise ConstructionError(f"no admissible preimage orbit for cell {idx}", "2")
        orbits.append((H, value, orbit))

    S_next = set(S)
    for (_, x, _), (_, _, orbit) in zip(picks, orbits):
        S_next.update(orbit)
        S_next.add(x)

    share = eta / 2 ** (n + 2)
    pieces = []
    S_pts = _EdgePoints(S_next)
    for (c, x, (a, b)), (H, value, orbit) in zip(picks, orbits):
        r = min([x.t - a, b - x.t] + S_pts.nearest_gap(x.e, x.t)) / 2
        back = orbit[0]
        go = cell_walk(H, value, back, cover=True)
        ret = cell_walk(H, back, value, cover=False)
        nb = bits_for(r, grain)
        pieces.extend(lay(x.e, x.t - r, x.t, ladder(go, value, nb, share)))
        pieces.extend(lay(x.e, x.t, x.t + r, ladder(ret, back, nb, share)))
    g_next = with_pieces(g, pieces)
    dist = sup_distance(g, g_next).upper
    return Round(g_next, Fnext, frozenset(S_next), distance=dist)


def exact_devaney_refine(f: PLMap, F0: Partition, n0: int, eps, N: int, *,
                         eta="1/8", grain=None, seed: int = 0) -> DevaneyBuild:
    """Rounds 0..N of the exact Devaney induction starting from ``f`` on ``F0``."""
    eps, eta = Q(eps), Q(eta)
    if n0 < 1 or N < 0:
        raise ValueError("n0 must be positive and N nonnegative")
    if f.lc_fraction() < 1 - eta:
        raise ConstructionError("the starting map has too little plateau", "hypothesis")
    levels = [F0]
    first = Round(f, F0, frozenset())
    first.checks = check_round(None, first, 0, n0, eps, levels)
    if not first.checks["2"]:
        raise ConstructionError("some cell of F0 is not onto within n0 iterations", "2")
    rounds = [first]
    for n in range(N):
        nxt = _refine_round(rounds[-1], n, n0, eps, eta, grain)
        levels.append(nxt.F)
        nxt.checks = check_round(rounds[-1], nxt, n + 1, n0, eps, levels)
        rounds.append(nxt)
        failed = [k for k in CLAUSES if nxt.checks.get(k) is False]
        if failed:
            raise ConstructionError(f"round {n + 1} violates clause {failed[0]}", failed[0])
    return DevaneyBuild(rounds, N, n0, eps, eta, f, seed)


def default_grain(eps, N: int):
    return Q(eps) / 2 ** (N + 6)


def exact_devaney(g: MetricGraph, eps, N: int, *, eta="1/8", seed: int = 0) -> DevaneyBuild:
    """A map with every cell eventually onto and a dense periodic set."""
    eps, eta = Q(eps), Q(eta)
    if eps <= 0:
        raise ValueError("eps must be positive")
    F0 = partition(g, eps)
    eps_l = 2 * F0.mesh
    grain = default_grain(eps_l, N)
    f = surjective_lc(g, eta=eta, onto_cells=F0.cells, grain=grain)
    build = exact_devaney_refine(f, F0, 1, eps_l, N, eta=eta, grain=grain, seed=seed)
    build.extra["requested_eps"] = fmt(eps)
    return build


def _plateau_excursions(f: PLMap, F: Partition, targets, eta, grain) -> list:
    """Pieces sweeping ``targets[i]`` from inside a plateau of cell ``i``."""
    pieces = []
    for idx, (c, Y) in enumerate(zip(F.cells, targets)):
        e, lo, hi = c.segments[0]
        gaps = _plateau_gaps(f, e, lo, hi, None)
        if not gaps:
            raise ConstructionError(f"cell {idx} holds no plateau", "hypothesis")
        a, b = gaps[0]
        quarter = (b - a) / 4
        u, v = a + quarter, b - quarter
        value = f(f.graph.point(e, u))
        walk = cell_walk(Y, value, value, cover=True)
        pieces.extend(lay(e, u, v, ladder(walk, value, bits_for(v - u, grain), eta / 2)))
    return pieces


def leo_from_ct(f: PLMap, eps, N: int, *, eta="1/8", horizon: int = MIXING_HORIZON,
                seed: int = 0) -> DevaneyBuild:
    """An exact Devaney map within ``eps`` of a chain transitive ``f``.

    Cells are fine enough that each image ``f(F)`` has diameter below
    ``eps / 6``; a plateau excursion then makes every cell cover its
    fattened image ``Y_F``.  Chain mixing at that scale gives a uniform
    ``n0`` after which every cell covers the space.
    """
    from ..cover import CellIndex

    eps, eta = Q(eps), Q(eta)
    g = f.graph
    sixth = eps / 6
    if not chain_transitive(f, [sixth]).passed:
        raise ConstructionError("the map is not chain transitive", "hypothesis")
    F = partition(g, sixth)
    while any(f.image(c).diameter() >= sixth for c in F.cells):
        F = refine(F, F.mesh / 2)
    index = CellIndex(F.cells)
    targets = []
    for c in F.cells:
        img = f.image(c)
        near = [F.cells[j] for j in index.meeting(img.neighborhood(sixth))
                if img.distance(F.cells[j]) < sixth]
        Y = near[0]
        for h in near[1:]:
            Y = Y | h
        targets.append(Y)
    eps_l = 2 * F.mesh
    grain = default_grain(eps_l, N)
    g1 = with_pieces(f, _plateau_excursions(f, F, targets, eta / 2, grain))
    n0 = chain_mixing_length(f, eps, horizon, p=F, threshold=sixth)
    if n0 is None:
        raise ConstructionError(f"chain mixing length exceeds horizon {horizon}", "hypothesis")
    build = exact_devaney_refine(g1, F, n0, eps_l, N, eta=eta, grain=grain, seed=seed)
    build.source = f
    build.extra["first_step_distance"] = fmt(sup_distance(f, g1).upper)
    return build
