"""Local perturbations that break, or robustly enforce, dynamical properties.

All three gadgets work inside plateaus of the input map, where the map is
constant, so continuity only asks the replacement to return the plateau
value at the plateau's ends.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .._rational import Q, ZERO, fmt
from ..cover import CellIndex, InteriorCover, Partition, interior_cover
from ..metric_graph import Cell, GraphPoint, MetricGraph
from ..pl_map import (MapError, Piece, PLMap, compose, lay, subcell_with_image, sup_distance,
                      with_pieces)
from ..verify import (ChainCertificate, ShadowWitness, TrappingCertificate,
                      chain_mixing_length, chain_transitive)
from ._tracks import cell_walk, geodesic_path, path_length
from .lc import ConstructionError

THREE = Q(3)


def _pt_json(g: MetricGraph, p: GraphPoint) -> dict:
    return {"edge": g.edges[p.e].id, "offset": fmt(p.t)}


@dataclass
class PerturbationGadget:
    """Plateau anchors, inner scale maps and windows of a perturbation."""

    kind: str
    xi: object
    plateaus: dict  # cell index -> (edge, lo, hi) open plateau U_H
    anchors: dict  # cell index -> (x_H, y_H)
    scale: object  # length of the parameter interval of t_H
    windows: dict  # (H, H') -> (lo, hi) inside the parameter interval
    cover_windows: dict = field(default_factory=dict)  # H -> [(lo, hi)] full covers
    families: dict = field(default_factory=dict)  # H -> sorted targets H'

    def to_json(self, g: MetricGraph) -> dict:
        return {
            "kind": self.kind,
            "xi": fmt(self.xi),
            "scale": fmt(self.scale),
            "cells": [
                {
                    "cell": i,
                    "plateau": {"edge": g.edges[e].id, "lo": fmt(lo), "hi": fmt(hi)},
                    "x": _pt_json(g, self.anchors[i][0]),
                    "y": _pt_json(g, self.anchors[i][1]),
                    "targets": list(self.families.get(i, ())),
                    "cover_windows": [[fmt(a), fmt(b)] for a, b in self.cover_windows.get(i, ())],
                }
                for i, (e, lo, hi) in sorted(self.plateaus.items())
            ],
            "windows": [[i, j, fmt(a), fmt(b)] for (i, j), (a, b) in sorted(self.windows.items())],
        }


def _plateaus_in(f: PLMap, e: int, lo, hi) -> list[tuple]:
    """Open plateau intervals of ``f`` inside ``(lo, hi)`` on edge ``e``."""
    out = []
    for p in f.pieces_on(e, lo, hi):
        if p.constant:
            a, b = max(lo, p.lo), min(hi, p.hi)
            if a < b:
                out.append((a, b))
    return out


def _largest(ivs):
    return max(ivs, key=lambda ab: ab[1] - ab[0]) if ivs else None


# breaking chain transitivity ---------------------------------------------------------------


def break_chain_transitivity(f: PLMap, eps) -> tuple[PLMap, TrappingCertificate]:
    """A map within ``eps`` of ``f`` with a trapping set.

    A cycle of plateaus ``x_0 -> ... -> x_{n-1} -> x_0`` is found whose
    steps are ``eps/2``-chain steps of ``f``; each plateau is carved so its
    core collapses onto the next anchor, making the union of cores a set
    mapped into its own interior.
    """
    eps = Q(eps)
    g = f.graph
    if not chain_transitive(f, [eps]).passed:
        raise ConstructionError("the map is not chain transitive at this scale", "hypothesis")
    plats = [p for p in f.pieces if p.constant]
    if not plats:
        raise ConstructionError("the map has no plateau", "hypothesis")
    mids = [g.point(p.e, (p.lo + p.hi) / 2) for p in plats]
    vals = [g.point(p.te, p.a) for p in plats]
    half = eps / 2

    def succ(i):
        return [j for j in range(len(plats)) if g.distance(vals[i], mids[j]) < half]

    cycle = None
    for s in range(len(plats)):
        if g.distance(vals[s], mids[s]) < half:
            cycle = [s]
            break
        prev = {s: None}
        queue = deque([s])
        while queue and cycle is None:
            i = queue.popleft()
            for j in succ(i):
                if j == s:
                    cycle = [i]
                    while prev[cycle[-1]] is not None:
                        cycle.append(prev[cycle[-1]])
                    cycle.reverse()
                    break
                if j not in prev:
                    prev[j] = i
                    queue.append(j)
        if cycle is not None:
            break
    if cycle is None:
        raise ConstructionError("no eps/2-chain returns to a plateau", "hypothesis")

    pieces, cores = [], []
    for k, i in enumerate(cycle):
        p = plats[i]
        nxt = mids[cycle[(k + 1) % len(cycle)]]
        c = vals[i]
        x = (p.lo + p.hi) / 2
        r = (p.hi - p.lo) / 2 * Q("15/16")
        tau = r / 8
        out_path = geodesic_path(g, c, nxt)
        back_path = geodesic_path(g, nxt, c)
        hold = (nxt.e, nxt.t, nxt.t)
        if out_path:
            pieces.extend(lay(p.e, x - r, x - r + tau, out_path))
        else:
            pieces.extend(lay(p.e, x - r, x - r + tau, [hold + (1,)]))
        pieces.extend(lay(p.e, x - r + tau, x + r - tau, [hold + (1,)]))
        if back_path:
            pieces.extend(lay(p.e, x + r - tau, x + r, back_path))
        else:
            pieces.extend(lay(p.e, x + r - tau, x + r, [hold + (1,)]))
        cores.append((p.e, x - r + tau, x + r - tau))
    h = with_pieces(f, pieces)
    L = Cell(g, cores)
    gap = h.image(L).distance(L.complement_closure())
    cert = TrappingCertificate(L, gap)
    if not cert.replay(h):
        raise ConstructionError("trapping certificate failed to replay", "trapping")
    if not sup_distance(f, h).upper < eps:
        raise ConstructionError("perturbation left the eps-ball", "distance")
    return h, cert


# inner scale maps and window maps -------------------------------------------------------------


def _compose_scale(e: int, knots, tpieces) -> list[Piece]:
    """Pieces of ``t o s`` where ``s`` is PL through ``knots`` [(offset, value)].

    ``tpieces`` lay ``t`` on a parameter line (their ``e`` is ignored).
    """
    out = []
    los = [tp.lo for tp in tpieces]
    from bisect import bisect_right

    for (d0, v0), (d1, v1) in zip(knots, knots[1:]):
        if v0 == v1:
            tp = tpieces[max(bisect_right(los, v0) - 1, 0)]
            val = tp.at(v0)
            out.append(Piece(e, d0, d1, tp.te, val, val))
            continue
        lo_v, hi_v = min(v0, v1), max(v0, v1)
        for tp in tpieces:
            a, b = max(lo_v, tp.lo), min(hi_v, tp.hi)
            if a >= b:
                continue
            da = d0 + (a - v0) / (v1 - v0) * (d1 - d0)
            db = d0 + (b - v0) / (v1 - v0) * (d1 - d0)
            if da < db:
                out.append(Piece(e, da, db, tp.te, tp.at(a), tp.at(b)))
            else:
                out.append(Piece(e, db, da, tp.te, tp.at(b), tp.at(a)))
    return out


def _lay_path(lo, hi, path, at: GraphPoint) -> list[Piece]:
    """Lay ``path`` on the parameter interval [lo, hi]; hold at ``at`` if empty."""
    if path_length(path) == 0:
        return lay(-1, lo, hi, [(at.e, at.t, at.t, 1)])
    return lay(-1, lo, hi, path)


def _window_track(K: Cell, start: GraphPoint, targets, anchors, lo, hi):
    """Parameter pieces on [lo, hi] visiting each window y -> x in turn.

    Returns (pieces, windows {target: (a, b)}, end point).
    """
    slots = 2 * len(targets) - 1
    step = (hi - lo) / slots
    g = K.graph
    pieces, windows = [], {}
    cur = start
    for k, j in enumerate(targets):
        x, y = anchors[j]
        a = lo + step * 2 * k
        if k:
            pieces.extend(_lay_path(a - step, a, cell_walk(K, cur, y, cover=False), cur))
        pieces.extend(_lay_path(a, a + step, geodesic_path(g, y, x), y))
        windows[j] = (a, a + step)
        cur = x
    return pieces, windows, cur


# mixing gadget ------------------------------------------------------------------------------


@dataclass
class MixingResult:
    g: PLMap
    xi: object
    gadget: PerturbationGadget
    n0: int
    horizon: int

    def __iter__(self):
        return iter((self.g, self.xi, self.gadget))


def mixing_perturbation(f: PLMap, Hn: Partition, eps, *, horizon: int = 64) -> MixingResult:
    """Plant in each cell a plateau gadget whose image sweeps its neighbours.

    For a cell ``H`` the targets are the cells within ``eps/4`` of
    ``f(H)``.  On the plateau ``U_H`` the map is ``t_H o s_H``: ``s_H``
    folds ``U_H`` onto [0, 3] with ``s_H(B(y_H, xi)) <= [0, 1]`` and
    ``s_H(B(x_H, xi)) <= [2, 3]``, and ``t_H`` covers all targets on
    [0, 1] and [2, 3] and runs ``y_{H'} -> x_{H'}`` on windows in [1, 2].
    """
    eps = Q(eps)
    g = f.graph
    quarter = eps / 4
    if not Hn.mesh < quarter:
        raise ConstructionError("partition mesh must be below eps/4", "mesh")
    images = [f.image(c) for c in Hn.cells]
    if any(img.diameter() >= quarter for img in images):
        raise ConstructionError("cell images must have diameter below eps/4", "mesh")

    plats = {}
    for i, c in enumerate(Hn.cells):
        e, lo, hi = c.segments[0]
        best = _largest(_plateaus_in(f, e, lo, hi))
        if best is None:
            raise ConstructionError(f"cell {i} holds no plateau", "plateau")
        plats[i] = (e, best[0], best[1])
    xi = min([eps / 8] + [(b - a) / 10 for _, a, b in plats.values()])
    anchors = {}
    for i, (e, a, b) in plats.items():
        x = (a + b) / 2
        anchors[i] = (g.point(e, x), g.point(e, x - 3 * xi))

    index = CellIndex(Hn.cells)
    pieces, windows, covers, families = [], {}, {}, {}
    for i, (e, a, b) in plats.items():
        img = images[i]
        fam = [j for j in index.meeting(img.neighborhood(quarter))
               if img.distance(Hn.cells[j]) < quarter]
        families[i] = fam
        W = Hn.cells[fam[0]]
        for j in fam[1:]:
            W = W | Hn.cells[j]
        c = f(g.point(e, a))
        first_y = anchors[fam[0]][1]
        tp = _lay_path(ZERO, Q(1), cell_walk(W, c, first_y, cover=True), c)
        wp, wins, end = _window_track(W, first_y, fam, anchors, Q(1), Q(2))
        tp += wp
        tp += _lay_path(Q(2), THREE, cell_walk(W, end, end, cover=True), end)
        for j, span in wins.items():
            windows[(i, j)] = span
        covers[i] = [(ZERO, Q(1)), (Q(2), THREE)]
        x = anchors[i][0].t
        knots = [(a, ZERO), (x - 2 * xi, Q(1)), (x - xi, Q(2)), (x, THREE),
                 (x + xi, Q(2)), (b, ZERO)]
        pieces.extend(_compose_scale(e, knots, tp))
    h = with_pieces(f, pieces)
    gadget = PerturbationGadget("mixing", xi, plats, anchors, THREE, windows, covers, families)
    if not sup_distance(f, h).upper + xi < eps:
        raise ConstructionError("the xi-ball around the result leaves the eps-ball", "distance")
    n0 = chain_mixing_length(f, eps, horizon, p=Hn, threshold=quarter)
    if n0 is None:
        raise ConstructionError(f"chain mixing length exceeds horizon {horizon}", "hypothesis")
    return MixingResult(h, xi, gadget, n0, 4 * n0)


def random_wiggle(g: MetricGraph, radius, seed: int, knots: int = 8) -> PLMap:
    """A seeded PL map fixing vertices with ``d(phi, id) < radius``."""
    rng = random.Random(seed)
    radius = Q(radius)
    den = 1 << 20
    pieces = []
    for edge in g.edges:
        L = edge.length
        cuts = [L * k / knots for k in range(knots + 1)]
        vals = [ZERO]
        for t in cuts[1:-1]:
            shift = radius * Q(rng.randrange(-den + 1, den)) / (2 * den)
            vals.append(min(max(t + shift, ZERO), L))
        vals.append(L)
        for k in range(knots):
            pieces.append((edge.index, cuts[k], cuts[k + 1], edge.index, vals[k], vals[k + 1]))
    return PLMap(g, pieces)


def robustness_samples(g_map: PLMap, xi, count: int, seed: int) -> list[PLMap]:
    """Maps ``phi o g`` with random wiggles ``phi``, each strictly within ``xi``."""
    out = []
    for k in range(count):
        phi = random_wiggle(g_map.graph, xi, seed * 1000 + k)
        h = compose(phi, g_map)
        if not sup_distance(g_map, h).upper < xi:
            raise AssertionError("wiggle left the xi-ball")
        out.append(h)
    return out


# shadowing gadget -----------------------------------------------------------------------------


@dataclass
class ShadowingResult:
    g: PLMap
    xi: object
    delta: object
    gadget: PerturbationGadget
    cover: InteriorCover

    def __iter__(self):
        return iter((self.g, self.xi, self.delta))


def _interior_hits(index: CellIndex, cells, Z: Cell) -> set:
    hits = set()
    for j in index.meeting(Z):
        meet = Z & cells[j]
        if meet.length() > 0 or any(cells[j].interior_contains(p) for p in meet.points()):
            hits.add(j)
    return hits


def _shadow_build(f: PLMap, cover: InteriorCover, nu):
    g = f.graph
    cells = cover.cells
    lam = cover.lebesgue
    plats = {}
    for i, (e, a, b) in enumerate(cover.private_parts):
        best = _largest(_plateaus_in(f, e, a, b))
        if best is None:
            return None
        plats[i] = (e, best[0], best[1])
    xi = min([lam / 4, nu / 8] + [(b - a) / 10 for _, a, b in plats.values()])
    anchors = {i: (g.point(e, (a + b) / 2), g.point(e, (a + b) / 2 - 3 * xi))
               for i, (e, a, b) in plats.items()}
    index = CellIndex(cells)
    pieces, windows, families = [], {}, {}
    for i, (e, a, b) in plats.items():
        img = f.image(cells[i])
        c = f(g.point(e, a))
        fam = _interior_hits(index, cells, img)
        while True:
            K = img
            for j in sorted(fam):
                K = K | cells[j]
            order = sorted(fam)
            tp = _lay_path(ZERO, xi, cell_walk(K, c, anchors[order[0]][1], cover=False), c)
            wp, wins, end = _window_track(K, anchors[order[0]][1], order, anchors, xi, 2 * xi)
            tp += wp
            tp += lay(-1, 2 * xi, 3 * xi, [(end.e, end.t, end.t, 1)])
            route = Cell(g, [(p.te, p.a, p.b) for p in tp])
            grown = fam | _interior_hits(index, cells, route)
            if grown == fam:
                break
            fam = grown
        families[i] = order
        for j, span in wins.items():
            windows[(i, j)] = span
        x = anchors[i][0].t
        knots = [(a, ZERO), (x - 3 * xi, ZERO), (x, 3 * xi), (x + 3 * xi, ZERO), (b, ZERO)]
        knots = [k for n, k in enumerate(knots) if n == 0 or k[0] > knots[n - 1][0]]
        pieces.extend(_compose_scale(e, knots, tp))
    h = with_pieces(f, pieces)
    gadget = PerturbationGadget("shadowing", xi, plats, anchors, 3 * xi, windows, {}, families)
    return h, xi, gadget


def shadowing_perturbation(f: PLMap, eps, nu, *, max_halvings: int = 8) -> ShadowingResult:
    """A map within ``nu`` of ``f`` whose ``delta``-chains are ``eps``-shadowed.

    Built on an interior cover of mesh below ``min(eps, nu/4, diam X)``:
    each cell gets a private plateau whose centre ``x_F`` is pushed,
    through windows, onto the arcs ``y_{F'} -> x_{F'}`` of every cell the
    chain could step into next.  ``delta`` is half the Lebesgue number.
    """
    eps, nu = Q(eps), Q(nu)
    if eps <= 0 or nu <= 0:
        raise ValueError("eps and nu must be positive")
    g = f.graph
    dprime = min(eps, nu / 4, g.diameter()) / 2
    for _ in range(max_halvings):
        cover = interior_cover(g, dprime)
        if all(f.image(c).diameter() < nu / 4 for c in cover.cells):
            built = _shadow_build(f, cover, nu)
            if built is not None:
                h, xi, gadget = built
                if sup_distance(f, h).upper < nu:
                    return ShadowingResult(h, xi, cover.lebesgue / 2, gadget, cover)
        dprime /= 2
    raise ConstructionError("no admissible cover scale found", "delta")


def _cells_with_interior(index: CellIndex, cells, pts) -> list[int]:
    g = cells[0].graph
    probe = Cell(g, [(p.e, p.t, p.t) for p in pts])
    cand = index.meeting(probe)
    return [j for j in cand if all(cells[j].interior_contains(p) for p in pts)]


def key_claim_witness(res: ShadowingResult, chain, eps, h: PLMap | None = None
                      ) -> Optional[ShadowWitness]:
    """Shadow a chain by pulling window arcs back through the gadget.

    Chooses cells ``F_i`` holding ``h(x_{i-1})`` and ``x_i`` in their
    interiors, then pulls the arc ``[y_{F_n}, x_{F_n}]`` back along the
    window arcs with :func:`subcell_with_image`.
    """
    h = h or res.g
    g = h.graph
    cells = res.cover.cells
    index = CellIndex(cells)
    gad = res.gadget
    chain = [g.check_point(p) for p in chain]
    picks = []
    for k, x in enumerate(chain):
        pts = [x] if k == 0 else [h(chain[k - 1]), x]
        hits = _cells_with_interior(index, cells, pts)
        if not hits:
            return None
        picks.append(hits[0])
    arcs = []
    for i in picks:
        x, y = gad.anchors[i]
        arcs.append(Cell(g, [(x.e, y.t, x.t)]))
    D = arcs[-1]
    for k in range(len(chain) - 2, -1, -1):
        try:
            D = subcell_with_image(h, arcs[k], D)
        except MapError:
            return None
    w = ShadowWitness(D.first_point(), tuple(chain), Q(eps))
    return w if w.replay(h) else None


def random_chain(f: PLMap, delta, length: int, rng: random.Random) -> list[GraphPoint]:
    """A seeded ``delta``-chain: each step lands uniformly near the image."""
    g = f.graph
    delta = Q(delta)
    den = 1 << 16

    def pick(c: Cell) -> GraphPoint:
        total = c.length()
        if total == 0:
            return c.first_point()
        u = total * Q(rng.randrange(den)) / den
        for e, lo, hi in c.segments:
            if u <= hi - lo:
                return g.point(e, lo + u)
            u -= hi - lo
        e, lo, hi = c.segments[-1]
        return g.point(e, hi)

    x = pick(g.whole())
    out = [x]
    for _ in range(length - 1):
        ball = g.ball(f(x), delta * Q("255/256"))
        x = pick(ball)
        out.append(x)
    if not ChainCertificate(tuple(out), delta).replay(f):
        raise AssertionError("random chain is not a delta-chain")
    return out
