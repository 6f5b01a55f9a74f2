"""Brute-force reference computations, independent of the package internals.

Interval maps are handled as knot lists ``[(x0, y0), ..., (xk, yk)]`` with
``x0 = 0 < ... < xk = 1`` and evaluated with :class:`fractions.Fraction`.
"""

from __future__ import annotations

import random
from collections import deque
from fractions import Fraction as F

from peano_chaos.pl_map import PLMap
from peano_chaos.spaces import interval


def evaluate(knots, x):
    x = F(x)
    for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise ValueError("outside the domain")


def image(knots, lo, hi):
    """Exact image of ``[lo, hi]``: extremes occur at the ends or at knots."""
    vals = [evaluate(knots, lo), evaluate(knots, hi)]
    vals += [y for x, y in knots if lo < x < hi]
    return min(vals), max(vals)


def fixed_points(knots):
    """Isolated fixed points by solving each linear piece; None if a piece lies on the diagonal."""
    out = set()
    for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
        slope = (y1 - y0) / (x1 - x0)
        if slope == 1:
            if y0 == x0:
                return None
            continue
        x = (y0 - slope * x0) / (1 - slope)
        if x0 <= x <= x1:
            out.add(x)
    return out


def to_plmap(knots, g=None) -> PLMap:
    g = g or interval()
    return PLMap(g, [(0, x0, x1, 0, y0, y1)
                     for (x0, y0), (x1, y1) in zip(knots, knots[1:])])


def random_knots(rng: random.Random, max_pieces: int = 16, den: int = 64):
    n = rng.randint(1, max_pieces)
    xs = sorted(rng.sample(range(1, den), n - 1))
    xs = [F(0)] + [F(x, den) for x in xs] + [F(1)]
    if rng.random() < 0.5:
        ys = [F(rng.randint(0, den), den) for _ in xs]
    else:
        # oscillation between the ends, jittered; often chain transitive
        flip = rng.randint(0, 1)
        ys = [F(abs((i + flip) % 2 * den - rng.randint(0, 4)), den) for i in range(len(xs))]
    return list(zip(xs, ys))


def grid_chain_transitive(knots, delta) -> bool:
    """Pointwise delta-chain reachability on the grid of step delta/8.

    Node ``i`` stands for ``i * delta / 8``; ``i -> j`` when
    ``|f(x_i) - x_j| < delta``.  The verdict is strong connectivity.
    """
    delta = F(delta)
    step = delta / 8
    n = int(1 / step)
    xs = [step * i for i in range(n + 1)]
    if xs[-1] != 1:
        xs.append(F(1))
    fx = [evaluate(knots, x) for x in xs]

    def succ(i):
        lo, hi = fx[i] - delta, fx[i] + delta
        return [j for j, y in enumerate(xs) if lo < y < hi]

    def pred_table():
        table = [[] for _ in xs]
        for i in range(len(xs)):
            for j in succ(i):
                table[j].append(i)
        return table

    def reaches_all(adj):
        seen = {0}
        todo = deque([0])
        while todo:
            i = todo.popleft()
            for j in adj(i):
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        return len(seen) == len(xs)

    preds = pred_table()
    return reaches_all(succ) and reaches_all(lambda i: preds[i])


def tent_dyadic_leo(m: int) -> int:
    """The tent map stretches a level-m dyadic interval onto [0, 1] in exactly m steps."""
    return m


def graph_distance(g, p, q):
    """Dijkstra on the graph with ``p`` and ``q`` spliced in as extra nodes."""
    import networkx as nx

    G = nx.MultiGraph()
    G.add_nodes_from(g.vertices)
    cuts = {}
    for name, pt in (("P", p), ("Q", q)):
        cuts.setdefault(pt.e, []).append((F(pt.t), name))
    for e in g.edges:
        stops = [(F(0), e.u)] + sorted(cuts.get(e.index, [])) + [(F(e.length), e.v)]
        for (a, x), (b, y) in zip(stops, stops[1:]):
            G.add_edge(x, y, weight=b - a)
    return F(nx.shortest_path_length(G, "P", "Q", weight="weight"))


def sup_distance(k1, k2):
    """On the interval |f - g| is piecewise linear, so its maximum sits at a knot."""
    xs = {x for x, _ in k1} | {x for x, _ in k2}
    return max(abs(evaluate(k1, x) - evaluate(k2, x)) for x in xs)


def preimage_points(knots, y):
    """Solutions of f(x) = y on pieces that are not constant."""
    out = set()
    for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
        if y0 != y1 and min(y0, y1) <= y <= max(y0, y1):
            out.add(x0 + (y - y0) * (x1 - x0) / (y1 - y0))
    return out


def tent_power_knots(k):
    """tent^k is the zigzag through (j / 2^k, j mod 2)."""
    n = 2**k
    return [(F(j, n), F(j % 2)) for j in range(n + 1)]
