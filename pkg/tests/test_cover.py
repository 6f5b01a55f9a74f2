from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import SPACE_NAMES
from peano_chaos.cover import (CellIndex, interior_cover, lebesgue_number, partition, refine,
                               refinement_chain)
from peano_chaos.metric_graph import Cell
from peano_chaos.spaces import GOLDEN, interval

scales = st.integers(2, 40).map(lambda k: F(1, k))


def assert_partition(p, eps):
    g = p.graph
    whole = Cell(g, [])
    for c in p.cells:
        assert c.is_connected() and c.length() > 0
        assert c.diameter() < eps
        whole = whole | c
    assert whole.is_whole()
    for i, a in enumerate(p.cells):
        for b in p.cells[i + 1:]:
            assert (a & b).length() == 0  # interiors are disjoint
    assert p.mesh == max(c.diameter() for c in p.cells)


@given(st.sampled_from(SPACE_NAMES), scales)
def test_partition_contract(name, eps):
    assert_partition(partition(GOLDEN[name](), eps), eps)


def test_interval_partition_example():
    p = partition(interval(), "0.3")
    assert [c.segments for c in p.cells] == [((0, F(k, 4), F(k + 1, 4)),) for k in range(4)]
    assert p.mesh == F(1, 4)


def test_refinement_chain_meshes(space):
    chain = refinement_chain(space, 4)
    for k, p in enumerate(chain, start=1):
        assert p.mesh < F(1, 2**k)
        assert k == 1 or p.mesh < chain[k - 2].mesh
    for coarse, fine in zip(chain, chain[1:]):
        for i, c in enumerate(fine.cells):
            assert c.issubset(coarse.cells[fine.parent_index[i]])


def test_refine_interval_quarters():
    p = refine(partition(interval(), "0.3"), F(1, 8))
    assert len(p) == 12  # strict mesh < 1/8 forces thirds of each quarter
    assert p.mesh == F(1, 12)
    assert all(c.issubset(p.parent.cells[i]) for c, i in zip(p.cells, p.parent_index))


def test_triod_half_edges():
    from peano_chaos.spaces import triod
    p = partition(triod(), "0.6")
    assert len(p) == 6
    hub = [c for c in p.cells if c.contains_point(p.graph.vertex_point("o"))]
    assert len(hub) == 3
    assert all((a & b).segments == ((0, 0, 0),) for a in hub for b in hub if a is not b)


def test_interval_chain_counts():
    assert [len(p) for p in refinement_chain(interval(), 3)] == [3, 6, 12]


@given(st.sampled_from(SPACE_NAMES), scales, scales)
def test_refine_with_adjuster_stays_fine(name, e1, e2):
    g = GOLDEN[name]()
    coarse = partition(g, max(e1, e2))
    eps = min(e1, e2)
    assume(eps < coarse.mesh)

    def adjust(e, t, lo, hi):
        return (t + hi) / 2

    fine = refine(coarse, eps, adjust)
    assert_partition(fine, eps)


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_interior_cover_lebesgue(name):
    g = GOLDEN[name]()
    cov = interior_cover(g, F(1, 5))
    lam = cov.lebesgue
    assert lam > 0
    # every ball of radius below the Lebesgue number sits in one cell
    for e in g.edges:
        for k in range(33):
            x = g.point(e.index, e.length * k / 32)
            ball = g.ball(x, lam / 2)
            assert any(ball.in_interior_of(c) for c in cov.cells)
    for i, c in enumerate(cov.cells):
        priv = cov.private_cell(i)
        assert priv.issubset(c)
        others = [d for j, d in enumerate(cov.cells) if j != i]
        assert all((priv & d).length() == 0 for d in others)


def test_lebesgue_number_of_halves():
    g = interval()
    cells = [Cell(g, [(0, 0, "5/8")]), Cell(g, [(0, "3/8", 1)])]
    # the worst point is 1/2: it sits 1/8 from either complement
    assert lebesgue_number(g, cells) == F(1, 8)


def test_cell_index_matches_scan(space):
    p = partition(space, F(1, 7))
    idx = CellIndex(p.cells)
    for q in partition(space, F(1, 3)).cells:
        want = [i for i, c in enumerate(p.cells) if not (c & q).is_empty()]
        assert sorted(idx.meeting(q)) == want
