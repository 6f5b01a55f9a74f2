import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from peano_chaos.spaces import GOLDEN  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SPACE_NAMES = sorted(GOLDEN)


@pytest.fixture(params=SPACE_NAMES)
def space(request):
    return GOLDEN[request.param]()


def dyadic(den=64, lo=0, hi=1):
    """Rationals k/den in [lo, hi]."""
    return st.integers(int(lo * den), int(hi * den)).map(lambda k: Fraction(k, den))


@st.composite
def graph_points(draw, g, den=64):
    edge = draw(st.sampled_from(g.edges))
    k = draw(st.integers(0, den))
    return g.point(edge.index, edge.length * k / den)


@st.composite
def knot_maps(draw, max_pieces=16, den=64):
    """Random continuous PL interval maps as knot lists."""
    n = draw(st.integers(1, max_pieces))
    inner = draw(st.lists(st.integers(1, den - 1), min_size=n - 1, max_size=n - 1, unique=True))
    xs = [Fraction(0)] + [Fraction(x, den) for x in sorted(inner)] + [Fraction(1)]
    ys = draw(st.lists(dyadic(den), min_size=len(xs), max_size=len(xs)))
    return list(zip(xs, ys))


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: dict = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
