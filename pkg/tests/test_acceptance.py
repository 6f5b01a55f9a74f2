"""End-to-end acceptance criteria, each with its tolerance and time budget.

Every producer below returns its canonical JSON artifacts (maps, manifests,
reports) so the determinism criterion can rerun it and compare bytes.
"""

import random
import time
from fractions import Fraction as F

import pytest

import oracles
from conftest import SPACE_NAMES, record
from peano_chaos.construct import (break_chain_transitivity, canonical_json, exact_devaney,
                                   lc_approx, leo_from_ct, mixing_perturbation, random_chain,
                                   robustness_samples, shadowing_perturbation, surjective_lc)
from peano_chaos.cover import refinement_chain
from peano_chaos.metric_graph import Cell
from peano_chaos.pl_map import identity, sup_distance, tent
from peano_chaos.spaces import GOLDEN, interval, triod
from peano_chaos.verify import (PASS, chain_transitive, chain_transitive_at, gn_membership,
                                leo_order, periodic_atlas, shadowing_witness)

ARTIFACTS: dict = {}
DETAILS: dict = {}


def note(criterion: int, line: str) -> None:
    """Accumulate one line per case; the criterion passes when every case did."""
    lines = DETAILS.setdefault(criterion, [])
    lines.append(line)
    record(criterion, all(":ok" in x for x in lines), " | ".join(lines))


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def art(obj) -> bytes:
    return canonical_json(obj).encode()


# 1 ----------------------------------------------------------------------------------------------


def test_criterion_1_interval_sanity():
    t0 = time.perf_counter()
    f = tent()
    g = f.graph
    k = leo_order(f, Cell(g, [(0, 0, "1/4")]), 10)
    fixed = {p.t for p in periodic_atlas(f, 1).points()}
    ct = chain_transitive(f, ["1/4", "1/16", "1/64"]).verdict
    secs = time.perf_counter() - t0
    ok = (k == 2 and fixed == oracles.fixed_points(oracles.tent_power_knots(1)) == {0, F(2, 3)}
          and ct == PASS and secs < 1)
    record(1, ok, f"leo={k} fixed={sorted(map(str, fixed))} ct={ct} {secs:.2f}s (<1s)")
    assert ok


# 2 ----------------------------------------------------------------------------------------------

DEVANEY_SEEDS = {name: i + 1 for i, name in enumerate(SPACE_NAMES)}


def produce_devaney(name):
    build = exact_devaney(GOLDEN[name](), F(1, 2), 4, seed=DEVANEY_SEEDS[name])
    return build, {"map": art(build.final.to_json()),
                   "manifest": art(build.manifest("exact-devaney"))}


def check_devaney(build):
    first, final = build.rounds[0], build.final
    bound = 2 * first.F.mesh
    problems = []
    if not build.passed:
        problems.append("clause FAIL")
    d = sup_distance(first.g, final).upper
    if not (d <= bound <= 1):
        problems.append(f"d={d} > {bound}")
    for c in build.rounds[2].F.cells:
        if leo_order(final, c, 2 + build.n0) is None:
            problems.append("F_2 cell not onto")
            break
    S = build.rounds[-1].S
    if {final(p) for p in S} != set(S):
        problems.append("S_4 not invariant")
    for c in build.rounds[-1].F.cells:
        if not any(c.contains_point(p) for p in S):
            problems.append("S_4 misses a cell")
            break
    return problems, d


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_criterion_2_exact_devaney(name):
    (build, arts), secs = timed(produce_devaney, name)
    ARTIFACTS[("2", name)] = arts
    problems, d = check_devaney(build)
    if secs >= 60:
        problems.append(f"{secs:.1f}s")
    ok = not problems
    note(2, f"{name}:{'ok' if ok else ','.join(problems)} d={d} {secs:.1f}s")
    assert ok, problems


# 3 ----------------------------------------------------------------------------------------------


def produce_break(name):
    g = GOLDEN[name]()
    f = lc_approx(identity(g), F(1, 8), F(1, 8))
    h, cert = break_chain_transitivity(f, F(1, 4))
    return (f, h, cert), {"map": art(h.to_json()), "certificate": art(cert.to_json())}


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_criterion_3_break_ct(name):
    t0 = time.perf_counter()
    (f, h, cert), arts = produce_break(name)
    ARTIFACTS[("3", name)] = arts
    verdict = chain_transitive(h).verdict
    d = sup_distance(f, h).upper
    secs = time.perf_counter() - t0
    ok = cert.replay(h) and cert.gap > 0 and verdict == "FAIL" and d < F(1, 4) and secs < 10
    note(3, f"{name}:{'ok' if ok else 'bad'} gap={cert.gap} d={d} {secs:.1f}s")
    assert ok


# 4 ----------------------------------------------------------------------------------------------


def produce_leo():
    f = lc_approx(tent(), F(1, 400), F(1, 16))
    build = leo_from_ct(f, F(1, 4), 3, seed=4)
    return (f, build), {"map": art(build.final.to_json()),
                        "manifest": art(build.manifest("leo-from-ct"))}


def test_criterion_4_leo_from_ct():
    t0 = time.perf_counter()
    (f, build), arts = produce_leo()
    ARTIFACTS[("4",)] = arts
    final = build.final
    ct_in = chain_transitive(f).verdict
    orders = [leo_order(final, c, 1 + build.n0) for c in build.rounds[1].F.cells]
    d = sup_distance(f, final).upper
    secs = time.perf_counter() - t0
    ok = (ct_in == PASS and build.passed and None not in orders and d < F(1, 4) and secs < 60)
    record(4, ok, f"n0={build.n0} F_1 cells={len(orders)} max k={max(o or 0 for o in orders)} "
                  f"d={d} {secs:.1f}s (<60s)")
    assert ok


# 5 ----------------------------------------------------------------------------------------------

MIXING_CASES = {
    "tent": (lambda g: lc_approx(tent(g), F(1, 16), F(1, 8)), F(3, 2)),
    "identity": (lambda g: lc_approx(identity(g), F(1, 16), F(1, 8)), F(7, 8)),
}


def produce_mixing(case):
    g = interval()
    make, eps = MIXING_CASES[case]
    f = make(g)
    H = refinement_chain(g, 2)[-1]
    res = mixing_perturbation(f, H, eps)
    samples = robustness_samples(res.g, res.xi, 10, seed=5)
    reports = [gn_membership(h, H, res.horizon) for h in [res.g, *samples]]
    return (f, H, res, samples, reports, eps), {
        "map": art(res.g.to_json()), "gadget": art(res.gadget.to_json(g)),
        "reports": art([r.to_json() for r in reports])}


@pytest.mark.parametrize("case", sorted(MIXING_CASES))
def test_criterion_5_mixing(case):
    t0 = time.perf_counter()
    (f, H, res, samples, reports, eps), arts = produce_mixing(case)
    ARTIFACTS[("5", case)] = arts
    g = f.graph
    anchors = all(g.distance(x, y) == 3 * res.xi for x, y in res.gadget.anchors.values())
    close = all(sup_distance(res.g, h).upper < res.xi for h in samples)
    passes = sum(r.verdict == PASS for r in reports)
    secs = time.perf_counter() - t0
    ok = (H.mesh < F(1, 4) and anchors and close and passes == 11 and res.horizon == 4 * res.n0
          and sup_distance(f, res.g).upper < eps and secs < 120)
    note(5, f"{case}:{'ok' if ok else 'bad'} |H|={len(H)} xi={res.xi} K={res.horizon} "
            f"G_n {passes}/11 {secs:.1f}s")
    assert ok


# 6 ----------------------------------------------------------------------------------------------

SHADOW_MAPS = {
    "interval": lambda: lc_approx(tent(), F(1, 200), F(1, 8)),
    "triod": lambda: surjective_lc(triod(), eta=F(1, 2), grain=F(1, 256)),
}


def produce_shadowing(name):
    f = SHADOW_MAPS[name]()
    res = shadowing_perturbation(f, F(1, 5), F(3, 10))
    rng = random.Random(6)
    witnesses = []
    for _ in range(100):
        chain = random_chain(res.g, res.delta, rng.randint(2, 50), rng)
        witnesses.append(shadowing_witness(res.g, chain, F(1, 5), delta=res.delta))
    g = f.graph
    return (f, res, witnesses), {
        "map": art(res.g.to_json()), "gadget": art(res.gadget.to_json(g)),
        "witnesses": art([w.to_json(g) if w else None for w in witnesses])}


@pytest.mark.parametrize("name", sorted(SHADOW_MAPS))
def test_criterion_6_shadowing(name):
    t0 = time.perf_counter()
    (f, res, witnesses), arts = produce_shadowing(name)
    ARTIFACTS[("6", name)] = arts
    good = sum(w is not None and w.replay(res.g) for w in witnesses)
    secs = time.perf_counter() - t0
    ok = good == 100 and res.delta == res.cover.lebesgue / 2 and secs < 120
    note(6, f"{name}:{'ok' if ok else 'bad'} delta={res.delta} witnesses {good}/100 "
            f"{secs:.1f}s")
    assert ok


# 7 ----------------------------------------------------------------------------------------------


def test_criterion_7_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(7)
    agree, passes = 0, 0
    for _ in range(20):
        knots = oracles.random_knots(rng)
        ours = chain_transitive_at(oracles.to_plmap(knots), F(1, 16)).verdict == PASS
        agree += ours == oracles.grid_chain_transitive(knots, F(1, 16))
        passes += ours
    secs = time.perf_counter() - t0
    ok = agree == 20 and secs < 60
    record(7, ok, f"agree {agree}/20 (PASS verdicts {passes}) {secs:.1f}s (<60s)")
    assert ok


# 8 ----------------------------------------------------------------------------------------------

PRODUCERS = {"2": produce_devaney, "3": produce_break, "4": produce_leo,
             "5": produce_mixing, "6": produce_shadowing}
RUNS = ([("2", n) for n in SPACE_NAMES] + [("3", n) for n in SPACE_NAMES] + [("4",)]
        + [("5", c) for c in sorted(MIXING_CASES)] + [("6", n) for n in sorted(SHADOW_MAPS)])


def test_criterion_8_determinism():
    mismatched = []
    for key in RUNS:
        producer = PRODUCERS[key[0]]
        first = ARTIFACTS.get(key) or producer(*key[1:])[1]
        second = producer(*key[1:])[1]
        for name in first:
            if first[name] != second[name]:
                mismatched.append(f"{'/'.join(key)}:{name}")
    ok = not mismatched
    record(8, ok, f"{len(RUNS)} reruns byte-identical" if ok else "differs: " + ", ".join(mismatched))
    assert ok, mismatched
