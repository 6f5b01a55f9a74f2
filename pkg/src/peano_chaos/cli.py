"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 construction failure, 4 verification
FAIL (also used when a suite overflows the piece cap and stays inconclusive).  Every JSON artifact is written with sorted keys so identical inputs
and seeds give byte-identical files; wall-clock timings go to a separate
``timings.json`` so they never disturb that.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from typing import Sequence

from ._rational import Q, fmt
from .construct import (ConstructionError, break_chain_transitivity, exact_devaney,
                        leo_from_ct, map_digest, mixing_perturbation, random_chain,
                        robustness_samples, shadowing_perturbation, surjective_lc)
from .cover import partition, refinement_chain
from .metric_graph import Cell, GraphError, MetricGraph
from .pl_map import MapError, PieceOverflowError, PLMap, sup_distance
from .spaces import GOLDEN
from .verify import (DEFAULT_SCHEDULE, chain_transitive, gn_membership, leo_order,
                     periodic_atlas, shadowing_witness)

EXIT_OK, EXIT_INPUT, EXIT_CONSTRUCT, EXIT_FAIL = 0, 2, 3, 4


class InputError(Exception):
    pass


# parsing helpers ------------------------------------------------------------------------------


def rational(text: str):
    try:
        return Q(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def rational_list(text: str) -> list:
    return [rational(t) for t in text.split(",") if t.strip()]


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def load_space(arg: str) -> MetricGraph:
    """A graph file, or the name of a built-in space when no such file exists."""
    if not os.path.exists(arg) and arg in GOLDEN:
        return GOLDEN[arg]()
    data = _read_json(arg)
    try:
        return MetricGraph.from_json(data.get("space", data))
    except (GraphError, KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"invalid space in {arg}: {exc}") from exc


def load_map(path: str) -> PLMap:
    data = _read_json(path)
    try:
        return PLMap.from_json(data)
    except (MapError, GraphError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid map in {path}: {exc}") from exc


def parse_point(g: MetricGraph, text: str):
    """``EDGE:OFFSET`` or a bare offset on the first edge."""
    try:
        if ":" in text:
            edge, off = text.rsplit(":", 1)
        else:
            edge, off = g.edges[0].id, text
        return g.point(edge, Q(off))
    except (GraphError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad point {text!r}: {exc}") from exc


def parse_cell(g: MetricGraph, text: str) -> Cell:
    """``EDGE:LO,HI`` or ``LO,HI`` on the first edge."""
    try:
        edge = g.edges[0].id
        body = text
        if ":" in text:
            edge, body = text.split(":", 1)
        lo, hi = body.split(",")
        return Cell(g, [(g.edge(edge).index, Q(lo), Q(hi))])
    except (GraphError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad cell {text!r}: {exc}") from exc


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(path: str | None, data) -> None:
    text = dumps(data)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _emit_timings(args, started: float) -> None:
    if getattr(args, "out", None) and os.path.isdir(args.out):
        write_json(os.path.join(args.out, "timings.json"),
                   {"command": args.command, "seconds": round(time.perf_counter() - started, 3)})


# commands -----------------------------------------------------------------------------------


def cmd_partition(args) -> int:
    g = load_space(args.space)
    write_json(args.out, partition(g, args.eps).to_json())
    return EXIT_OK


def _failure(out: str, kind: str, exc: ConstructionError) -> int:
    record = {"schema": 1, "kind": kind, "verdict": "FAIL",
              "clause": exc.clause, "error": str(exc)}
    write_json(os.path.join(out, "manifest.json"), record)
    print(f"construction failed (clause {exc.clause}): {exc}", file=sys.stderr)
    return EXIT_CONSTRUCT


def cmd_synthesize(args) -> int:
    out = _outdir(args)
    kind = args.kind
    try:
        if kind == "exact-devaney":
            build = exact_devaney(load_space(args.space), args.eps, args.depth,
                                  eta=args.eta, seed=args.seed)
            result, manifest = build.final, build.manifest(kind)
        elif kind == "leo-from-ct":
            f = load_map(args.map)
            build = leo_from_ct(f, args.eps, args.depth, eta=args.eta,
                                horizon=args.horizon, seed=args.seed)
            result, manifest = build.final, build.manifest(kind)
        else:
            g = load_space(args.space)
            K = Cell(g, [(p.e, p.t, p.t) for p in (parse_point(g, t) for t in args.K)])
            y0 = parse_point(g, args.y0) if args.y0 else None
            anchors = []
            for text in args.anchor:
                if "=" not in text:
                    raise InputError(f"anchor needs X=Y, got {text!r}")
                x, y = text.split("=", 1)
                anchors.append((parse_point(g, x), parse_point(g, y)))
            try:
                result = surjective_lc(g, K, anchors, y0, args.eta, grain=args.grain)
            except MapError as exc:
                raise ConstructionError(str(exc), "precondition") from exc
            checks = {
                "surjective": result.image(g.whole()) == g.whole(),
                "pins": all(result(x) == y for x, y in anchors)
                and all(result(p) == y0 for p in K.points()),
                "lc_fraction": result.lc_fraction() >= 1 - args.eta,
            }
            manifest = {
                "schema": 1, "kind": kind,
                "params": {"eta": fmt(args.eta), "seed": args.seed},
                "checks": {k: ("PASS" if v else "FAIL") for k, v in checks.items()},
                "lc_fraction": fmt(result.lc_fraction()),
                "output_sha256": map_digest(result),
                "verdict": "PASS" if all(checks.values()) else "FAIL",
            }
    except ConstructionError as exc:
        return _failure(out, kind, exc)
    manifest["output"] = "map.json"
    write_json(os.path.join(out, "map.json"), result.to_json())
    write_json(os.path.join(out, "manifest.json"), manifest)
    return EXIT_OK if manifest["verdict"] == "PASS" else EXIT_CONSTRUCT


def cmd_perturb(args) -> int:
    out = _outdir(args)
    kind = args.kind
    f = load_map(args.map)
    g = f.graph
    record = {"schema": 1, "kind": kind, "input_sha256": map_digest(f),
              "params": {"eps": fmt(args.eps), "seed": args.seed}}
    try:
        if kind == "break-ct":
            h, cert = break_chain_transitivity(f, args.eps)
            write_json(os.path.join(out, "certificate.json"), cert.to_json())
            record["gap"] = fmt(cert.gap)
            record["replay"] = cert.replay(h)
        elif kind == "mixing":
            H = h_cover(g, args.n)
            res = mixing_perturbation(f, H, args.eps, horizon=args.horizon)
            h = res.g
            record["params"]["n"] = args.n
            record.update({"xi": fmt(res.xi), "n0": res.n0, "horizon": res.horizon,
                           "anchor_distances_3xi": all(
                               g.distance(x, y) == 3 * res.xi
                               for x, y in res.gadget.anchors.values())})
            if args.samples:
                samples = robustness_samples(h, res.xi, args.samples, args.seed)
                record["samples"] = [gn_membership(s, H, res.horizon).verdict for s in samples]
            write_json(os.path.join(out, "gadget.json"), res.gadget.to_json(g))
        else:
            res = shadowing_perturbation(f, args.eps, args.nu)
            h = res.g
            record["params"]["nu"] = fmt(args.nu)
            record.update({"xi": fmt(res.xi), "delta": fmt(res.delta),
                           "lebesgue": fmt(res.cover.lebesgue), "cells": len(res.cover.cells)})
            write_json(os.path.join(out, "gadget.json"), res.gadget.to_json(g))
    except ConstructionError as exc:
        return _failure(out, kind, exc)
    record["distance"] = fmt(sup_distance(f, h).upper)
    record["output_sha256"] = map_digest(h)
    record["output"] = "map.json"
    write_json(os.path.join(out, "map.json"), h.to_json())
    write_json(os.path.join(out, "manifest.json"), record)
    return EXIT_OK


def h_cover(g: MetricGraph, n: int):
    """``H_n`` of the standard refining sequence (mesh below ``2**-n``)."""
    if n < 1:
        raise InputError("--n must be at least 1")
    return refinement_chain(g, n)[-1]


def _suite_ct(f: PLMap, args) -> dict:
    rep = chain_transitive(f, args.schedule)
    return {"verdict": rep.verdict, "schedule": [fmt(d) for d in args.schedule],
            "levels": [lvl.to_json(f.graph) for lvl in rep.levels]}


def _suite_leo(f: PLMap, args) -> dict:
    g = f.graph
    cells = [parse_cell(g, c) for c in args.cell] if args.cell else list(
        partition(g, args.cells_eps).cells)
    rows = []
    for c in cells:
        k = leo_order(f, c, args.kmax)
        rows.append({"cell": c.to_json(), "k": k})
    ok = all(r["k"] is not None for r in rows)
    return {"verdict": "PASS" if ok else "FAIL", "kmax": args.kmax, "cells": rows}


def _suite_mixing(f: PLMap, args) -> dict:
    H = h_cover(f.graph, args.n)
    rep = gn_membership(f, H, args.horizon)
    out = rep.to_json()
    out["n"] = args.n
    out["cells"] = len(H.cells)
    return out


def _suite_shadowing(f: PLMap, args) -> dict:
    rng = random.Random(args.seed)
    rows = []
    ok = True
    for _ in range(args.chains):
        chain = random_chain(f, args.delta, rng.randint(2, args.length), rng)
        w = shadowing_witness(f, chain, args.eps, delta=args.delta)
        if w is None:
            ok = False
            rows.append({"witness": None, "length": len(chain)})
        else:
            rows.append({"witness": w.to_json(f.graph), "length": len(chain)})
    return {"verdict": "PASS" if ok else "FAIL", "eps": fmt(args.eps),
            "delta": fmt(args.delta), "seed": args.seed, "chains": rows}


def _suite_periodic(f: PLMap, args) -> dict:
    atlas = periodic_atlas(f, args.kmax, args.sample)
    out = atlas.to_json(f.graph)
    out["kmax"] = args.kmax
    out["verdict"] = "PASS" if atlas.replay(f) else "FAIL"
    return out


SUITES = {"ct": _suite_ct, "leo": _suite_leo, "mixing": _suite_mixing,
          "shadowing": _suite_shadowing, "periodic": _suite_periodic}


def cmd_verify(args) -> int:
    f = load_map(args.map)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    report = {"schema": 1, "map_sha256": map_digest(f), "suites": {}}
    for name in names:
        try:
            report["suites"][name] = SUITES[name](f, args)
        except PieceOverflowError as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            report["suites"][name] = {"verdict": "OVERFLOW", "error": str(exc)}
    verdicts = [s["verdict"] for s in report["suites"].values()]
    if all(v == "PASS" for v in verdicts):
        report["verdict"] = "PASS"
    else:
        report["verdict"] = "FAIL" if "FAIL" in verdicts else "INCONCLUSIVE"
    write_json(args.out, report)
    return EXIT_OK if report["verdict"] == "PASS" else EXIT_FAIL


# argument parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="peano-chaos",
                                description="Construct and verify chaotic maps on metric graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    part = sub.add_parser("partition", help="slice a space into small cells")
    part.add_argument("--space", required=True, help="graph JSON file or built-in name")
    part.add_argument("--eps", type=rational, required=True)
    part.add_argument("--out", help="output file (default: stdout)")
    part.set_defaults(func=cmd_partition)

    syn = sub.add_parser("synthesize", help="build a map")
    syn.add_argument("kind", choices=["exact-devaney", "leo-from-ct", "surjective-lc"])
    syn.add_argument("--space", help="graph JSON file or built-in name")
    syn.add_argument("--map", help="input map JSON (leo-from-ct)")
    syn.add_argument("--eps", type=rational, default=Q("1/2"))
    syn.add_argument("--eta", type=rational, default=Q("1/8"))
    syn.add_argument("--depth", type=int, default=3)
    syn.add_argument("--horizon", type=int, default=64)
    syn.add_argument("--grain", type=rational, default=None)
    syn.add_argument("--K", action="append", default=[], metavar="POINT",
                     help="point of K (repeatable), EDGE:OFFSET")
    syn.add_argument("--y0", help="value on K, EDGE:OFFSET")
    syn.add_argument("--anchor", action="append", default=[], metavar="X=Y")
    syn.add_argument("--seed", type=int, required=True)
    syn.add_argument("--out", required=True, help="output directory")
    syn.set_defaults(func=cmd_synthesize)

    per = sub.add_parser("perturb", help="perturb a map")
    per.add_argument("kind", choices=["mixing", "shadowing", "break-ct"])
    per.add_argument("--map", required=True)
    per.add_argument("--eps", type=rational, default=Q("1/4"))
    per.add_argument("--nu", type=rational, default=Q("3/10"))
    per.add_argument("--n", type=int, default=2, help="index of the cover H_n (mixing)")
    per.add_argument("--horizon", type=int, default=64)
    per.add_argument("--samples", type=int, default=0,
                     help="robustness samples to verify (mixing)")
    per.add_argument("--seed", type=int, required=True)
    per.add_argument("--out", required=True, help="output directory")
    per.set_defaults(func=cmd_perturb)

    ver = sub.add_parser("verify", help="run verifier suites")
    ver.add_argument("suite", choices=[*SUITES, "all"])
    ver.add_argument("--map", required=True)
    ver.add_argument("--schedule", type=rational_list, default=list(DEFAULT_SCHEDULE))
    ver.add_argument("--cell", action="append", default=[], help="EDGE:LO,HI or LO,HI")
    ver.add_argument("--cells-eps", type=rational, default=Q("1/4"),
                     help="check every cell of a partition at this scale (leo)")
    ver.add_argument("--kmax", type=int, default=8)
    ver.add_argument("--sample", type=int, default=64)
    ver.add_argument("--n", type=int, default=2)
    ver.add_argument("--horizon", type=int, default=8)
    ver.add_argument("--eps", type=rational, default=Q("1/5"))
    ver.add_argument("--delta", type=rational, default=Q("1/64"))
    ver.add_argument("--chains", type=int, default=10)
    ver.add_argument("--length", type=int, default=50)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", help="report file (default: stdout)")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    started = time.perf_counter()
    try:
        if args.command == "synthesize":
            need = "map" if args.kind == "leo-from-ct" else "space"
            if getattr(args, need) is None:
                raise InputError(f"synthesize {args.kind} needs --{need}")
        code = args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command in ("synthesize", "perturb"):
        _emit_timings(args, started)
    return code


if __name__ == "__main__":
    sys.exit(main())
