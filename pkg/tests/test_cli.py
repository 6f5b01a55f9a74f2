import json
from fractions import Fraction as F

import pytest

from peano_chaos.cli import EXIT_CONSTRUCT, EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from peano_chaos.construct import lc_approx
from peano_chaos.pl_map import PLMap, constant, identity, tent
from peano_chaos.spaces import circle, interval


def write_map(path, f):
    path.write_text(json.dumps(f.to_json()))
    return str(path)


@pytest.fixture
def tent_file(tmp_path):
    return write_map(tmp_path / "tent.json", tent())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_partition_decimal_input(capsys):
    code, out, _ = run(capsys, "partition", "--space", "interval", "--eps", "0.3")
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data["cells"]) == 4 and data["mesh"] == "1/4"


def test_partition_from_file(tmp_path, capsys):
    spath = tmp_path / "space.json"
    spath.write_text(json.dumps(circle().to_json()))
    out = tmp_path / "p.json"
    assert run(capsys, "partition", "--space", spath, "--eps", "1/3", "--out", out)[0] == EXIT_OK
    assert json.loads(out.read_text())["kind"] == "PARTITION"


@pytest.mark.parametrize("argv", [
    ["partition", "--space", "nowhere", "--eps", "1"],
    ["partition", "--space", "interval", "--eps", "1.2.3"],
    ["partition", "--space", "interval"],
    ["synthesize", "exact-devaney", "--eps", "1/2", "--seed", "1", "--out", "x"],
    ["frobnicate"],
])
def test_input_errors(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(capsys, *argv)[0] == EXIT_INPUT


def test_seed_is_mandatory(capsys, tmp_path, tent_file):
    code, _, _ = run(capsys, "perturb", "break-ct", "--map", tent_file, "--eps", "1/8",
                     "--out", tmp_path / "o")
    assert code == EXIT_INPUT


def test_malformed_map(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"space": {"vertices": ["a"], "edges": []}, "map": []}')
    assert run(capsys, "verify", "ct", "--map", bad)[0] == EXIT_INPUT
    bad.write_text("{not json")
    assert run(capsys, "verify", "ct", "--map", bad)[0] == EXIT_INPUT


def test_verify_leo_and_periodic(tent_file, capsys):
    code, out, _ = run(capsys, "verify", "leo", "--map", tent_file, "--cell", "0,0.25",
                       "--kmax", 10)
    assert code == EXIT_OK
    assert json.loads(out)["suites"]["leo"]["cells"][0]["k"] == 2
    code, out, _ = run(capsys, "verify", "periodic", "--map", tent_file, "--kmax", 1)
    pts = json.loads(out)["suites"]["periodic"]["orbits"][0]["points"]
    assert [p["offset"] for p in pts] == ["0", "2/3"]


def test_verify_fail_exit_code_still_writes_report(tmp_path, capsys):
    g = interval()
    path = write_map(tmp_path / "half.json", PLMap(g, [(0, 0, 1, 0, 0, "1/2")]))
    report = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "ct", "--map", path, "--out", report)
    assert code == EXIT_FAIL
    level = json.loads(report.read_text())["suites"]["ct"]["levels"][0]
    assert level["verdict"] == "FAIL" and "trapping" in level


def test_break_ct_on_constant_map_is_construction_failure(tmp_path, capsys):
    g = interval()
    path = write_map(tmp_path / "c.json", constant(g, g.point(0, "1/2")))
    out = tmp_path / "o"
    code, _, err = run(capsys, "perturb", "break-ct", "--map", path, "--eps", "1/8",
                       "--seed", 0, "--out", out)
    assert code == EXIT_CONSTRUCT
    assert "hypothesis" in err
    assert json.loads((out / "manifest.json").read_text())["clause"] == "hypothesis"


def test_break_ct_round_trip(tmp_path, capsys):
    f = lc_approx(identity(circle()), F(1, 8), F(1, 8))
    path = write_map(tmp_path / "f.json", f)
    out = tmp_path / "o"
    assert run(capsys, "perturb", "break-ct", "--map", path, "--eps", "1/4", "--seed", 0,
               "--out", out)[0] == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["replay"] is True
    assert F(manifest["distance"]) < F(1, 4)
    assert run(capsys, "verify", "ct", "--map", out / "map.json")[0] == EXIT_FAIL
    assert (out / "timings.json").exists()


def test_mixing_cli_anchor_table(tmp_path, capsys):
    f = lc_approx(identity(interval()), F(1, 16), F(1, 8))
    path = write_map(tmp_path / "f.json", f)
    out = tmp_path / "o"
    code, _, _ = run(capsys, "perturb", "mixing", "--map", path, "--n", 2, "--eps", "7/8",
                     "--seed", 2, "--out", out)
    assert code == EXIT_OK
    gadget = json.loads((out / "gadget.json").read_text())
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["anchor_distances_3xi"] is True
    assert gadget and manifest["xi"]


def test_synthesize_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert run(capsys, "synthesize", "exact-devaney", "--space", "interval", "--eps", "1/2",
                   "--depth", 2, "--seed", 9, "--out", out)[0] == EXIT_OK
        outs.append(out)
    for name in ("map.json", "manifest.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_surjective_lc_cli(tmp_path, capsys):
    out = tmp_path / "o"
    code, _, _ = run(capsys, "synthesize", "surjective-lc", "--space", "triod", "--eta", "1/4",
                     "--seed", 0, "--K", "e0:0", "--y0", "e1:1/8",
                     "--anchor", "e0:1/8=e2:1/16", "--out", out)
    assert code == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["checks"].values()) == {"PASS"}


def test_bad_point_is_input_error(tmp_path, capsys):
    code, _, _ = run(capsys, "synthesize", "surjective-lc", "--space", "triod", "--seed", 0,
                     "--K", "nope:0", "--y0", "e1:0", "--out", tmp_path / "o")
    assert code == EXIT_INPUT
