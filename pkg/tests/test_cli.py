import json
import subprocess
import sys

import pytest

from qdiffcalc.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_inner_differential_on_m3(capsys, fixtures):
    code, out, _ = run(capsys, "check", "--algebra", fixtures / "m3.json", "--N", 3,
                       "--differential", fixtures / "m3_inner_d.json")
    assert code == 0
    rep = json.loads(out)
    assert rep["ok"] and rep["leibniz"]["ok"] and rep["nilpotency"]["ok"]


def test_inner_flag_matches_differential_file(capsys, fixtures):
    _, a, _ = run(capsys, "check", "--algebra", fixtures / "m3.json", "--N", 3,
                  "--differential", fixtures / "m3_inner_d.json")
    _, b, _ = run(capsys, "check", "--algebra", fixtures / "m3.json", "--N", 3, "--inner", "E2_1:1,E3_2:1,E1_3:1")
    assert a == b


def test_check_reports_leibniz_violation(capsys, fixtures):
    code, out, _ = run(capsys, "check", "--algebra", fixtures / "m3.json", "--N", 3,
                       "--differential", fixtures / "m3_bad_leibniz_d.json")
    assert code == 1
    rep = json.loads(out)
    assert not rep["leibniz"]["ok"] and rep["leibniz"]["witness"]


def test_corrupted_algebra_is_rejected(capsys, fixtures):
    code, _, err = run(capsys, "check", "--algebra", fixtures / "m2_corrupted.json", "--N", 2, "--inner", "E2_1:1")
    assert code == 1
    rec = json.loads(err)
    assert rec["error"] == "AssociativityViolation" and len(rec["witness"]) == 3


def test_homology_on_non_nilpotent_differential(capsys, fixtures):
    code, _, err = run(capsys, "homology", "--algebra", fixtures / "chain.json", "--N", 2, "--max-degree", 3,
                       "--differential", fixtures / "chain_d.json")
    assert code != 0
    assert json.loads(err)["error"] == "NilpotencyViolation"


def test_homology_on_tensor_calculus(capsys, fixtures):
    code, out, _ = run(capsys, "homology", "--algebra", fixtures / "c2.json", "--N", 3, "--max-degree", 5,
                       "--complex", "tensor")
    assert code == 0
    table = {(r["k"], r["n"]): r["dim"] for r in json.loads(out)["table"]}
    assert table[(1, 0)] == table[(2, 0)] == 1
    assert all(table[(k, n)] == 0 for k in (1, 2) for n in (1, 2, 3))


def test_envelope_dimension_line(capsys, fixtures):
    code, out, _ = run(capsys, "envelope", "--algebra", fixtures / "c2.json", "--N", 3, "--max-degree", 5)
    assert code == 0
    assert out == "2 2 4 6 10 16\n"


def test_envelope_report(capsys, fixtures, tmp_path):
    dest = tmp_path / "env.json"
    code, _, _ = run(capsys, "envelope", "--algebra", fixtures / "c2.json", "--N", 3, "--max-degree", 4,
                     "--out", dest, "--dump-basis")
    rep = json.loads(dest.read_text())
    assert code == 0 and rep["isomorphic"]
    assert rep["dims"] == rep["embedded_dims"] == rep["formula"] == [2, 2, 4, 6, 10]
    assert [len(v) for v in rep["basis"].values()] == rep["dims"]


def test_hochschild_table(capsys, fixtures):
    code, out, _ = run(capsys, "hochschild", "--algebra", fixtures / "c2.json", "--N", 3, "--max-degree", 4)
    rep = json.loads(out)
    assert code == 0 and rep["laws"]["ok"]
    assert all(isinstance(r["dim"], int) for r in rep["table"])


def test_hexagon_on_m3(capsys, fixtures):
    code, out, _ = run(capsys, "hexagon", "--algebra", fixtures / "m3.json", "--N", 3, "--max-degree", 8,
                       "--inner", "E2_1:1,E3_2:1,E1_3:1")
    rep = json.loads(out)
    assert code == 0 and rep["exact"]
    assert len(rep["hexagons"]) == 3 and len(rep["sequences"]) == 9


@pytest.mark.parametrize("argv", [
    ["check", "--algebra", "missing.json", "--N", "3"],
    ["check", "--algebra", "{m3}", "--N", "3", "--max-degree", "2", "--inner", "E2_1:1"],
    ["check", "--algebra", "{m3}", "--N", "zero", "--inner", "E2_1:1"],
    ["check", "--algebra", "{m3}", "--N", "3", "--inner", "E9_9:1"],
])
def test_input_errors(capsys, fixtures, argv):
    argv = [a.replace("{m3}", str(fixtures / "m3.json")) for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in json.loads(err)


def test_reports_are_byte_identical(tmp_path, fixtures):
    outs = []
    for i in range(2):
        dest = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "qdiffcalc", "hexagon", "--algebra", str(fixtures / "m3.json"),
                        "--N", "3", "--max-degree", "6", "--inner", "E2_1:1,E3_2:2,E1_3:3", "--out", str(dest)],
                       check=True)
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1] and outs[0]
