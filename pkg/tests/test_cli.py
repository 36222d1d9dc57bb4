import csv
import io
import json

import pytest

from expfunc.cli import main, parse_complex, parse_list


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    lines = text.split("\r\n")
    assert lines[0].startswith("# manifest=")
    manifest = json.loads(lines[0][len("# manifest=") :])
    rows = list(csv.DictReader(io.StringIO("\r\n".join(lines[1:]))))
    return manifest, rows


def test_parsers():
    assert parse_complex("4+0i") == 4
    assert parse_complex("1-2.5i") == 1 - 2.5j
    assert parse_list("x=1,2,4") == [1.0, 2.0, 4.0]


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--model", "stable_a05", "--z", "4+0i")
    data = json.loads(out)
    assert code == 0
    assert data["phi"]["re"] == pytest.approx(2.0)
    assert data["manifest"]["schema_version"] == 1
    code, out, _ = run(capsys, "eval", "--model", "pure_kill_q2", "--z", "3+0i")
    assert json.loads(out)["phi_star"]["re"] == pytest.approx(1.5)


def test_eval_bad_input(capsys, tmp_path):
    assert run(capsys, "eval", "--model", "stable_a05", "--z", "four")[0] == 2
    bad = tmp_path / "m.json"
    bad.write_text('{"model": "stable", "params": {"c": 1}}')
    assert run(capsys, "eval", "--model", str(bad), "--z", "1")[0] == 2
    assert run(capsys, "eval", "--model", str(tmp_path / "missing.json"), "--z", "1")[0] == 2


def test_density_rows(capsys):
    code, out, _ = run(capsys, "density", "--model", "pure_kill_q1", "--x", "0.5,2,3")
    manifest, rows = read_csv(out)
    assert code == 0
    assert manifest["subcommand"] == "density"
    assert len(rows) == 3
    assert float(rows[1]["value"]) == pytest.approx(0.135335, rel=1e-5)
    assert out.count("x,n,value") == 1


def test_density_domain_marker(capsys):
    code, out, _ = run(capsys, "density", "--inline", '{"model": "pure_kill", "q": 1}', "--x=-1,1")
    _, rows = read_csv(out)
    assert code == 3
    assert rows[0]["status"] == "DOMAIN" and rows[1]["status"] == "OK"


def test_asympt(capsys):
    code, out, _ = run(capsys, "asympt", "--model", "pure_kill_q1", "--x", "1,2,5")
    _, rows = read_csv(out)
    assert code == 0
    assert all(abs(float(r["ratio"]) - 1) < 1e-8 for r in rows)
    code, out, _ = run(capsys, "asympt", "--model", "cpp_atoms", "--x", "10", "--corollary", "--format", "json")
    data = json.loads(out)
    assert data["corollary"]["regime"] == "IntegrableSmallJumps"
    code, out, _ = run(capsys, "asympt", "--model", "gamma_sub", "--x", "0.5")
    assert code == 3 and "DOMAIN" in out


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--model", "stable_a05", "--suite", "appendix-a", "--seed", "42", "--samples", "2000")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "validate", "--model", "cpp_atoms", "--suite", "bgamma")
    assert code == 0 and json.loads(out)["max_rel_err"] < 1e-8
    code, out, err = run(capsys, "validate", "--model", "rv_index1", "--suite", "positive-increase")
    assert code == 0
    assert json.loads(out)["inconclusive"] is True
    assert "warning" in err


def test_simulate_deterministic(capsys):
    args = ("simulate", "--model", "cpp_atoms", "--samples", "20000", "--seed", "7")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    assert json.loads(first)["summary"]["mean"] == pytest.approx(1.582, abs=0.05)


def test_simulate_compare_and_csv(capsys, tmp_path):
    out_path = tmp_path / "cmp.csv"
    code, _, _ = run(capsys, "simulate", "--model", "cpp_atoms", "--samples", "20000", "--compare", "x=1,2,4", "--format", "csv", "--out", str(out_path))
    assert code == 0
    _, rows = read_csv(out_path.read_bytes().decode())
    assert [float(r["x"]) for r in rows] == [1.0, 2.0, 4.0]
    code, out, _ = run(capsys, "simulate", "--model", "cpp_atoms", "--samples", "3", "--format", "csv")
    _, rows = read_csv(out)
    assert len(rows) == 3


def test_requires_one_model_source(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eval", "--z", "1"])
    assert info.value.code == 2
