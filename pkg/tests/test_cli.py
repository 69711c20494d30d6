import csv
import json

import pytest

from wzwsle.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def load(out):
    return json.loads(out)


def test_nullvec_solve_reference(capsys):
    code, out, _ = run(capsys, "nullvec", "solve", "--algebra", "sl2", "--level", "1",
                       "--weight", "0", "--n", "2")
    doc = load(out)
    assert code == 0
    assert doc["status"] == "unique-solution"
    assert doc["values"]["kappa0"] == "8/3"
    assert doc["values"]["kappa1"] == "1/1"
    assert doc["matches_reference"] is True
    assert doc["reference"] == {"kappa0": "8/3", "tau": "1"}
    assert {"config", "versions", "timing", "backend"} <= set(doc)


def test_nullvec_solve_spin_module_refuted(capsys):
    code, out, _ = run(capsys, "nullvec", "solve", "--algebra", "sl2", "--weight", "L1",
                       "--n", "2")
    assert code == 2
    assert load(out)["status"] == "infeasible"


def test_nullvec_verify_wrong_kappa(capsys):
    code, out, _ = run(capsys, "nullvec", "verify", "--algebra", "sl2", "--n", "2",
                       "--kappa0", "0/1", "--kappa", "1,1,1")
    doc = load(out)
    assert code == 2
    assert doc["null"] is False
    assert doc["certificate"]["nonzero_pairings"]


def test_nullvec_verify_reference(capsys):
    code, out, _ = run(capsys, "nullvec", "verify", "--algebra", "sl2", "--n", "2",
                       "--kappa0", "8/3", "--tau", "1")
    assert code == 0
    assert load(out)["null"] is True


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "nullvec", "solve", "--algebra", "zl2")[0] == 1
    assert run(capsys, "lattice", "verify", "--algebra", "slx")[0] == 1
    assert run(capsys, "nullvec", "solve")[0] == 1  # missing --algebra
    assert run(capsys, "sde", "martingale", "--algebra", "sl2")[0] == 1  # no kappas


def test_lattice_verify_both_conventions(capsys, tmp_path):
    log = tmp_path / "proof.log"
    code, out, _ = run(capsys, "lattice", "verify", "--algebra", "sl2",
                       "--log", str(log))
    doc = load(out)
    assert code == 0 and doc["ok"]
    assert [r["cocycle"] for r in doc["reports"]] == ["upper", "lower"]
    assert all(len(r["identities"]) == 5 for r in doc["reports"])
    text = log.read_text()
    assert "null_sum: holds" in text and "coefficient" not in text.split("\n")[0]


def test_lattice_verify_sl3(capsys):
    code, out, _ = run(capsys, "lattice", "verify", "--algebra", "sl3")
    doc = load(out)
    assert code == 0 and doc["ok"]


def test_scan_with_checkpoint(capsys, tmp_path):
    ck = tmp_path / "ck.json"
    code, out, _ = run(capsys, "nullvec", "scan", "--ranks", "2", "--checkpoint", str(ck))
    assert code == 0
    assert json.loads(ck.read_text())["rows"]["sl2"]["values"]["kappa0"] == "8/3"


def test_sde_martingale_small(capsys, tmp_path):
    out_path = tmp_path / "mc.json"
    code, _, _ = run(capsys, "sde", "martingale", "--algebra", "sl2", "--n", "2",
                     "--kappa", "paper", "--T", "0.1", "--dt", "0.002",
                     "--paths", "400", "--json", str(out_path))
    doc = json.loads(out_path.read_text())
    assert code == 0
    assert doc["verdict"] == "martingale-consistent"
    assert doc["config"]["kappa0"] == "8/3"


def test_sde_trace_csv_and_determinism(capsys, tmp_path):
    args = ["sde", "trace", "--algebra", "sl2", "--n", "2", "--kappa0", "1",
            "--T", "0.05", "--dt", "0.001", "--seed", "9"]
    csv1, json1 = tmp_path / "a.csv", tmp_path / "a.json"
    csv2, json2 = tmp_path / "b.csv", tmp_path / "b.json"
    assert run(capsys, *args, "--csv", str(csv1), "--json", str(json1))[0] == 0
    assert run(capsys, *args, "--csv", str(csv2), "--json", str(json2))[0] == 0
    assert csv1.read_bytes() == csv2.read_bytes()
    d1, d2 = json.loads(json1.read_text()), json.loads(json2.read_text())
    d1.pop("timing"), d2.pop("timing")
    assert d1 == d2
    with open(csv1) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "t" and rows[0][-1] == "g_residual"
    ngen = 3
    assert len(rows[0]) == 1 + 13 + ngen * 13 + 1
    assert len(rows) == 1 + 50 + 1  # header + steps + initial state


def test_sde_trace_n1_loewner_residual(capsys, tmp_path):
    out_path = tmp_path / "t.json"
    code, _, _ = run(capsys, "sde", "trace", "--algebra", "sl2", "--n", "1",
                     "--kappa0", "8/3", "--T", "0.05", "--dt", "0.001",
                     "--json", str(out_path))
    doc = json.loads(out_path.read_text())
    assert code == 0
    assert doc["max_residual"] < 1e-12
