from __future__ import annotations

import json
import os

import pytest

from rydqsp import cli
from rydqsp.planners import CSV_FIELDS, compare, heisenberg_jobs


def _run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_sweep_rows_and_roundtrip(tmp_path, capsys):
    out = tmp_path / "fig6.csv"
    code, _, _ = _run(["sweep", "--heisenberg-range", "10:100:10", "--time-policy", "4n",
                       "--epsilon", "1e-3", "--out", str(out)], capsys)
    assert code == 0
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert len(lines) == 31
    parsed = cli.read_sweep_csv(text)
    table = compare(heisenberg_jobs(range(10, 101, 10)))
    assert parsed == [{k: r[k] for k in CSV_FIELDS} for r in table]
    assert [p for p in os.listdir(tmp_path) if p.startswith(".rqsp-")] == []


def test_verify_block(capsys):
    code, out, _ = _run(["verify", "--check", "block", "--n", "3", "--terms", "6", "--seed", "7"],
                        capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["ok"] and rep["max_deviation"] < 1e-9


def test_verify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setitem(cli.VERIFY_TOL, "block", -1.0)
    code, _, err = _run(["verify", "--check", "block"], capsys)
    assert code == 2
    assert err.startswith("verification-failure:") and err.count("\n") == 1


def test_physical_example(capsys):
    code, out, _ = _run(["physical", "--reported-example"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert 0.016 <= rep["eps_s"] <= 0.025 and rep["total_error_100_gates"] < 0.05


def test_bad_inputs_exit_one(tmp_path, capsys):
    bad = tmp_path / "h.json"
    bad.write_text('{"n_sites": 2, "terms": [{"pauli": "XQ", "coeff": 1.0}]}')
    code, _, err = _run(["estimate", "--hamiltonian", str(bad)], capsys)
    assert code == 1
    assert "position 1" in err and err.count("\n") == 1
    code, _, err = _run(["estimate", "--hamiltonian", str(tmp_path / "missing.json")], capsys)
    assert code == 1 and "no such file" in err
    code, _, _ = _run(["sweep", "--heisenberg-range", "10-20"], capsys)
    assert code == 1
    code, _, _ = _run(["frobnicate"], capsys)
    assert code == 1


def test_estimate_and_compile(tmp_path, capsys):
    code, out, _ = _run(["estimate", "--heisenberg", "10", "--method", "pf4"], capsys)
    assert code == 0 and json.loads(out)["r_segments"] == 144
    ir = tmp_path / "cw.json"
    code, out, _ = _run(["compile", "--heisenberg", "10", "--circuit", "cw", "--out", str(ir)],
                        capsys)
    rep = json.loads(out)["report"]
    assert code == 0 and rep["depth"] == 131
    assert json.loads(ir.read_text())["ir_version"] == 1


def test_layout_flag(tmp_path, capsys):
    lay = tmp_path / "layout.json"
    lay.write_text('{"dim": 1, "blockade_radius_um": 30, "atom_pitch_um": 2}')
    code, out, _ = _run(["estimate", "--heisenberg", "20", "--layout", str(lay)], capsys)
    assert code == 0 and json.loads(out)["extra"]["n_sub_system"] == 2


@pytest.mark.parametrize("argv", [
    ["sweep", "--heisenberg-range", "10:30:10"],
    ["estimate", "--heisenberg", "12", "--method", "haah", "--format", "table"],
    ["compile", "--heisenberg", "4", "--circuit", "walk"],
    ["verify", "--check", "walk", "--seed", "3"],
    ["physical", "--reported-example"],
])
def test_byte_identical_reruns(argv, tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}"
        assert cli.main(argv + (["--out", str(path)] if argv[0] != "compile" else [])) == 0
        stdout = capsys.readouterr().out
        outs.append((path.read_bytes() if path.exists() else b"") + stdout.encode())
    assert outs[0] == outs[1]
