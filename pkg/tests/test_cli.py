from __future__ import annotations

import json
import subprocess
import sys

import pytest

from syzbundle import cli
from syzbundle.cli import dumps, main
from syzbundle.errors import InternalConsistencyError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out), out


# -- describe


def test_describe_line_bundle(capsys):
    code, doc, _ = run_json(capsys, "describe", "--variety", "P2", "--bundle", "O(3)")
    assert code == 0
    f = doc["facts"]
    assert (f["rank"], f["chern"]["total"], f["h"]) == (1, "1 + 3h", [10, 0, 0])


def test_describe_syzygy(capsys):
    code, doc, _ = run_json(capsys, "describe", "--variety", "P2", "--bundle", "syz(O(3),3)")
    f = doc["facts"]
    assert (f["rank"], f["chern"]["classes"], f["h"]) == (2, [-3, 9], [0, 7, 0])
    assert f["provenance"]["h"] == "solver"


def test_describe_tangent_twist(capsys):
    code, doc, _ = run_json(capsys, "describe", "--variety", "P3", "--bundle", "dual(syz(O(1),4))")
    assert doc["facts"]["rank"] == 3
    assert doc["facts"]["chern"]["total"] == "1 + h + h^2 + h^3"


def test_describe_text(capsys):
    code, out, _ = run(capsys, "describe", "--variety", "P2", "--bundle", "syz(O(3),3)")
    assert code == 0
    assert "rank: 2" in out and "1 - 3h + 9h^2" in out


# -- syzygy and moduli


def test_syzygy_command(capsys):
    code, doc, _ = run_json(capsys, "syzygy", "--variety", "P2", "--bundle", "O(3)", "-w", "3")
    assert code == 0
    r = doc["result"]
    assert r["simple"] is True
    assert r["embedding"] == "LocallyClosedEmbedding"
    assert r["provenance"]["simple"] == "theorem"
    assert doc["reconstruction"]["passed"] is True


def test_syzygy_text(capsys):
    code, out, _ = run(capsys, "syzygy", "--variety", "P3", "--bundle", "O(1)", "-w", "4")
    assert code == 0 and "embedding: OpenEmbedding" in out


def test_moduli_command(capsys):
    code, doc, _ = run_json(capsys, "moduli", "--variety", "P2", "--bundle", "O(3)", "-w", "3")
    m = doc["moduli"]
    assert m["dim_G0_fiber"]["value"] == 21
    assert m["tangent_Spl_S"]["value"] == 24
    assert m["obstruction_Spl_S"]["value"] == 0
    assert m["codim_syz"]["value"] == 3
    assert all("source" in m[key] for key in m if isinstance(m[key], dict) and "value" in m[key])


def test_moduli_text(capsys):
    code, out, _ = run(capsys, "moduli", "--variety", "P2", "--bundle", "O(3)", "-w", "3")
    assert code == 0 and "(chi = -23)" in out


def test_custom_input(capsys, tmp_path):
    path = tmp_path / "surface.json"
    path.write_text(json.dumps({"dim": 2, "h_O": [1, 0, 1], "omega": 0, "bundles": [
        {"name": "L", "rank": 1, "h": [6, 0, 0], "h_dual": [0, 0, 6], "globally_generated": True},
    ]}))
    code, doc, _ = run_json(capsys, "moduli", "--variety", "custom", "--input", str(path), "--bundle", "opaque(L)", "-w", "4")
    assert code == 0
    assert doc["moduli"]["dim_syz"]["value"] == 8


def test_bundles_attached_to_catalog_variety(capsys, tmp_path):
    path = tmp_path / "bundles.json"
    path.write_text(json.dumps({"bundles": [
        {"name": "F", "rank": 2, "chern": [4, 12], "h": [4, 0, 0], "h_dual": [0, "?", "?"],
         "globally_generated": True, "simple": True, "kernel": "sum(O(-2),2)"},
    ]}))
    code, doc, _ = run_json(capsys, "syzygy", "--variety", "P2", "--input", str(path), "--bundle", "opaque(F)", "-w", "4")
    assert code == 0
    assert doc["result"]["membership"]["in_U"] is False
    assert doc["result"]["simple"] is False


# -- tower


def test_tower_command(capsys):
    code, doc, _ = run_json(capsys, "tower", "--variety", "P3", "--start", "O(1)", "--policy", "full", "--steps", "2")
    assert code == 0
    steps = doc["tower"]["steps"]
    assert [s["w"] for s in steps] == [4, 6]
    assert steps[1]["twist_applied"] == 1


def test_tower_text(capsys):
    code, out, _ = run(capsys, "tower", "--variety", "P3", "--start", "O(1)", "--steps", "2")
    assert code == 0 and "status: completed" in out


def test_tower_halt_reason(capsys):
    code, doc, _ = run_json(capsys, "tower", "--variety", "P2", "--start", "O(3)", "--policy", "fixed", "--k", "3", "--require-V")
    assert code == 0
    assert "V is empty" in doc["tower"]["reason"]


# -- verification table


def test_verify_reference_numbers(capsys):
    code, out, _ = run(capsys, "verify-paper")
    assert code == 0
    assert "FAIL" not in out
    assert "1 - 3h + 9h^2" in out


def test_verify_reference_numbers_json(capsys):
    code, doc, _ = run_json(capsys, "verify-paper")
    assert code == 0 and all(row["pass"] for row in doc)
    codim = next(row for row in doc if row["check"] == "codim of the syzygy locus")
    assert codim["expected"] == "3"


def test_verify_reference_numbers_fails_on_mismatch(capsys, monkeypatch):
    from syzbundle import golden

    rows = golden.rows()
    bad = golden.GoldenRow("deliberately wrong", "0", lambda: 1)
    monkeypatch.setattr(golden, "rows", lambda: rows[:1] + [bad])
    code, out, _ = run(capsys, "verify-paper")
    assert code != 0
    assert "failures: deliberately wrong" in out


# -- exit codes


def test_exit_parse_error(capsys):
    code, _, err = run(capsys, "describe", "--bundle", "syz(O(3)")
    assert code == 1 and "^" in err


def test_exit_precondition(capsys):
    code, _, err = run(capsys, "syzygy", "--variety", "P2", "--bundle", "O(3)", "-w", "2")
    assert code == 1 and "w ≥ n + r" in err


def test_exit_usage(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "syzygy", "--bundle", "O(3)")[0] == 1
    assert run(capsys, "describe", "--variety", "P9", "--bundle", "O")[0] == 1


def test_exit_unknown_membership(capsys, tmp_path):
    path = tmp_path / "e.json"
    path.write_text(json.dumps({"bundles": [
        {"name": "E", "rank": 2, "chern": [3, 3], "h": [8, "?", "?"], "globally_generated": True, "simple": True},
    ]}))
    code, _, err = run(capsys, "syzygy", "--variety", "P2", "--input", str(path), "--bundle", "opaque(E)", "-w", "5")
    assert code == 2 and "blocked" in err


def test_exit_unknown_tower(capsys):
    code, _, err = run(capsys, "tower", "--variety", "P2", "--start", "O(3)", "--policy", "max-grassmann", "--steps", "2")
    assert code == 2 and "blocked" in err


def test_exit_unsupported(capsys):
    code, _, _ = run(capsys, "describe", "--variety", "P2", "--bundle", "tensor(syz(O(3),3),syz(O(2),3))")
    assert code == 2


def test_exit_contradiction(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"bundles": [{"name": "E", "rank": 1, "chern": [1], "h": [2, 0, 0]}]}))
    code, _, err = run(capsys, "describe", "--variety", "P2", "--input", str(path), "--bundle", "opaque(E)")
    assert code == 3 and "Riemann-Roch" in err


def test_exit_internal(capsys, monkeypatch):
    def boom(*_):
        raise InternalConsistencyError("invariant broken")

    monkeypatch.setattr(cli, "facts", boom)
    assert run(capsys, "describe", "--bundle", "O")[0] == 4


def test_exit_missing_file(capsys):
    assert run(capsys, "describe", "--input", "/nonexistent.json", "--bundle", "O")[0] == 1


# -- canonical JSON


@pytest.mark.parametrize(
    "argv",
    [
        ("describe", "--variety", "P2", "--bundle", "syz(O(3),3)"),
        ("syzygy", "--variety", "P2", "--bundle", "O(3)", "-w", "3"),
        ("moduli", "--variety", "P3", "--bundle", "O(2)", "-w", "9"),
        ("tower", "--variety", "P3", "--start", "O(1)", "--steps", "2"),
        ("verify-paper",),
    ],
)
def test_json_round_trip_is_byte_identical(capsys, argv):
    _, doc, out = run_json(capsys, *argv)
    assert dumps(doc) + "\n" == out
    assert "." not in "".join(str(v) for v in _numbers(doc))


def _numbers(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from _numbers(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _numbers(v)
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        yield obj


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "syzbundle", "describe", "--variety", "P2", "--bundle", "O(3)", "--format", "json"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["facts"]["h"] == [10, 0, 0]
