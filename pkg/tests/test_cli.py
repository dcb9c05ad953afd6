import json
import subprocess
import sys

import pytest

from linfty import io
from linfty.algebra import DGL
from linfty.cli import main
from linfty.generators import lie_dgl
from linfty.multimap import MultiMap


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out) if out.strip() else None, err


def fixture(name):
    return str(io.fixture_path(name))


@pytest.mark.parametrize("name", ["dgl_abelian", "dgl_lie", "dgl_sl2_like", "dgl_contractible",
                                  "dgl_massey", "random_dgl", "manifold_cubic", "manifold_odd_pair"])
def test_check_fixtures(capsys, name):
    code, rep, _ = run_json(capsys, "check", fixture(name))
    assert code == 0
    assert rep["status"] == "pass" and rep["first_failure"] is None


def corrupted_document(tmp_path):
    L = lie_dgl()
    br = dict(L.bracket.entries)
    br[(0, 2)] = {k: 2 * v for k, v in br[(0, 2)].items()}
    bad = DGL(L.module, L.d, MultiMap(L.module, L.module, 2, 0, "exterior", br), check=False)
    path = tmp_path / "bad_lie.json"
    io.write_document(io.dgl_document(bad), path)
    return str(path)


def test_check_reports_jacobi_failure(capsys, tmp_path):
    code, rep, _ = run_json(capsys, "check", corrupted_document(tmp_path))
    assert code == 1
    assert rep["status"] == "fail"
    assert rep["first_failure"]["component"] == 3
    assert len(rep["first_failure"]["basis"]) == 3 and rep["first_failure"]["residual"]


def test_transfer_refuses_broken_dgl(capsys, tmp_path):
    code, rep, _ = run_json(capsys, "transfer", corrupted_document(tmp_path), "--output-dir", str(tmp_path))
    assert code == 1 and "Jacobi" in rep["first_failure"]["message"]


def test_malformed_input_exits_two(capsys, tmp_path):
    path = tmp_path / "x.json"
    path.write_text('{"schema_version": "1", "kind": "dgl"}')
    code, out, err = run(capsys, "check", str(path))
    assert code == 2 and "lacks" in err
    code, _, err = run(capsys, "check", str(tmp_path / "missing.json"))
    assert code == 2


def test_arity_cap(capsys, monkeypatch):
    monkeypatch.setenv("LINFTY_MAX_ARITY", "3")
    code, _, err = run(capsys, "check", fixture("dgl_massey"), "--arity", "5")
    assert code == 2 and "exceeds" in err
    assert run(capsys, "check", fixture("dgl_massey"), "--arity", "3")[0] == 0
    monkeypatch.setenv("LINFTY_MAX_ARITY", "many")
    assert run(capsys, "check", fixture("dgl_massey"))[0] == 2


def test_transfer_writes_checkable_outputs(capsys, tmp_path):
    code, rep, _ = run_json(capsys, "transfer", fixture("dgl_massey"), "--arity", "4",
                            "--output-dir", str(tmp_path))
    assert code == 0
    minimal, morphism = rep["outputs"]
    assert rep["provenance"]["homology"]
    for path in (minimal, morphism):
        code, rep2, _ = run_json(capsys, "check", path)
        assert code == 0, rep2
    doc, mm = io.load(minimal)
    assert not mm.comp(3).is_zero()


def test_decompose(capsys, tmp_path):
    code, rep, _ = run_json(capsys, "decompose", fixture("dgl_massey"), "--arity", "3",
                            "--output-dir", str(tmp_path))
    assert code == 0
    assert all(rep["provenance"]["checks"].values())
    assert run(capsys, "check", rep["outputs"][0])[0] == 0


@pytest.mark.parametrize("mode", ["--universal", "--semiuniversal"])
def test_deform_and_correspond(capsys, tmp_path, mode):
    code, rep, _ = run_json(capsys, "deform", fixture("manifold_cubic"), mode, "--arity", "4",
                            "--poly-degree", "3", "--output-dir", str(tmp_path))
    assert code == 0
    assert rep["provenance"]["tangent_dim"] == 12
    out = rep["outputs"][0]
    assert run(capsys, "check", out)[0] == 0
    code, rep, _ = run_json(capsys, "correspond", out, "--output-dir", str(tmp_path))
    assert code == 0 and rep["provenance"]["roundtrip"]
    morphism = rep["outputs"][0]
    code, rep, _ = run_json(capsys, "correspond", morphism, "--fiber", fixture("manifold_cubic"),
                            "--output-dir", str(tmp_path))
    assert code == 0


def test_deform_window_violation(capsys, tmp_path):
    code, _, err = run(capsys, "deform", fixture("manifold_cubic"), "--universal", "--arity", "4",
                       "--poly-degree", "1", "--output-dir", str(tmp_path))
    assert code == 2


def test_correspond_needs_fiber(capsys, tmp_path):
    code, rep, _ = run_json(capsys, "deform", fixture("manifold_odd_pair"), "--universal",
                            "--arity", "3", "--poly-degree", "2", "--output-dir", str(tmp_path))
    code, rep, _ = run_json(capsys, "correspond", rep["outputs"][0], "--output-dir", str(tmp_path))
    code, _, err = run(capsys, "correspond", rep["outputs"][0])
    assert code == 2 and "--fiber" in err
    assert run(capsys, "correspond", fixture("dgl_lie"))[0] == 2


def test_trees_text_and_json(capsys):
    code, out, _ = run(capsys, "trees", "--leaves", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-1] == "count 5" and len(lines) == 6
    code, out, _ = run(capsys, "trees", "--leaves", "3", "--invariants", "--format", "json")
    doc = json.loads(out)
    assert doc["count"] == 2
    assert [row["e"] for row in doc["trees"]] == [-1, 1]
    assert doc["trees"][0]["w"] == [2, 1, 0]
    code, out, _ = run(capsys, "trees", "--leaves", "3", "--invariants")
    assert "e=-1" in out and "e=+1" in out
    assert run(capsys, "trees", "--leaves", "0")[0] == 2


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "linfty", "trees", "--leaves", "5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().endswith("count 14")
