import io
import json

import jsonschema
import pytest

from pencilc.cli import run
from pencilc.lowering import load_schema

from conftest import CORPUS, FIXTURES, corpus_files


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(map(str, argv)), out, err)
    return code, out.getvalue(), err.getvalue()


EXPECTED_EXIT = {"bar.pencil.c": 1, "goto.pencil.c": 1, "mutual.pencil.c": 1}


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_exit_codes_and_schema(path):
    code, out, _ = call("analyze", path, "--format", "json")
    assert code == EXPECTED_EXIT.get(path.name, 0)
    jsonschema.validate(json.loads(out), load_schema())


def test_check_bar_text():
    code, out, _ = call("check", CORPUS / "bar.pencil.c")
    assert code == 1
    assert "[R8]" in out and "[R3]" in out


def test_analyze_foo_triple():
    code, out, _ = call("analyze", CORPUS / "summary_foo.pencil.c", "--param", "n=3",
                        "--format", "json")
    assert code == 0
    rep = json.loads(out)
    foo = next(f for f in rep["functions"] if f["name"] == "foo")
    must = {(r["array"], tuple(r["index"])) for r in foo["summary"]["must_write"]}
    assert must == {("A", (0,)), ("A", (1,)), ("A", (2,)), ("C", (0,))}
    assert {"array": "A", "index": [2], "kind": "READ", "iter": []} in foo["summary"]["read"]


def test_exact_needs_binding():
    code, out, _ = call("analyze", CORPUS / "histogram.pencil.c", "--exact", "--format", "json")
    assert code == 1
    assert "E-BINDING-REQUIRED" in {d["code"] for d in json.loads(out)["diagnostics"]}


def test_array_binding():
    code, out, _ = call("analyze", CORPUS / "histogram.pencil.c", "--param", "N=3",
                        "--param", "m=3", "--array", "t=0,0,1", "--format", "json")
    assert code == 0
    assert json.loads(out)["loops"][0]["verdict"] == "SERIAL"


def test_lower(tmp_path):
    report = tmp_path / "r.json"
    dest = tmp_path / "sum.omp.c"
    code, _, _ = call("lower", CORPUS / "sum.pencil.c", "-o", dest, "--report", report,
                      "--standalone")
    assert code == 0
    text = dest.read_text()
    assert text.startswith("#include <math.h>")
    assert "#pragma omp parallel for reduction(+:x)" in text
    jsonschema.validate(json.loads(report.read_text()), load_schema())


def test_op2_reference():
    code, out, _ = call("op2", FIXTURES / "mesh.json", "--run-reference")
    assert code == 0
    assert "dcells = [11, 32, 23]" in out
    assert "PARALLEL_WITH_REDUCTION" in out


def test_op2_json_report():
    code, out, _ = call("op2", FIXTURES / "mesh.json", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, load_schema())
    assert rep["flags"]["fp-reduction-reorders-results"] is True


def test_optiml(tmp_path):
    src = tmp_path / "sum.json"
    src.write_text('{"kind": "sum", "lo": 0, "hi": 100, "body": "exp(i)"}')
    pencil, omp = tmp_path / "sum.pencil.c", tmp_path / "sum.omp.c"
    code, out, _ = call("optiml", src, "--emit-pencil", pencil, "--emit-omp", omp)
    assert code == 0
    assert "#pragma pencil reduction (+:x)" in pencil.read_text()
    assert "reduction(+:x)" in omp.read_text()
    assert "PARALLEL_WITH_REDUCTION" in out


def test_usage_errors(tmp_path):
    assert call()[0] == 2
    assert call("frobnicate", "x")[0] == 2
    code, _, err = call("check", tmp_path / "missing.c")
    assert code == 2 and "E-IO" in err
    code, _, err = call("analyze", CORPUS / "sum.pencil.c", "--param", "n")
    assert code == 2 and "E-USAGE" in err


def test_bad_optiml_is_error(tmp_path):
    src = tmp_path / "bad.json"
    src.write_text('{"kind": "sum", "lo": 3, "hi": 1, "body": "i"}')
    code, _, err = call("optiml", src)
    assert code == 1 and "E-OPTIML-RANGE" in err


def test_budget_env(monkeypatch):
    monkeypatch.setenv("PENCILC_BUDGET", "10")
    code, out, _ = call("analyze", CORPUS / "histogram.pencil.c", "--param", "N=8",
                        "--param", "m=8", "--array", "t=0,1,2,3,4,5,6,7", "--format", "json")
    rep = json.loads(out)
    assert "E-BUDGET" in {d["code"] for d in rep["diagnostics"]}
    assert rep["loops"][0]["verdict"] == "UNKNOWN"
    assert code == 1


def test_version():
    code, out, _ = call("--version")
    assert code == 0 and out.startswith("pencilc ")


def test_diagnostic_docs_list_every_code():
    from pathlib import Path
    from pencilc.diagnostics import CATALOG
    doc = (Path(__file__).parent.parent / "docs" / "diagnostics.md").read_text()
    assert [c for c in CATALOG if f"`{c}`" not in doc] == []
