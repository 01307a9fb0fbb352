import json

import jsonschema
import pytest
from hypothesis import given, settings

from pencilc import nodes as N
from pencilc.depanalysis import ASSUMED_PARALLEL, PARALLEL, DependenceReport
from pencilc.interp import Binding
from pencilc.lowering import dumps, emit_openmp, emit_report, load_schema, pretty_print
from pencilc.lowering.openmp import OMP_FOR, WHILE_MARKER
from pencilc.pipeline import run_pipeline

from cdriver import GCC, lowered_vs_interpreter
from conftest import corpus_files, parse_ok
from oracles import render_loop
from progen import SIZE, loop_case

needs_gcc = pytest.mark.skipif(GCC is None, reason="gcc not installed")


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_round_trip(path):
    unit = parse_ok(path.read_text())
    text = pretty_print(unit)
    assert pretty_print(parse_ok(text)) == text
    assert parse_ok(text) == unit


@settings(max_examples=100, deadline=None)
@given(loop_case())
def test_round_trip_generated(case):
    shape, n, table = case
    unit = parse_ok(render_loop(shape, SIZE, "#pragma pencil independent"))
    assert parse_ok(pretty_print(unit)) == unit


def test_empty_function_prints_braces():
    assert pretty_print(parse_ok("void f(void) {}")) == "void f(void)\n{\n}\n"


def lower(src, binding=None):
    result = run_pipeline(src, "t.pencil.c", "analyze", binding)
    return result, emit_openmp(result.unit, result.loops)


def test_parallel_loop_gets_pragma():
    _, low = lower("void f(int n, int A[restrict const static n]) "
                   "{ for (int i = 0; i < n; i++) A[i] = i; }")
    lines = low.text.splitlines()
    assert OMP_FOR in lines[low_line(low) - 1]
    assert lines[low_line(low)].lstrip().startswith("for (")


def low_line(low):
    (line, lid), = low.pragma_lines.items()
    assert lid == "f.L0"
    return line


def test_reduction_clause(corpus):
    _, low = lower(corpus["sum.pencil.c"])
    assert "#pragma omp parallel for reduction(+:x)" in low.text
    # the source directive stays, directly above the OpenMP line
    assert "#pragma pencil reduction (+:x)\n  #pragma omp parallel for" in low.text


def test_labeled_directive_preserved(corpus):
    _, low = lower(corpus["labeled.pencil.c"])
    assert "#pragma pencil independent (s1)" in low.text


def test_serial_loop_is_left_alone():
    _, low = lower("void f(int n, int B[restrict const static n]) "
                   "{ for (int i = 1; i < n; i++) B[i] = B[i - 1]; }", Binding({"n": 4}))
    assert OMP_FOR not in low.text and low.pragma_lines == {}


def test_while_marker(corpus):
    _, low = lower(corpus["while_indep.pencil.c"])
    assert WHILE_MARKER in low.text and OMP_FOR not in low.text


def test_array_reduction_section():
    src = ("void f(int n, int A[restrict const static 4], int t[restrict const static n])\n{\n"
           "#pragma pencil reduction (+:A)\n  for (int i = 0; i < n; i++)\n    A[t[i]] += 1;\n}\n")
    _, low = lower(src, Binding({"n": 3}, {"t": [0, 0, 1]}))
    assert "reduction(+:A[0:4])" in low.text


def test_emit_out_of_scope_reduction():
    unit = parse_ok("void f(int n, int A[restrict const static n]) "
                    "{ for (int i = 0; i < n; i++) A[i] = 0; }")
    (lid, loop), = N.iter_loops(unit.functions[0])
    rep = DependenceReport(lid, ASSUMED_PARALLEL, "DIRECTIVE", reductions=[("+", ["ghost"])],
                           loc=loop.loc, kind="for", function="f")
    low = emit_openmp(unit, [rep])
    assert [d.code for d in low.diagnostics] == ["E-EMIT"]
    assert OMP_FOR not in low.text


def test_report_validates_and_is_stable(corpus):
    schema = load_schema()
    for name, src in sorted(corpus.items()):
        texts = set()
        for _ in range(3):
            r = run_pipeline(src, name, "analyze", None)
            texts.add(dumps(emit_report(r.unit, r.diagnostics, r.triples, r.loops, name)))
        assert len(texts) == 1
        jsonschema.validate(json.loads(texts.pop()), schema)


def test_bar_report_codes(corpus):
    r = run_pipeline(corpus["bar.pencil.c"], "bar.pencil.c", "check")
    rep = emit_report(r.unit, r.diagnostics)
    assert {d["code"] for d in rep["diagnostics"] if d["severity"] == "error"} == {"R8", "R3"}


def test_fp_reduction_flag(corpus):
    r = run_pipeline(corpus["sum.pencil.c"], "sum.pencil.c", "analyze")
    rep = emit_report(r.unit, r.diagnostics, r.triples, r.loops)
    assert rep["flags"]["fp-reduction-reorders-results"] is True
    assert rep["loops"][0]["reductions"] == [{"op": "+", "vars": ["x"], "array": False}]


def test_witness_cap():
    r = run_pipeline("void f(int n, int A[restrict const static 1]) "
                     "{ for (int i = 0; i < n; i++) A[0] = A[0] + i; }", "w.c", "analyze",
                     Binding({"n": 40}))
    rep = emit_report(r.unit, r.diagnostics, r.triples, r.loops)
    loop = rep["loops"][0]
    assert loop["verdict"] == "SERIAL"
    assert len(loop["witnesses"]) == 50 and loop["witness_count"] > 50


@needs_gcc
def test_stencil_matches_interpreter(corpus):
    got, want, _ = lowered_vs_interpreter(
        corpus["stencil.pencil.c"], "run",
        Binding({"n": 5}, {"a": [3, 1, 4, 1, 5], "out": [0, 0, 0]}))
    assert got == want


@needs_gcc
def test_harness_return_value(corpus):
    got, want, result = lowered_vs_interpreter(corpus["sum.pencil.c"], "sum_exp", Binding())
    assert got == want
    assert got.startswith("return: ")


@needs_gcc
def test_emitted_pragmas_build_with_openmp(corpus, tmp_path):
    from cdriver import compile_and_run
    from pencilc.lowering.openmp import PRELUDE
    _, low = lower(corpus["sum.pencil.c"])
    text = PRELUDE + low.text + "int main(void) { printf(\"%.3f\\n\", sum_exp()); return 0; }\n"
    assert compile_and_run(text, str(tmp_path), openmp=True).strip() != ""
