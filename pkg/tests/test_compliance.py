import pytest
from hypothesis import given, settings, strategies as st

from pencilc.compliance import (CallEdge, CallGraph, build_call_graph, check_compliance,
                                check_no_recursion)
from pencilc.diagnostics import NOWHERE

from conftest import parse_ok
from oracles import recursive_groups


def rules(src):
    return [(d.code, d.severity) for d in check_compliance(parse_ok(src))]


def test_compliant_listing_passes(corpus):
    assert check_compliance(parse_ok(corpus["compliant_foo.pencil.c"])) == []
    assert check_compliance(parse_ok(corpus["summary_foo.pencil.c"])) == []


def test_bar_listing_exact(corpus):
    diags = check_compliance(parse_ok(corpus["bar.pencil.c"]))
    assert [(d.code, d.loc.line) for d in diags] == [("R8", 2), ("R3", 3)]
    assert "'d'" in diags[0].message and "'e'" in diags[1].message


def test_goto_and_recursion(corpus):
    assert {d.code for d in check_compliance(parse_ok(corpus["goto.pencil.c"]))} == {"R5"}
    diags = check_compliance(parse_ok(corpus["mutual.pencil.c"]))
    assert [d.code for d in diags] == ["R6"]
    assert "'even'" in diags[0].message and "'odd'" in diags[0].message


@pytest.mark.parametrize("param,expected", [
    ("int a[restrict const static 4]", []),
    ("int a[restrict const 4]", [("R1", "warning")]),
    ("int a[const static 4]", [("R1", "error")]),
    ("int a[4]", [("R1", "error")]),
    ("int a[restrict const static 4][3]", []),
])
def test_r1_qualifiers(param, expected):
    assert rules(f"void f({param}) {{ }}") == expected


@pytest.mark.parametrize("param,expected", [
    ("int * const restrict p", []),
    ("int * p", ["R2"]),
    ("int * restrict p", ["R2"]),
    ("int ** const restrict p", ["R2"]),
])
def test_r2_pointer_params(param, expected):
    assert [c for c, _ in rules(f"void f({param}) {{ }}")] == expected


def test_r4_pointer_misuse():
    src = """
void g(int * const restrict p) { *p = 1; }
void f(int * const restrict q, int a[restrict const static 2])
{
  int x;
  x = 0;
  g(&x);
  g(q);
  x = *q + 1;
  x = q[1];
  q = q;
  x = *(q + 1);
  a[0] = x;
}
"""
    got = [c for c, _ in rules(src)]
    assert got.count("R4") >= 4
    assert set(got) == {"R4"}


def test_address_of_outside_pointer_argument():
    src = "void g(int a) { } void f(int x) { g(&x); }"
    assert [c for c, _ in rules(src)] == ["R4"]


def test_r7_summary_macros_outside_summary():
    src = "void f(int n, int A[restrict const static n]) { DEF(A[0]); }"
    assert [c for c, _ in rules(src)] == ["R7"]


def test_undefined_call():
    assert [c for c, _ in rules("void f(void) { g(); }")] == ["E-UNDEF"]
    assert rules("void f(double x) { x = exp(x) + sqrt(2.0); }") == []


def test_diagnostics_sorted_and_deterministic():
    src = "void f(int * p) { int *e; goto l; l: ; }\nvoid g(int *(d[2])) { }"
    a = check_compliance(parse_ok(src))
    b = check_compliance(parse_ok(src))
    assert a == b
    assert [d.loc for d in a] == sorted(d.loc for d in a)


def test_call_graph_edges():
    unit = parse_ok("""
void kernel(int n, int a[restrict const static n]) { a[0] = 1; }
void main_loop(int n, int a[restrict const static n])
{
  for (int i = 0; i < n; i++)
    kernel(n, a);
}
""")
    g = build_call_graph(unit)
    assert g.edge_set() == {("main_loop", "kernel")}
    assert len(g.edges) == 1
    assert build_call_graph(parse_ok("void f(void) { f(); }")).edge_set() == {("f", "f")}


def test_access_is_not_a_call_edge(corpus):
    g = build_call_graph(parse_ok(corpus["summary_foo.pencil.c"]))
    assert ("foo", "foo_summary") not in g.edge_set()
    assert g.edges == []


def _graph(nodes, edges):
    return CallGraph(list(nodes), [CallEdge(a, b, NOWHERE) for a, b in edges])


def test_scc_examples():
    assert check_no_recursion(_graph("fgh", [("f", "g"), ("g", "h")])) == []
    (d,) = check_no_recursion(_graph("fg", [("f", "g"), ("g", "f")]))
    assert d.code == "R6"
    two = check_no_recursion(_graph("fghx", [("f", "f"), ("g", "h"), ("h", "g"), ("x", "f")]))
    assert len(two) == 2 and {d.code for d in two} == {"R6"}


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just([f"f{k}" for k in range(n)]),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=16))))
def test_r6_matches_path_enumeration(case):
    nodes, pairs = case
    edges = [(nodes[a], nodes[b]) for a, b in pairs]
    diags = check_no_recursion(_graph(nodes, edges))
    expected = recursive_groups(nodes, set(edges))
    assert len(diags) == len(expected)
    assert bool(diags) == bool(expected)
    for group in expected:
        assert any(all(f"'{name}'" in d.message for name in group) for d in diags)
