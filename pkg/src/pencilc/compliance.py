"""Coding-rule checks (R1-R8) and recursion detection over the call graph."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import nodes as N
from .diagnostics import ERROR, WARNING, Diagnostic, sort_diagnostics


@dataclass(frozen=True)
class CallEdge:
    caller: str
    callee: str
    loc: N.Loc


@dataclass
class CallGraph:
    nodes: list
    edges: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def successors(self, name):
        return sorted({e.callee for e in self.edges if e.caller == name})

    def edge_set(self):
        return {(e.caller, e.callee) for e in self.edges}


def _exprs_of(fn):
    for s in N.walk_stmts(fn.body):
        for e in N.stmt_exprs(s):
            yield s, e


def build_call_graph(unit):
    """One edge per textual call site; ACCESS annotations are not calls."""
    defined = {f.name for f in unit.functions}
    graph = CallGraph(sorted(defined))
    for fn in unit.functions:
        if fn.body is None:
            continue
        for _, top in _exprs_of(fn):
            for e in N.walk_expr(top):
                if not isinstance(e, N.Call) or e.func in N.SUMMARY_MACROS:
                    continue
                if e.func in defined:
                    graph.edges.append(CallEdge(fn.name, e.func, e.loc))
                elif e.func not in N.PURE_EXTERNALS:
                    graph.diagnostics.append(Diagnostic(
                        "E-UNDEF", f"call to undefined function '{e.func}'", e.loc,
                        function=fn.name))
    return graph


def strongly_connected_components(nodes, succ):
    """Tarjan's algorithm; components come out in reverse topological order."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    out = []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in succ(v):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp))

    for v in nodes:
        if v not in index:
            visit(v)
    return out


def check_no_recursion(graph):
    edges = graph.edge_set()
    diags = []
    for comp in strongly_connected_components(graph.nodes, graph.successors):
        if len(comp) == 1 and (comp[0], comp[0]) not in edges:
            continue
        members = set(comp)
        sites = sorted((e for e in graph.edges if e.caller in members and e.callee in members),
                       key=lambda e: e.loc)
        site = sites[0]
        if len(comp) == 1:
            msg = f"function '{comp[0]}' calls itself"
        else:
            msg = "recursive cycle through " + ", ".join(f"'{c}'" for c in comp)
        diags.append(Diagnostic("R6", msg, site.loc, function=site.caller))
    return sort_diagnostics(diags)


class _FunctionChecker:
    def __init__(self, fn, unit, is_summary):
        self.fn = fn
        self.unit = unit
        self.is_summary = is_summary
        self.diags = []
        self.pointers = {p.name for p in fn.params if p.kind == "pointer"}

    def add(self, code, msg, loc, severity=ERROR):
        self.diags.append(Diagnostic(code, msg, loc, severity, function=self.fn.name))

    def params(self):
        for p in self.fn.params:
            if p.kind == "ptrarray":
                self.add("R8", f"parameter '{p.name}' is an array of pointers", p.loc)
            elif p.kind == "array":
                missing = [q for q in ("restrict", "const", "static") if not getattr(p, q)]
                if not missing:
                    continue
                sev = WARNING if missing == ["static"] else ERROR
                self.add("R1", f"array parameter '{p.name}' lacks {', '.join(missing)}", p.loc, sev)
            elif p.kind == "pointer":
                if p.ptr_depth != 1 or not (p.ptr_const and p.ptr_restrict):
                    self.add("R2", f"pointer parameter '{p.name}' must be declared "
                             f"'{p.ctype} * const restrict {p.name}'", p.loc)

    def body(self):
        goto_targets = {s.label for s in N.walk_stmts(self.fn.body) if isinstance(s, N.Goto)}
        for s in N.walk_stmts(self.fn.body):
            if isinstance(s, N.Decl) and s.pointer:
                self.add("R3", f"local pointer '{s.name}'", s.loc)
            elif isinstance(s, N.Goto):
                self.add("R5", f"goto {s.label}", s.loc)
            elif isinstance(s, N.Labeled) and s.label in goto_targets:
                self.add("R5", f"label '{s.label}' is a goto target", s.loc)
            elif isinstance(s, N.SummaryAccess) and not self.is_summary:
                self.add("R7", f"{s.spelling or s.kind} used outside an access-summary function",
                         s.loc)
            elif isinstance(s, N.Assign) and isinstance(s.target, N.Name) \
                    and s.target.id in self.pointers:
                self.add("R4", f"pointer '{s.target.id}' is reseated", s.loc)
            for e in N.stmt_exprs(s):
                self.expr(e)

    def expr(self, e, pointer_arg_ok=False):
        if isinstance(e, N.Unary):
            if e.op == "&" and not (pointer_arg_ok and isinstance(e.operand, N.Name)):
                self.add("R4", "address-of operator", e.loc)
            elif e.op == "*" and not isinstance(e.operand, N.Name):
                self.add("R4", "dereference of a computed address", e.loc)
            self.expr(e.operand)
        elif isinstance(e, N.Binary):
            for side in (e.left, e.right):
                if isinstance(side, N.Name) and side.id in self.pointers:
                    self.add("R4", f"arithmetic on pointer '{side.id}'", e.loc)
                self.expr(side)
        elif isinstance(e, N.Index):
            if e.base in self.pointers:
                self.add("R4", f"pointer '{e.base}' indexed like an array", e.loc)
            for i in e.indices:
                self.expr(i)
        elif isinstance(e, N.Call):
            callee = self.unit.function(e.func)
            for k, a in enumerate(e.args):
                p = callee.params[k] if callee is not None and k < len(callee.params) else None
                self.expr(a, pointer_arg_ok=p is not None and p.kind == "pointer")


def check_compliance(unit):
    """All rule violations of ``unit``, sorted by location."""
    diags = []
    summaries = unit.summary_names
    for fn in unit.functions:
        c = _FunctionChecker(fn, unit, fn.name in summaries)
        c.params()
        if fn.body is not None:
            c.body()
        diags.extend(c.diags)
    graph = build_call_graph(unit)
    diags.extend(graph.diagnostics)
    diags.extend(check_no_recursion(graph))
    return sort_diagnostics(diags)
