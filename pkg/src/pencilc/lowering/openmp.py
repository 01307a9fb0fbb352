"""OpenMP-annotated C from an analyzed PENCIL unit, plus a C test harness."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import nodes as N
from ..depanalysis import ASSUMED_PARALLEL, PARALLEL, PARALLEL_WITH_REDUCTION
from ..diagnostics import Diagnostic
from .printer import INDENT, Printer, expr_to_str

OMP_FOR = "#pragma omp parallel for"
WHILE_MARKER = "/* pencil:independent */"

# Lets the emitted text build as plain C99: the pencil macros vanish.
PRELUDE = """#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#define ACCESS(x)
#define DEF(x) ((void)(x))
#define USE(x) ((void)(x))
#define MAY_DEF(x) ((void)(x))
"""


@dataclass
class LoweredSource:
    text: str
    pragma_lines: dict = field(default_factory=dict)  # 1-based line -> loop id
    diagnostics: list = field(default_factory=list)


def visible_names(fn):
    """Map id(loop) -> {name: declaration} for names in scope at each loop."""
    out = {}

    def walk(s, scope):
        if isinstance(s, N.Block):
            inner = dict(scope)
            for c in s.stmts:
                if isinstance(c, N.Decl):
                    inner[c.name] = c
                walk(c, inner)
            return
        if isinstance(s, N.LOOPS):
            out[id(s)] = dict(scope)
            inner = dict(scope)
            if isinstance(s, N.For) and s.decl_type:
                inner[s.var] = N.Decl(s.var, s.decl_type)
            walk(s.body, inner)
            return
        for c in N.child_stmts(s):
            walk(c, dict(scope))

    if fn.body is not None:
        walk(fn.body, {p.name: p for p in fn.params})
    return out


def _reduction_item(name, decl):
    dims = getattr(decl, "dims", None) or []
    if not dims:
        return name
    if any(d is None for d in dims):
        return None
    return name + "".join(f"[0:{expr_to_str(d)}]" for d in dims)


class _OmpPrinter(Printer):
    def __init__(self, fn, reports, sink):
        super().__init__()
        self.fn = fn
        self.reports = reports  # id(loop) -> (loop id, DependenceReport)
        self.scopes = visible_names(fn)
        self.sink = sink
        self.marks = {}  # index into self.lines -> loop id

    def loop_prologue(self, loop, depth):
        super().loop_prologue(loop, depth)
        entry = self.reports.get(id(loop))
        if entry is None:
            return
        lid, rep = entry
        if isinstance(loop, N.While):
            if rep.verdict == ASSUMED_PARALLEL:
                self.marks[len(self.lines)] = lid
                self.emit(depth, WHILE_MARKER)
            return
        if rep.verdict not in (PARALLEL, PARALLEL_WITH_REDUCTION, ASSUMED_PARALLEL):
            return
        clauses = []
        scope = self.scopes.get(id(loop), {})
        for op, names in rep.reductions:
            items = []
            for name in names:
                decl = scope.get(name)
                item = _reduction_item(name, decl) if decl is not None else None
                if item is None:
                    self.sink.append(Diagnostic(
                        "E-EMIT", f"reduction variable '{name}' is not in scope at loop {lid}",
                        loop.loc, function=self.fn.name))
                    return
                items.append(item)
            clauses.append(f" reduction({op}:{', '.join(items)})")
        self.marks[len(self.lines)] = lid
        self.emit(depth, OMP_FOR + "".join(clauses))


def emit_openmp(unit, depreports):
    """Print ``unit`` with OpenMP pragmas on loops the reports call parallel.

    ``depreports`` is a list of DependenceReport whose ``loop_id`` values
    come from ``nodes.iter_loops``.  A failed reduction scope check leaves
    that loop without a pragma and adds E-EMIT.
    """
    by_id = {r.loop_id: r for r in depreports}
    chunks = []
    pragma_lines = {}
    diags = []
    offset = 0
    for fn in unit.functions:
        reports = {}
        for lid, loop in N.iter_loops(fn):
            if lid in by_id:
                reports[id(loop)] = (lid, by_id[lid])
        p = _OmpPrinter(fn, reports, diags)
        p.function(fn)
        for idx, lid in p.marks.items():
            pragma_lines[offset + idx + 1] = lid
        chunks.append("\n".join(p.lines) + "\n")
        offset += len(p.lines) + 1
    return LoweredSource("\n".join(chunks), pragma_lines, diags)


# ------------------------------------------------------------------ harness


def _c_literal(ctype, v):
    if ctype == "int":
        return str(int(v))
    return repr(float(v))


def format_value(ctype, v):
    """Text the harness prints for one value; the interpreter side uses it too."""
    if ctype == "int":
        return str(int(v))
    return "%.17g" % v


def emit_harness(unit, entry, binding, extents):
    """A ``main`` that feeds ``binding`` to ``entry`` and prints every output.

    ``extents`` maps each array parameter to its concrete extent tuple.
    Arrays are printed one per line, ``name: v0 v1 ...``, in parameter order.
    """
    fn = unit.function(entry)
    lines = ["int main(void)", "{"]
    args = []
    prints = []
    for p in fn.params:
        if p.kind == "scalar":
            lines.append(f"{INDENT}{p.ctype} {p.name} = "
                         f"{_c_literal(p.ctype, binding.scalars[p.name])};")
            args.append(p.name)
        elif p.kind == "pointer":
            lines.append(f"{INDENT}{p.ctype} {p.name} = "
                         f"{_c_literal(p.ctype, binding.scalars.get(p.name, 0))};")
            args.append("&" + p.name)
            prints.append((p, False))
        else:
            ext = extents[p.name]
            total = 1
            for e in ext:
                total *= e
            data = binding.arrays.get(p.name, [0] * total)
            init = ", ".join(_c_literal(p.ctype, v) for v in data) or "0"
            dims = "".join(f"[{e}]" for e in ext)
            lines.append(f"{INDENT}static {p.ctype} {p.name}{dims} = {{{init}}};")
            args.append(p.name)
            prints.append((p, True))
    call = f"{entry}({', '.join(args)})"
    if fn.ret != "void":
        fmt = "%d" if fn.ret == "int" else "%.17g"
        lines.append(f'{INDENT}printf("return: {fmt}\\n", {call});')
    else:
        lines.append(f"{INDENT}{call};")
    for p, is_array in prints:
        fmt = "%d" if p.ctype == "int" else "%.17g"
        if not is_array:
            lines.append(f'{INDENT}printf("{p.name}: {fmt}\\n", {p.name});')
            continue
        ext = extents[p.name]
        lines.append(f'{INDENT}printf("{p.name}:");')
        flat = f"((const {p.ctype} *){p.name})"
        total = 1
        for e in ext:
            total *= e
        lines.append(f"{INDENT}for (int k = 0; k < {total}; k++) "
                     f'printf(" {fmt}", {flat}[k]);')
        lines.append(f'{INDENT}printf("\\n");')
    lines.append(f"{INDENT}return 0;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_outputs(fn, ret, outputs):
    """Interpreter results in the harness's print format."""
    out = []
    if fn.ret != "void":
        out.append(f"return: {format_value(fn.ret, ret)}")
    for p in fn.params:
        if p.kind == "pointer":
            out.append(f"{p.name}: {format_value(p.ctype, outputs[p.name])}")
        elif p.kind in ("array", "ptrarray"):
            vals = "".join(" " + format_value(p.ctype, v) for v in outputs[p.name])
            out.append(f"{p.name}:{vals}")
    return "\n".join(out) + "\n"
