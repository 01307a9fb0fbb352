"""The machine-readable analysis report (schema ``pencilc-report-v1``)."""

from __future__ import annotations

import json
from importlib import resources

from .. import __version__
from .. import nodes as N
from ..diagnostics import sort_diagnostics
from .openmp import visible_names

SCHEMA_ID = "pencilc-report-v1"
MAX_WITNESSES = 50
_FLOAT_TYPES = ("float", "double")


def load_schema():
    text = resources.files("pencilc").joinpath("schema/report-v1.json").read_text("utf-8")
    return json.loads(text)


def _reduction_entries(unit, rep):
    fn = unit.function(rep.function) if rep.function else None
    scope = {}
    if fn is not None:
        for lid, loop in N.iter_loops(fn):
            if lid == rep.loop_id:
                scope = visible_names(fn).get(id(loop), {})
    entries = []
    floating = False
    for op, names in rep.reductions:
        is_array = False
        for name in names:
            decl = scope.get(name)
            if decl is None:
                continue
            if getattr(decl, "dims", None):
                is_array = True
            if decl.ctype in _FLOAT_TYPES:
                floating = True
        entries.append({"op": op, "vars": list(names), "array": is_array})
    return entries, floating


def emit_report(unit, diagnostics, triples=None, depreports=(), source=None):
    """Assemble the report as plain JSON-compatible data.

    ``triples`` maps function names to AccessRelationTriple objects.  Key
    order and list order are fixed so serialization is byte-stable.
    """
    triples = triples or {}
    diagnostics = sort_diagnostics(diagnostics)
    functions = []
    names = [f.name for f in unit.functions] if unit is not None else []
    for name in names:
        own = [d.to_json() for d in diagnostics if d.function == name]
        t = triples.get(name)
        functions.append({"name": name, "diagnostics": own,
                          "summary": t.to_json() if t is not None else None})
    order = {n: k for k, n in enumerate(names)}
    loops = []
    fp_flag = False
    for rep in sorted(depreports, key=lambda r: (order.get(r.function, len(order)),
                                                   _loop_number(r.loop_id))):
        reductions, floating = _reduction_entries(unit, rep)
        fp_flag = fp_flag or floating
        loops.append({
            "id": rep.loop_id,
            "function": rep.function,
            "kind": rep.kind,
            "location": rep.loc.to_json(),
            "verdict": rep.verdict,
            "basis": rep.basis,
            "witnesses": [w.to_json() for w in rep.witnesses[:MAX_WITNESSES]],
            "witness_count": len(rep.witnesses),
            "reductions": reductions,
            "notes": list(rep.notes),
        })
    return {
        "schema": SCHEMA_ID,
        "tool": {"name": "pencilc", "version": __version__},
        "source": source or (unit.file if unit is not None else "<input>"),
        "diagnostics": [d.to_json() for d in diagnostics],
        "functions": functions,
        "loops": loops,
        "flags": {"fp-reduction-reorders-results": fp_flag},
    }


def _loop_number(loop_id):
    tail = loop_id.rsplit(".L", 1)[-1]
    return int(tail) if tail.isdigit() else 0


def dumps(report):
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def report_text(report):
    """Human-readable rendering used by ``--format text``."""
    out = []
    for d in report["diagnostics"]:
        loc = d["location"]
        out.append(f"{loc['file']}:{loc['line']}:{loc['column']}: {d['severity']}: "
                   f"[{d['code']}] {d['message']}")
    for f in report["functions"]:
        t = f["summary"]
        if t is None:
            continue
        out.append(f"summary of {f['name']}:")
        for kind in ("read", "must_write", "may_write"):
            cells = ", ".join(r["array"] + "".join(f"[{'?' if i is None else i}]"
                                                   for i in r["index"]) for r in t[kind])
            out.append(f"  {kind}: {{{cells}}}")
    for lp in report["loops"]:
        line = f"loop {lp['id']} ({lp['kind']}, line {lp['location']['line']}): {lp['verdict']}"
        if lp["basis"]:
            line += f" [{lp['basis']}]"
        out.append(line)
        for r in lp["reductions"]:
            out.append(f"  reduction {r['op']}: {', '.join(r['vars'])}")
        for w in lp["witnesses"]:
            out.append(f"  {w['kind']} {w['source']} -> {w['sink']} on "
                       f"{w['array']}{''.join(f'[{i}]' for i in w['index'])}")
        if lp["witness_count"] > len(lp["witnesses"]):
            out.append(f"  ... {lp['witness_count'] - len(lp['witnesses'])} more")
        for n in lp["notes"]:
            out.append(f"  note: {n}")
    if report["flags"]["fp-reduction-reorders-results"]:
        out.append("flag: fp-reduction-reorders-results")
    return "\n".join(out) + ("\n" if out else "")
