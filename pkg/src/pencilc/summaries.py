"""Interpretation of access-summary functions into read / must-write / may-write sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import nodes as N
from .diagnostics import WARNING, Diagnostic, DiagnosticSink, PencilError
from .parser import parse_expression
from .interp import UNKNOWN, ArrayStore, Binding, Executor, _uids, is_unknown

READ = "READ"
MUST_WRITE = "MUST_WRITE"
MAY_WRITE = "MAY_WRITE"

# Alias kept for readers who know the data type by its domain name.
ParamBinding = Binding


@dataclass(frozen=True, order=True)
class AccessRecord:
    array: str
    index: tuple
    kind: str
    iter: tuple = ()
    labels: tuple = field(default=(), compare=False)
    op: Optional[str] = field(default=None, compare=False)

    @property
    def element(self):
        return (self.array, self.index)

    @property
    def has_unknown_index(self):
        return any(is_unknown(i) for i in self.index)

    def to_json(self):
        return {
            "array": self.array,
            "index": [None if is_unknown(i) else i for i in self.index],
            "kind": self.kind,
            "iter": list(self.iter),
        }


def _sort_key(r):
    return (r.array, tuple((1, 0) if is_unknown(i) else (0, i) for i in r.index), r.kind, r.iter)


@dataclass
class AccessRelationTriple:
    read: set = field(default_factory=set)
    must_write: set = field(default_factory=set)
    may_write: set = field(default_factory=set)
    warnings: list = field(default_factory=list)

    def add(self, kind, array, index, iters=(), labels=(), op=None):
        if kind == READ:
            self.read.add(AccessRecord(array, index, READ, iters, labels, op))
        elif kind == MUST_WRITE:
            self.must_write.add(AccessRecord(array, index, MUST_WRITE, iters, labels, op))
            self.may_write.add(AccessRecord(array, index, MAY_WRITE, iters, labels, op))
        else:
            self.may_write.add(AccessRecord(array, index, MAY_WRITE, iters, labels, op))

    def elements(self, kind):
        """The (array, index) pairs of one relation, iteration vectors dropped."""
        records = {READ: self.read, MUST_WRITE: self.must_write, MAY_WRITE: self.may_write}[kind]
        return {r.element for r in records}

    def records(self):
        return self.read | self.must_write | self.may_write

    def must_within_may(self):
        may = {(r.array, r.index, r.iter) for r in self.may_write}
        return all((r.array, r.index, r.iter) in may for r in self.must_write)

    def to_json(self):
        return {
            "read": [r.to_json() for r in sorted(self.read, key=_sort_key)],
            "must_write": [r.to_json() for r in sorted(self.must_write, key=_sort_key)],
            "may_write": [r.to_json() for r in sorted(self.may_write, key=_sort_key)],
        }

    def __len__(self):
        return len(self.read) + len(self.must_write) + len(self.may_write)


class _SummaryRecorder:
    """Collects DEF/USE/MAY_DEF events (and, optionally, direct accesses)."""

    def __init__(self, triple, record_direct=False, horizon=None):
        self.triple = triple
        self.record_direct = record_direct
        self.horizon = horizon
        self.bounds_seen = set()

    def _count(self, ex):
        ex.tick()

    def _check_bounds(self, store, idx, node_loc=None):
        if not isinstance(store, ArrayStore) or not store.extents:
            return
        for i, e in zip(idx, store.extents):
            if isinstance(e, int) and not is_unknown(i) and not (0 <= i < e):
                key = (store.name, idx)
                if key not in self.bounds_seen:
                    self.bounds_seen.add(key)
                    self.triple.warnings.append(Diagnostic(
                        "E-BOUNDS", f"{store.name}{list(idx)} lies outside declared extents "
                        f"{list(store.extents)}", severity=WARNING))
                return

    def summary(self, ex, kind, store, idx, iters, may):
        self._count(ex)
        self._check_bounds(store, idx)
        if kind == "USE":
            self.triple.add(READ, store.name, idx, iters)
        elif kind == "DEF" and not may:
            self.triple.add(MUST_WRITE, store.name, idx, iters)
        else:
            self.triple.add(MAY_WRITE, store.name, idx, iters)

    def _visible(self, store):
        return self.record_direct and self.horizon is not None and store.uid < self.horizon

    def read(self, ex, store, idx, tag):
        if self._visible(store) and isinstance(store, ArrayStore):
            self._count(ex)
            self.triple.add(READ, store.name, idx)

    def write(self, ex, store, idx, tag, may):
        if self._visible(store) and isinstance(store, ArrayStore):
            self._count(ex)
            self.triple.add(MAY_WRITE if may else MUST_WRITE, store.name, idx)


def resolve_access_bindings(unit):
    """Map each function carrying ``ACCESS(...)`` to its summary and argument substitution.

    Returns ``(bindings, diagnostics)`` where bindings maps a function name to
    ``(summary name, {summary parameter: caller argument expression})``.
    """
    sink = DiagnosticSink()
    out = {}
    for fn in unit.functions:
        if fn.access is None:
            continue
        summary = unit.function(fn.access.summary)
        if summary is None:
            sink.add("E-SUMMARY-UNDEF", f"ACCESS of '{fn.name}' names unknown function "
                     f"'{fn.access.summary}'", fn.access.loc, function=fn.name)
            continue
        if len(summary.params) != len(fn.access.args):
            sink.add("E-SUMMARY-ARITY", f"ACCESS of '{fn.name}' passes {len(fn.access.args)} "
                     f"arguments but '{summary.name}' takes {len(summary.params)}",
                     fn.access.loc, function=fn.name)
            continue
        if summary.body is None:
            sink.add("E-SUMMARY-UNDEF", f"summary '{summary.name}' has no body",
                     fn.access.loc, function=fn.name)
            continue
        out[fn.name] = (summary.name, {p.name: a for p, a in zip(summary.params, fn.access.args)})
    return out, sink.items


def interpret_summary(summary, binding, unit=None, budget=None):
    """Enumerate the accesses a summary function traverses under ``binding``.

    Only scalar values of the binding are used; array contents are never
    consulted.  Raises PencilError with E-NONAFFINE or E-BUDGET.
    """
    unit = unit or N.TranslationUnit([summary])
    triple = AccessRelationTriple()
    rec = _SummaryRecorder(triple)
    ex = Executor(unit, concrete=False, recorder=rec, budget=budget)
    ex.summary_depth = 1
    ex.run_function(summary, Binding(dict(binding.scalars), {}))
    return triple


def summarize_call(unit, callee, args, binding, budget=None):
    """Access triple of ``callee(args)`` evaluated in a caller whose scalars are ``binding``.

    Array arguments must be plain names; records are reported against the
    caller's array names.
    """
    fn = unit.function(callee)
    if fn is None:
        if callee in N.PURE_EXTERNALS:
            return AccessRelationTriple()
        raise PencilError("E-NO-SUMMARY", f"'{callee}' is neither defined nor a pure external")
    if fn.access is None and fn.body is None:
        raise PencilError("E-NO-SUMMARY", f"'{callee}' has neither a body nor an access summary",
                          fn.loc)
    triple = AccessRelationTriple()
    rec = _SummaryRecorder(triple, record_direct=fn.access is None)
    ex = Executor(unit, concrete=False, recorder=rec, budget=budget)
    ex.scopes = [{}]
    arg_exprs = [parse_expression(a) if isinstance(a, str) else a for a in args]
    for p, a in zip(fn.params, arg_exprs):
        for e in N.walk_expr(a):
            if not isinstance(e, N.Name) or e.id in ex.scopes[0]:
                continue
            if p.kind in ("array", "ptrarray") and a is e:
                ex.new_array(e.id, p.ctype, [None] * max(1, len(p.dims)))
            elif e.id in binding.scalars:
                ex.new_cell(e.id, "double" if isinstance(binding.scalars[e.id], float) else "int",
                            binding.scalars[e.id])
            else:
                ex.new_cell(e.id, "int", UNKNOWN)
    rec.horizon = next(_uids)
    ex.call(N.Call(callee, arg_exprs))
    return triple
