"""Per-loop dependence analysis.

Verdicts come from, in order: an affine injectivity proof that needs no
data, exact enumeration of every iteration's accesses under a concrete
binding, and finally the pencil directives on the loop.  A verdict reached
without directives is never overridden by them, so adding a directive can
only make a loop *more* parallel.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from . import nodes as N
from .diagnostics import NOWHERE, Diagnostic, PencilError
from .interp import ArrayStore, Binding, Executor, Unanalyzable, _uids, is_unknown
from .summaries import MAY_WRITE, MUST_WRITE, READ, AccessRecord, AccessRelationTriple

PARALLEL = "PARALLEL"
PARALLEL_WITH_REDUCTION = "PARALLEL_WITH_REDUCTION"
SERIAL = "SERIAL"
UNKNOWN_VERDICT = "UNKNOWN"
ASSUMED_PARALLEL = "ASSUMED_PARALLEL"
VERDICTS = (PARALLEL, PARALLEL_WITH_REDUCTION, SERIAL, UNKNOWN_VERDICT, ASSUMED_PARALLEL)

ENUMERATION = "ENUMERATION"
AFFINE = "AFFINE"
DIRECTIVE = "DIRECTIVE"

RAW, WAR, WAW = "RAW", "WAR", "WAW"

# Witness search stops after this many; a verdict only needs emptiness.
WITNESS_LIMIT = 1000
MIXED_OP = "mixed"  # operator tag of an element updated by differing statements


@dataclass
class IterationAccess:
    iteration: int
    triple: AccessRelationTriple
    instance: int = 0


@dataclass(frozen=True, order=True)
class DependenceWitness:
    kind: str
    source: int
    sink: int
    array: str
    index: tuple

    def to_json(self):
        return {"kind": self.kind, "source": self.source, "sink": self.sink,
                "array": self.array, "index": list(self.index)}


@dataclass
class DependenceReport:
    loop_id: str
    verdict: str
    basis: Optional[str] = None
    witnesses: list = field(default_factory=list)
    reductions: list = field(default_factory=list)  # [(op, [names])]
    loc: object = NOWHERE
    kind: str = "for"
    function: str = ""
    notes: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict == SERIAL and not self.witnesses:
            raise ValueError("SERIAL verdict needs at least one witness")
        if self.verdict == PARALLEL and self.witnesses:
            raise ValueError("PARALLEL verdict cannot carry witnesses")


# ------------------------------------------------------------------ enumeration


class _LoopRecorder:
    def __init__(self):
        self.instances = []
        self.current = None
        self.horizon = None
        self.counter = None
        self.iteration = None
        self.pending = []
        self.stmt = None
        self.names = {}

    def begin_instance(self, ex, counter):
        self.current = []
        self.horizon = next(_uids)
        self.counter = counter
        self.iteration = None
        self.pending = []

    def end_instance(self):
        self.instances.append(self.current)
        self.current = None

    def begin_iteration(self, value):
        self.iteration = IterationAccess(value, AccessRelationTriple(), len(self.instances))
        self.current.append(self.iteration)
        # Bound checks evaluated before the first iteration belong to it.
        self.seen = {}
        for kind, name, idx, labels, tag in self.pending:
            self._record(kind, name, idx, labels, tag)
        self.pending = []

    def _record(self, kind, name, idx, labels, tag):
        # One record per (kind, element) and iteration.  When several
        # statements touch the same element the record only keeps the
        # labels and operator they all share, so filters stay conservative.
        t = self.iteration.triple
        it = (self.iteration.iteration,)
        kinds = {READ: ((READ, t.read),), MAY_WRITE: ((MAY_WRITE, t.may_write),),
                 MUST_WRITE: ((MUST_WRITE, t.must_write), (MAY_WRITE, t.may_write))}[kind]
        for k, records in kinds:
            key = (k, name, idx)
            old = self.seen.get(key)
            if old is not None:
                labels_ = tuple(x for x in old.labels if x in labels)
                tag_ = old.op if old.op == tag else MIXED_OP
                if (labels_, tag_) == (old.labels, old.op):
                    continue
                records.discard(old)
            else:
                labels_, tag_ = labels, tag
            rec = AccessRecord(name, idx, k, it, labels_, tag_)
            records.add(rec)
            self.seen[key] = rec

    def statement(self, k, label):
        self.stmt = k

    def _name(self, store):
        owner = self.names.setdefault(store.name, store.uid)
        return store.name if owner == store.uid else f"{store.name}@{store.uid}"

    def _tracked(self, store):
        return (self.current is not None and store.uid < self.horizon
                and store is not self.counter)

    def _add(self, ex, kind, store, idx, tag):
        ex.tick()
        labels = tuple(ex.label_stack)
        if self.iteration is None:
            self.pending.append((kind, self._name(store), idx, labels, tag))
            return
        self._record(kind, self._name(store), idx, labels, tag)

    def read(self, ex, store, idx, tag):
        if self._tracked(store):
            self._add(ex, READ, store, idx, tag)

    def write(self, ex, store, idx, tag, may):
        if self._tracked(store):
            self._add(ex, MAY_WRITE if may else MUST_WRITE, store, idx, tag)

    def summary(self, ex, kind, store, idx, iters, may):
        if not self._tracked(store):
            return
        if kind == "USE":
            self._add(ex, READ, store, idx, None)
        else:
            self._add(ex, MUST_WRITE if kind == "DEF" and not may else MAY_WRITE, store, idx, None)


def collect_iteration_accesses(loop, binding, unit, function, budget=None):
    """Record every iteration's accesses to storage living outside the loop.

    The enclosing ``function`` runs from its entry under ``binding``; each
    dynamic execution of ``loop`` is one instance.  Raises Unanalyzable when
    control flow cannot be followed and PencilError for E-NO-SUMMARY,
    E-NONAFFINE or E-BUDGET.
    """
    rec = _LoopRecorder()
    ex = Executor(unit, concrete=False, recorder=rec, budget=budget, target_loop=loop)
    ex.run_function(function, binding or Binding())
    return [it for inst in rec.instances for it in inst]


def _writes(t):
    return t.may_write


def brute_force_dependences(accesses, limit=None):
    """All loop-carried RAW/WAR/WAW pairs, checking every pair of iterations."""
    witnesses = set()
    by_instance = defaultdict(list)
    for ia in accesses:
        for r in ia.triple.records():
            if r.has_unknown_index:
                raise PencilError("E-UNKNOWN-INDEX",
                                  f"access to {r.array} has an index unknown to the analyzer")
        by_instance[ia.instance].append(ia)
    for its in by_instance.values():
        readers = defaultdict(list)
        writers = defaultdict(list)
        for pos, ia in enumerate(its):
            for el in {r.element for r in ia.triple.read}:
                readers[el].append(pos)
            for el in {r.element for r in _writes(ia.triple)}:
                writers[el].append(pos)
        for el in sorted(set(readers) | set(writers)):
            w = writers.get(el, [])
            r = readers.get(el, [])
            if not w:
                continue
            array, index = el
            for i in w:
                for j in r:
                    if i < j:
                        witnesses.add(DependenceWitness(RAW, its[i].iteration, its[j].iteration,
                                                        array, index))
                    elif j < i:
                        witnesses.add(DependenceWitness(WAR, its[j].iteration, its[i].iteration,
                                                        array, index))
                for j in w:
                    if i < j:
                        witnesses.add(DependenceWitness(WAW, its[i].iteration, its[j].iteration,
                                                        array, index))
                if limit is not None and len(witnesses) >= limit:
                    return sorted(witnesses)
    return sorted(witnesses)


# ------------------------------------------------------------------ affine path


def affine_form(expr, var, symbols=()):
    """``(a, b, sym)`` with expr == a*var + b + sum(c*name for name, c in sym).

    Only names in ``symbols`` may appear besides ``var``; anything else
    (array reads, division, products of variables) gives None.
    """
    if isinstance(expr, N.Num):
        return None if expr.is_float else (0, expr.value, ())
    if isinstance(expr, N.Name):
        if expr.id == var:
            return (1, 0, ())
        return (0, 0, ((expr.id, 1),)) if expr.id in symbols else None
    if isinstance(expr, N.Unary):
        inner = affine_form(expr.operand, var, symbols)
        if inner is None:
            return None
        if expr.op == "-":
            return _scale(inner, -1)
        return inner if expr.op == "+" else None
    if isinstance(expr, N.Binary) and expr.op in ("+", "-", "*"):
        left = affine_form(expr.left, var, symbols)
        right = affine_form(expr.right, var, symbols)
        if left is None or right is None:
            return None
        if expr.op == "+":
            return _add(left, right)
        if expr.op == "-":
            return _add(left, _scale(right, -1))
        if _is_const(left):
            return _scale(right, left[1])
        if _is_const(right):
            return _scale(left, right[1])
    return None


def _is_const(f):
    return f[0] == 0 and not f[2]


def _scale(f, k):
    return (f[0] * k, f[1] * k, tuple((n, c * k) for n, c in f[2] if c * k))


def _add(f, g):
    coefs = dict(f[2])
    for n, c in g[2]:
        coefs[n] = coefs.get(n, 0) + c
    return (f[0] + g[0], f[1] + g[1], tuple(sorted((n, c) for n, c in coefs.items() if c)))


def _dim_solvable(p, q):
    """Whether a*i + b == c*j + e has an integer solution (i, j)."""
    (a, b), (c, e) = p, q
    if a == 0 and c == 0:
        return b == e
    return (e - b) % math.gcd(a, c) == 0


def _no_cross_overlap(p, q, wild=frozenset()):
    """True when accesses p and q never touch one element in two distinct iterations.

    Each access is a tuple of per-dimension affine forms.  Symbolic terms
    over loop-invariant names cancel when both sides carry the same ones;
    terms over ``wild`` names (inner loop counters) take any value.
    """
    if len(p) != len(q):
        return False

    def tame(sym):
        return not any(n in wild for n, _ in sym)

    if p == q and any(a != 0 and tame(sym) for a, _, sym in p):
        return True
    for (a, b, s1), (c, e, s2) in zip(p, q):
        if s1 == s2 and tame(s1) and not _dim_solvable((a, b), (c, e)):
            return True
    return False


class _NotAffine(Exception):
    pass


def _written_names(loop):
    names = set()
    for s in N.walk_stmts(loop.body):
        if isinstance(s, N.Assign) and isinstance(s.target, N.Name):
            names.add(s.target.id)
        elif isinstance(s, N.Decl):
            names.add(s.name)
        elif isinstance(s, N.For):
            names.add(s.var)
    return names


def _affine_accesses(loop, reductions):
    """Collect (name, forms, is_write) for the loop body, or raise _NotAffine.

    Scalars appear with an empty form tuple.  Compound updates of declared
    reduction variables with their operator are left out and reported in
    the second return value.
    """
    var = loop.var
    written = _written_names(loop)
    wild = set()
    for s in N.walk_stmts(loop.body):
        if isinstance(s, N.For):
            wild.add(s.var)
    accesses = []
    reduced = set()

    def symbols(scope):
        # Names usable as symbolic offsets: invariant ones and inner counters.
        return _Symbols(written, scope, wild, var)

    def forms_of(indices, scope):
        forms = tuple(affine_form(i, var, symbols(scope)) for i in indices)
        if any(f is None for f in forms):
            raise _NotAffine
        return forms

    def expr(e, scope):
        for sub in N.walk_expr(e):
            if isinstance(sub, N.Index):
                if sub.base not in scope:
                    accesses.append((sub.base, forms_of(sub.indices, scope), False))
            elif isinstance(sub, N.Name):
                if sub.id != var and sub.id not in scope and sub.id not in wild:
                    accesses.append((sub.id, (), False))
            elif isinstance(sub, N.Call):
                if sub.func not in N.PURE_EXTERNALS or sub.func == "rand":
                    raise _NotAffine
            elif isinstance(sub, N.Unary) and sub.op in ("*", "&"):
                raise _NotAffine

    def target(t, scope):
        if isinstance(t, N.Name):
            if t.id in scope:
                return
            raise _NotAffine  # scalar carried across iterations
        if isinstance(t, N.Index):
            for i in t.indices:
                expr(i, scope)
            if t.base not in scope:
                accesses.append((t.base, forms_of(t.indices, scope), True))
            return
        raise _NotAffine

    def reduction_stmt(s):
        if not isinstance(s, N.Assign) or not isinstance(s.target, (N.Name, N.Index)):
            return None
        name = s.target.id if isinstance(s.target, N.Name) else s.target.base
        op = reductions.get(name)
        if op is None:
            return None
        if s.op in ("+=", "++") and op == "+" or s.op == "*=" and op == "*":
            return name
        if s.op == "=" and isinstance(s.value, N.Call) and len(s.value.args) == 2 \
                and s.value.args[0] == s.target and \
                {"fmax": "max", "fmin": "min"}.get(s.value.func) == op:
            return name
        return None

    def stmt(s, scope):
        if isinstance(s, N.Block):
            inner = set(scope)
            for c in s.stmts:
                stmt(c, inner)
        elif isinstance(s, N.Decl):
            if s.pointer:
                raise _NotAffine
            for d in s.dims:
                expr(d, scope)
            if s.init is not None:
                expr(s.init, scope)
            scope.add(s.name)
        elif isinstance(s, N.Assign):
            if isinstance(s.target, N.Name) and s.target.id == var:
                raise _NotAffine
            red = reduction_stmt(s)
            if red is not None and red not in scope:
                reduced.add(red)
                if isinstance(s.target, N.Index):
                    for i in s.target.indices:
                        expr(i, scope)
                values = s.value.args[1:] if s.op == "=" else ([s.value] if s.value else [])
                for v in values:
                    expr(v, scope)
                return
            if s.value is not None:
                expr(s.value, scope)
            target(s.target, scope)
            if s.op != "=" and isinstance(s.target, N.Index) and s.target.base not in scope:
                accesses.append((s.target.base, accesses[-1][1], False))
        elif isinstance(s, N.ExprStmt):
            expr(s.expr, scope)
        elif isinstance(s, N.If):
            expr(s.cond, scope)
            stmt(s.then, set(scope))
            if s.orelse is not None:
                stmt(s.orelse, set(scope))
        elif isinstance(s, N.For):
            # Only counters private to one outer iteration keep the proof valid.
            if not (s.decl_type or s.var in scope):
                raise _NotAffine
            inner = set(scope) | {s.var}
            expr(s.lower, scope)
            expr(s.bound, inner)
            stmt(s.body, inner)
        elif isinstance(s, N.Labeled):
            stmt(s.stmt, scope)
        elif isinstance(s, (N.Empty, N.PragmaStmt)):
            pass
        else:
            raise _NotAffine

    stmt(loop.body, set())
    return accesses, reduced, frozenset(wild)


class _Symbols:
    """Membership test for names allowed as symbolic offsets in an index."""

    def __init__(self, written, scope, wild, var):
        self.written = written
        self.scope = scope
        self.wild = wild
        self.var = var

    def __contains__(self, name):
        if name in self.wild:
            return True
        return name != self.var and name not in self.written and name not in self.scope


def affine_fast_path(loop, reductions=None):
    """PARALLEL (or PARALLEL_WITH_REDUCTION) if an affine argument proves it, else None.

    ``reductions`` maps variable names to the declared reduction operator;
    compound updates of those variables with that operator are exempt.
    """
    if not isinstance(loop, N.For):
        return None
    reductions = reductions or {}
    try:
        accesses, reduced, wild = _affine_accesses(loop, reductions)
    except _NotAffine:
        return None
    for name in reduced:
        # Any other access to a reduction variable voids the exemption.
        if any(a[0] == name for a in accesses):
            return None
    by_array = defaultdict(list)
    for name, forms, is_write in accesses:
        by_array[name].append((forms, is_write))
    for name, accs in by_array.items():
        for w, is_write in accs:
            if not is_write:
                continue
            for other, _ in accs:
                if not _no_cross_overlap(w, other, wild):
                    return None
    return PARALLEL_WITH_REDUCTION if reduced else PARALLEL


# ------------------------------------------------------------------ verdicts


def _has_unknown(accesses):
    return any(r.has_unknown_index for ia in accesses for r in ia.triple.records())


def _filter(accesses, keep):
    out = []
    for ia in accesses:
        t = AccessRelationTriple(
            {r for r in ia.triple.read if keep(r)},
            {r for r in ia.triple.must_write if keep(r)},
            {r for r in ia.triple.may_write if keep(r)},
        )
        out.append(IterationAccess(ia.iteration, t, ia.instance))
    return out


def reduction_filter(accesses, reductions):
    """Drop records of reduction variables whose every access uses the declared operator.

    Returns ``(filtered accesses, names actually reduced)``.
    """
    reduced = set()
    for name, op in reductions.items():
        recs = [r for ia in accesses for r in ia.triple.records() if r.array == name]
        if recs and all(r.op == op for r in recs):
            reduced.add(name)
    if not reduced:
        return accesses, reduced
    return _filter(accesses, lambda r: r.array not in reduced), reduced


def independent_filter(accesses, labels):
    """Drop records of statements covered by an independent directive."""
    if not labels:
        return _filter(accesses, lambda r: False)
    covered = set(labels)
    return _filter(accesses, lambda r: not covered.intersection(r.labels))


def _directives(loop, directives):
    directives = loop.directives if directives is None else directives
    indep = next((d for d in directives if isinstance(d, N.Independent)), None)
    reds = [d for d in directives if isinstance(d, N.Reduction)]
    reductions = {}
    for d in reds:
        for name in d.names:
            reductions[name] = d.op
    return indep, reds, reductions


def analyze_while(loop, directives=None, loop_id="", function=""):
    directives = loop.directives if directives is None else directives
    if any(isinstance(d, N.Independent) for d in directives):
        return DependenceReport(loop_id, ASSUMED_PARALLEL, DIRECTIVE, loc=loop.loc, kind="while",
                                function=function)
    notes = ["while-loop iteration spaces are not enumerated"]
    if any(isinstance(d, N.Reduction) for d in directives):
        notes.append("reduction directives apply to for loops only")
    return DependenceReport(loop_id, UNKNOWN_VERDICT, None, loc=loop.loc, kind="while",
                            function=function, notes=notes)


def analyze_loop(loop, binding=None, directives=None, *, unit=None, function=None,
                 loop_id="", exact=False, budget=None):
    """Decide whether ``loop`` carries dependences.

    ``binding`` (a Binding, possibly empty) enables enumeration; it needs the
    enclosing ``unit`` and ``function``.  With ``exact=True`` an UNKNOWN
    verdict reached without any binding adds an E-BINDING-REQUIRED error.
    """
    fname = function.name if function is not None else ""
    if isinstance(loop, N.While):
        return analyze_while(loop, directives, loop_id, fname)
    indep, reds, reductions = _directives(loop, directives)
    red_list = [(d.op, list(d.names)) for d in reds]

    def report(verdict, basis, witnesses=(), notes=(), diags=()):
        used = red_list if verdict in (PARALLEL_WITH_REDUCTION, ASSUMED_PARALLEL) else []
        return DependenceReport(loop_id, verdict, basis, list(witnesses), used, loop.loc, "for",
                                fname, list(notes), list(diags))

    fast = affine_fast_path(loop, reductions)
    if fast is not None:
        if fast == PARALLEL_WITH_REDUCTION:
            return report(fast, AFFINE)
        return report(PARALLEL, AFFINE)

    notes = []
    diags = []
    if binding is not None and unit is not None and function is not None:
        accesses = None
        try:
            accesses = collect_iteration_accesses(loop, binding, unit, function, budget)
        except Unanalyzable as e:
            notes.append(f"enumeration stopped: {e}")
        except PencilError as e:
            notes.append(f"enumeration stopped: {e}")
            diags.append(Diagnostic(e.code, e.diagnostic.message, e.diagnostic.loc,
                                    e.diagnostic.severity, function=fname))
        if accesses is not None:
            if not accesses:
                notes.append("loop body does not execute under the binding")
            stage = accesses
            if not _has_unknown(stage):
                w = brute_force_dependences(stage, WITNESS_LIMIT)
                if not w:
                    return report(PARALLEL, ENUMERATION, notes=notes)
            stage, reduced = reduction_filter(stage, reductions)
            if reduced and not _has_unknown(stage):
                w = brute_force_dependences(stage, WITNESS_LIMIT)
                if not w:
                    return report(PARALLEL_WITH_REDUCTION, ENUMERATION, notes=notes)
            if indep is not None:
                stage = independent_filter(stage, indep.labels)
            if not _has_unknown(stage):
                w = brute_force_dependences(stage, WITNESS_LIMIT)
                if not w:
                    return report(ASSUMED_PARALLEL, DIRECTIVE, notes=notes)
                return report(SERIAL, ENUMERATION, w, notes=notes)
            notes.append("some accessed locations depend on data not in the binding")
    if indep is not None and not indep.labels:
        return report(ASSUMED_PARALLEL, DIRECTIVE, notes=notes, diags=diags)
    if exact and binding is None:
        diags.append(Diagnostic("E-BINDING-REQUIRED",
                                f"loop {loop_id} needs --param/--array bindings for an exact verdict",
                                loop.loc, function=fname))
    return report(UNKNOWN_VERDICT, None, notes=notes, diags=diags)


def analyze_function(unit, fn, binding=None, exact=False, budget=None):
    """Reports for every loop of ``fn`` in source order."""
    return [analyze_loop(loop, binding, unit=unit, function=fn, loop_id=lid, exact=exact,
                         budget=budget)
            for lid, loop in N.iter_loops(fn)]
