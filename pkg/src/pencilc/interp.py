"""Tree-walking executor for PENCIL with C value semantics.

One engine serves three clients:

* concrete execution (reference runs, DSL oracles): every value is known;
* loop analysis: array contents and scalars may be UNKNOWN, branches on
  UNKNOWN conditions are explored both ways and their states joined;
* summary interpretation (``summary_depth > 0``): DEF/USE/MAY_DEF emit
  access records and any UNKNOWN control value is an E-NONAFFINE error.

Array and scalar accesses are reported to an optional recorder.
"""

from __future__ import annotations

import itertools
import math
import os
import struct
from dataclasses import dataclass, field

from . import nodes as N
from .diagnostics import PencilError

DEFAULT_BUDGET = 1_000_000


def default_budget():
    value = os.environ.get("PENCILC_BUDGET")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return DEFAULT_BUDGET


class _Unknown:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "UNKNOWN"

    def __reduce__(self):
        return (_Unknown, ())


UNKNOWN = _Unknown()


def is_unknown(v):
    return v is UNKNOWN


class Unanalyzable(Exception):
    """The executor cannot follow this program without concrete data."""


class ExecError(Exception):
    """A concrete run hit undefined or unsupported behaviour."""


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


_uids = itertools.count()


class Cell:
    __slots__ = ("name", "ctype", "value", "uid")

    def __init__(self, name, ctype, value=UNKNOWN):
        self.name = name
        self.ctype = ctype
        self.value = value
        self.uid = next(_uids)

    def __repr__(self):
        return f"Cell({self.name}={self.value!r})"


class ArrayStore:
    """Array storage.  ``initial`` is None when unwritten elements are unknown."""

    __slots__ = ("name", "ctype", "extents", "data", "initial", "uid")

    def __init__(self, name, ctype, extents, initial=None):
        self.name = name
        self.ctype = ctype
        self.extents = tuple(extents)
        self.data = {}
        self.initial = initial
        self.uid = next(_uids)

    def get(self, idx, concrete):
        if idx in self.data:
            return self.data[idx]
        if self.initial is not None:
            if idx in self.initial:
                return self.initial[idx]
            if concrete:
                raise ExecError(f"read of {self.name}{list(idx)} outside its data")
            return UNKNOWN
        if concrete:
            raise ExecError(f"read of uninitialised {self.name}{list(idx)}")
        return UNKNOWN

    def put(self, idx, value):
        if any(is_unknown(i) for i in idx):
            # Any element may have changed.
            self.data.clear()
            self.initial = None
            return
        self.data[idx] = value

    def values(self):
        """Row-major flat list of the current contents (concrete arrays)."""
        keys = sorted(set(self.data) | set(self.initial or ()))
        return [self.data[k] if k in self.data else self.initial[k] for k in keys]

    def __repr__(self):
        return f"ArrayStore({self.name}, extents={self.extents})"


@dataclass
class Ptr:
    cell: Cell


def flat_to_dict(values, extents):
    """Map a row-major flat list onto index tuples for the given extents."""
    if extents and all(isinstance(e, int) for e in extents) and len(extents) > 1:
        total = math.prod(extents)
        if total != len(values):
            raise ExecError(f"array data has {len(values)} values, extents need {total}")
        out = {}
        for flat, v in enumerate(values):
            idx = []
            rem = flat
            for e in reversed(extents):
                idx.append(rem % e)
                rem //= e
            out[tuple(reversed(idx))] = v
        return out
    return {(k,): v for k, v in enumerate(values)}


def convert(ctype, value):
    """Apply C assignment conversion for a scalar of ``ctype``."""
    if is_unknown(value):
        return value
    if ctype == "int":
        if isinstance(value, float):
            if math.isnan(value) or math.isinf(value):
                raise ExecError("float to int conversion of a non-finite value")
            return int(value)  # truncates toward zero like C
        return int(value)
    if ctype == "float":
        return struct.unpack("f", struct.pack("f", float(value)))[0]
    return float(value)


def c_div(a, b):
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def c_mod(a, b):
    return a - b * c_div(a, b)


_PURE = {
    "exp": math.exp, "log": math.log, "sqrt": math.sqrt, "fabs": math.fabs,
    "fmax": lambda a, b: float(max(a, b)), "fmin": lambda a, b: float(min(a, b)),
}


@dataclass
class Binding:
    """Concrete values for a function's parameters.

    ``scalars`` maps names to numbers; ``arrays`` maps names to flat row-major
    value lists.  Unlisted parameters are UNKNOWN to the analyzer.
    """

    scalars: dict = field(default_factory=dict)
    arrays: dict = field(default_factory=dict)

    def key(self):
        return (tuple(sorted(self.scalars.items())),
                tuple(sorted((k, tuple(v)) for k, v in self.arrays.items())))


class Executor:
    def __init__(self, unit, concrete=True, recorder=None, rand=None, budget=None,
                 target_loop=None):
        self.unit = unit
        self.functions = {f.name: f for f in unit.functions}
        self.summaries = unit.summary_names
        self.concrete = concrete
        self.recorder = recorder
        self.rand = iter(rand) if rand is not None else None
        self.budget = default_budget() if budget is None else budget
        self.work = 0
        self.scopes = []
        self.stores = []
        self.may_depth = 0
        self.summary_depth = 0
        self.summary_base = 0
        self.iter_stack = []
        self.target_loop = target_loop
        self.label_stack = []

    # ---------------------------------------------------------- plumbing

    def tick(self, n=1):
        self.work += n
        if self.work > self.budget:
            raise PencilError("E-BUDGET", f"enumeration exceeded the cap of {self.budget} steps")

    def unknown_control(self, what, node):
        if self.summary_depth:
            raise PencilError("E-NONAFFINE", f"{what} depends on unknown data",
                              getattr(node, "loc", None) or N.NOWHERE)
        if self.concrete:
            raise ExecError(f"{what} is unknown in a concrete run")
        raise Unanalyzable(f"{what} depends on unknown data")

    def new_cell(self, name, ctype, value=UNKNOWN):
        c = Cell(name, ctype, convert(ctype, value))
        self.stores.append(c)
        self.scopes[-1][name] = c
        return c

    def new_array(self, name, ctype, extents, initial=None):
        a = ArrayStore(name, ctype, extents, initial)
        self.stores.append(a)
        self.scopes[-1][name] = a
        return a

    def lookup(self, name, node=None):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise ExecError(f"unknown variable '{name}'")

    def snapshot(self):
        snap = {}
        for s in self.stores:
            if isinstance(s, Cell):
                snap[s.uid] = (s, s.value)
            else:
                snap[s.uid] = (s, dict(s.data), s.initial)
        return snap

    def restore(self, snap):
        for entry in snap.values():
            s = entry[0]
            if isinstance(s, Cell):
                s.value = entry[1]
            else:
                s.data = dict(entry[1])
                s.initial = entry[2]

    def join(self, other):
        """Merge state ``other`` into the current state; disagreements become UNKNOWN."""
        for entry in other.values():
            s = entry[0]
            if isinstance(s, Cell):
                if s.value != entry[1] or type(s.value) is not type(entry[1]):
                    s.value = UNKNOWN
                continue
            o_data, o_init = entry[1], entry[2]
            if s.initial is not o_init:
                merged_init = None
                if s.initial is not None and o_init is not None:
                    merged_init = {k: v for k, v in s.initial.items()
                                   if o_init.get(k, UNKNOWN) == v}
                s.initial = merged_init
            for k in set(s.data) | set(o_data):
                mine = s.data.get(k, UNKNOWN)
                theirs = o_data.get(k, UNKNOWN)
                if mine is UNKNOWN or theirs is UNKNOWN or mine != theirs:
                    s.data[k] = UNKNOWN

    # ---------------------------------------------------------- recording

    def _rec_read(self, store, idx, tag=None):
        if self.recorder is not None:
            self.recorder.read(self, store, idx, tag)

    def _rec_write(self, store, idx, tag=None, may=False):
        if self.recorder is not None:
            self.recorder.write(self, store, idx, tag, may or self.may_depth > 0)

    # ---------------------------------------------------------- functions

    def run_function(self, fn, binding=None):
        """Run ``fn`` with parameters taken from ``binding``.

        Returns ``(return value, {param name: storage})``.
        """
        binding = binding or Binding()
        if fn.body is None:
            raise ExecError(f"function '{fn.name}' has no body")
        self.scopes = [{}]
        frame = {}
        for p in fn.params:
            if p.kind == "scalar":
                if p.name in binding.scalars:
                    value = binding.scalars[p.name]
                elif self.concrete:
                    raise ExecError(f"no value bound for scalar parameter '{p.name}'")
                else:
                    value = UNKNOWN
                frame[p.name] = self.new_cell(p.name, p.ctype, value)
            elif p.kind == "pointer":
                value = binding.scalars.get(p.name, UNKNOWN if not self.concrete else 0)
                cell = Cell(p.name, p.ctype, convert(p.ctype, value))
                self.stores.append(cell)
                self.scopes[-1][p.name] = Ptr(cell)
                frame[p.name] = cell
            else:
                extents = self.extents(p.dims)
                initial = None
                if p.name in binding.arrays:
                    initial = flat_to_dict([convert(p.ctype, v) for v in binding.arrays[p.name]],
                                           extents)
                elif self.concrete:
                    if not extents or not all(isinstance(e, int) for e in extents):
                        raise ExecError(f"no data bound for array parameter '{p.name}'")
                    initial = flat_to_dict([convert(p.ctype, 0)] * math.prod(extents), extents)
                frame[p.name] = self.new_array(p.name, p.ctype, extents, initial)
        value = self.exec_body(fn)
        return value, frame

    def extents(self, dims):
        out = []
        for d in dims:
            if d is None:
                out.append(None)
                continue
            v = self.eval(d)
            out.append(v if isinstance(v, int) else None)
        return out

    def exec_body(self, fn):
        try:
            self.block(fn.body.stmts)
        except _ReturnSignal as r:
            return r.value
        return None

    def call_function(self, fn, args, node):
        callee_scope = {}
        for p, a in zip(fn.params, args):
            if p.kind == "scalar":
                c = Cell(p.name, p.ctype, convert(p.ctype, self.eval(a)))
                self.stores.append(c)
                callee_scope[p.name] = c
            elif p.kind == "pointer":
                if isinstance(a, N.Unary) and a.op == "&" and isinstance(a.operand, N.Name):
                    target = self.lookup(a.operand.id)
                    if not isinstance(target, Cell):
                        raise ExecError(f"'&{a.operand.id}' does not name a scalar")
                    callee_scope[p.name] = Ptr(target)
                elif isinstance(a, N.Name) and isinstance(self.lookup(a.id), Ptr):
                    callee_scope[p.name] = self.lookup(a.id)
                else:
                    raise ExecError(f"argument for pointer parameter '{p.name}' must be '&var'")
            else:
                if not isinstance(a, N.Name):
                    raise ExecError(f"argument for array parameter '{p.name}' must be an array name")
                store = self.lookup(a.id)
                if not isinstance(store, ArrayStore):
                    raise ExecError(f"'{a.id}' is not an array")
                callee_scope[p.name] = store
        saved_scopes = self.scopes
        self.scopes = [callee_scope]
        try:
            return self.exec_body(fn)
        finally:
            self.scopes = saved_scopes

    def call_summary(self, fn, summary, args, node):
        """Apply a summarized callee's accesses instead of running its body."""
        if self.summary_depth:
            raise PencilError("E-NESTED-SUMMARY",
                              f"summary calls summarized function '{fn.name}'", node.loc)
        mapping = dict(zip([p.name for p in fn.params], args))
        sub_args = [substitute(a, mapping) for a in fn.access.args]
        saved_base = self.summary_base
        self.summary_depth += 1
        self.summary_base = len(self.iter_stack)
        try:
            self.call_function(summary, sub_args, node)
        finally:
            self.summary_depth -= 1
            self.summary_base = saved_base
        return UNKNOWN if fn.ret != "void" else None

    # ---------------------------------------------------------- statements

    def block(self, stmts, loop=None):
        self.scopes.append({})
        try:
            for k, s in enumerate(stmts):
                if loop is not None:
                    self.recorder.statement(k, _label_of(s))
                self.stmt(s)
        finally:
            self.scopes.pop()

    def stmt(self, s):
        if isinstance(s, N.Assign):
            self.assign(s)
        elif isinstance(s, N.Decl):
            self.decl(s)
        elif isinstance(s, N.ExprStmt):
            self.eval(s.expr)
        elif isinstance(s, N.Block):
            self.block(s.stmts)
        elif isinstance(s, N.For):
            self.for_loop(s)
        elif isinstance(s, N.While):
            self.while_loop(s)
        elif isinstance(s, N.If):
            self.if_stmt(s)
        elif isinstance(s, N.SummaryAccess):
            self.summary_access(s)
        elif isinstance(s, N.Return):
            value = self.eval(s.value) if s.value is not None else None
            if self.may_depth and not self.concrete:
                raise Unanalyzable("return under an unknown condition")
            raise _ReturnSignal(value)
        elif isinstance(s, N.Labeled):
            self.label_stack.append(s.label)
            try:
                self.stmt(s.stmt)
            finally:
                self.label_stack.pop()
        elif isinstance(s, (N.Empty, N.PragmaStmt)):
            pass
        elif isinstance(s, N.Goto):
            if self.concrete:
                raise ExecError("goto is not executable")
            raise Unanalyzable("goto")
        else:
            raise ExecError(f"unsupported statement {type(s).__name__}")

    def decl(self, s):
        if s.pointer:
            raise ExecError(f"local pointer '{s.name}' is not executable")
        if s.dims:
            extents = self.extents(s.dims)
            if not all(isinstance(e, int) for e in extents):
                self.unknown_control(f"extent of local array '{s.name}'", s)
            initial = None
            if self.concrete:
                initial = {}
            self.new_array(s.name, s.ctype, extents, initial)
            return
        value = self.eval(s.init) if s.init is not None else (UNKNOWN if not self.concrete else 0)
        c = self.new_cell(s.name, s.ctype, value)
        if s.init is not None:
            self._rec_write(c, ())

    def if_stmt(self, s):
        cond = self.eval(s.cond)
        if not is_unknown(cond):
            if cond:
                self.stmt(s.then)
            elif s.orelse is not None:
                self.stmt(s.orelse)
            return
        if self.summary_depth or self.concrete:
            self.unknown_control("if condition", s)
        before = self.snapshot()
        self.may_depth += 1
        try:
            self.stmt(s.then)
            after_then = self.snapshot()
            self.restore(before)
            if s.orelse is not None:
                self.stmt(s.orelse)
            self.join(after_then)
        finally:
            self.may_depth -= 1

    def for_loop(self, s):
        self.scopes.append({})
        try:
            if s.decl_type:
                counter = self.new_cell(s.var, s.decl_type)
            else:
                counter = self.lookup(s.var)
                if not isinstance(counter, Cell):
                    raise ExecError(f"loop counter '{s.var}' is not a scalar")
            is_target = s is self.target_loop and self.recorder is not None
            counter.value = convert(counter.ctype, self.eval(s.lower))
            if is_target:
                self.recorder.begin_instance(self, counter)
            else:
                self._rec_write(counter, ())
            while True:
                bound = self.eval(s.bound)
                cur = counter.value
                if not is_target:
                    self._rec_read(counter, ())
                if is_unknown(bound) or is_unknown(cur):
                    self.unknown_control("loop bound", s)
                if not (cur < bound if s.cmp == "<" else cur <= bound):
                    break
                self.tick()
                self.iter_stack.append(cur)
                try:
                    if is_target:
                        self.recorder.begin_iteration(cur)
                        body = s.body.stmts if isinstance(s.body, N.Block) else [s.body]
                        self.block(body, loop=s)
                    else:
                        self.stmt(s.body)
                finally:
                    self.iter_stack.pop()
                if is_unknown(counter.value):
                    self.unknown_control("loop counter", s)
                counter.value = convert(counter.ctype, counter.value + 1)
                if not is_target:
                    self._rec_read(counter, ())
                    self._rec_write(counter, ())
            if is_target:
                self.recorder.end_instance()
        finally:
            self.scopes.pop()

    def while_loop(self, s):
        while True:
            cond = self.eval(s.cond)
            if is_unknown(cond):
                self.unknown_control("while condition", s)
            if not cond:
                return
            self.tick()
            self.stmt(s.body)

    def summary_access(self, s):
        if not self.summary_depth:
            # Outside summaries the macros only evaluate their operand.
            return
        store, idx = self.locate(s.target)
        if any(is_unknown(i) for i in idx):
            self.unknown_control(f"index of {s.kind}", s)
        if self.recorder is not None:
            iters = tuple(self.iter_stack[self.summary_base:])
            self.recorder.summary(self, s.kind, store, idx, iters, self.may_depth > 0)
        if s.kind != "USE" and isinstance(store, ArrayStore):
            store.put(idx, UNKNOWN)
        elif s.kind != "USE":
            store.value = UNKNOWN

    # ---------------------------------------------------------- assignment

    def locate(self, target):
        """Resolve an lvalue to (storage, index tuple)."""
        if isinstance(target, N.Name):
            ref = self.lookup(target.id)
            if isinstance(ref, Ptr):
                raise ExecError(f"assignment to pointer '{target.id}'")
            if isinstance(ref, ArrayStore):
                if self.summary_depth:
                    return ref, ()
                raise ExecError(f"array '{target.id}' used as a scalar")
            return ref, ()
        if isinstance(target, N.Index):
            store = self.lookup(target.base)
            if not isinstance(store, ArrayStore):
                raise ExecError(f"'{target.base}' is not an array")
            idx = tuple(self.eval(i) for i in target.indices)
            idx = tuple(i if is_unknown(i) else int(i) for i in idx)
            return store, idx
        if isinstance(target, N.Unary) and target.op == "*" and isinstance(target.operand, N.Name):
            ref = self.lookup(target.operand.id)
            if not isinstance(ref, Ptr):
                raise ExecError(f"dereference of non-pointer '{target.operand.id}'")
            return ref.cell, ()
        raise ExecError("unsupported assignment target")

    def load(self, store, idx, tag=None):
        self._rec_read(store, idx, tag)
        if isinstance(store, Cell):
            if self.concrete and is_unknown(store.value):
                raise ExecError(f"read of uninitialised '{store.name}'")
            return store.value
        if any(is_unknown(i) for i in idx):
            if self.concrete:
                raise ExecError("unknown index in a concrete run")
            return UNKNOWN
        return store.get(idx, self.concrete)

    def store_value(self, store, idx, value, tag=None):
        self._rec_write(store, idx, tag)
        if isinstance(store, Cell):
            store.value = convert(store.ctype, value)
            return
        if self.concrete:
            n = len(store.extents)
            if len(idx) != n:
                raise ExecError(f"{store.name} indexed with {len(idx)} subscripts, has {n}")
        store.put(idx, convert(store.ctype, value))

    def assign(self, s):
        op = s.op
        if op == "=":
            tag = _minmax_tag(s)
            if tag is not None:
                store, idx = self.locate(s.target)
                other = self.eval(s.value.args[1])
                cur = self.load(store, idx, tag)
                value = self.apply_call(s.value.func, [cur, other], s.value)
                self.store_value(store, idx, value, tag)
                return
            value = self.eval(s.value)
            store, idx = self.locate(s.target)
            self.store_value(store, idx, value)
            return
        if op in ("++", "--"):
            rhs, binop = 1, "+" if op == "++" else "-"
        else:
            rhs, binop = self.eval(s.value), op[0]
        store, idx = self.locate(s.target)
        tag = binop if binop in ("+", "*") else None
        cur = self.load(store, idx, tag)
        self.store_value(store, idx, self.binop(binop, cur, rhs, s), tag)

    # ---------------------------------------------------------- expressions

    def eval(self, e):
        if isinstance(e, N.Num):
            return e.value
        if isinstance(e, N.Name):
            ref = self.lookup(e.id)
            if isinstance(ref, Cell):
                return self.load(ref, ())
            if isinstance(ref, Ptr):
                raise ExecError(f"pointer '{e.id}' used as a value")
            raise ExecError(f"array '{e.id}' used as a value")
        if isinstance(e, N.Index):
            store, idx = self.locate(e)
            return self.load(store, idx)
        if isinstance(e, N.Binary):
            if e.op in ("&&", "||"):
                left = self.eval(e.left)
                if not is_unknown(left):
                    if (e.op == "&&") != bool(left):
                        return int(bool(left))
                    right = self.eval(e.right)
                    return UNKNOWN if is_unknown(right) else int(bool(right))
                right = self.eval(e.right)
                if not is_unknown(right) and (e.op == "&&") != bool(right):
                    return int(bool(right))
                return UNKNOWN
            return self.binop(e.op, self.eval(e.left), self.eval(e.right), e)
        if isinstance(e, N.Unary):
            if e.op == "*":
                if isinstance(e.operand, N.Name):
                    ref = self.lookup(e.operand.id)
                    if isinstance(ref, Ptr):
                        return self.load(ref.cell, ())
                raise ExecError("dereference of a non-pointer")
            if e.op == "&":
                raise ExecError("address-of outside a pointer argument")
            v = self.eval(e.operand)
            if is_unknown(v):
                return UNKNOWN
            if e.op == "-":
                return -v
            if e.op == "+":
                return v
            if e.op == "!":
                return int(not v)
            if e.op == "~":
                return ~int(v)
        if isinstance(e, N.Call):
            return self.call(e)
        raise ExecError(f"cannot evaluate {type(e).__name__}")

    def binop(self, op, a, b, node):
        if is_unknown(a) or is_unknown(b):
            return UNKNOWN
        both_int = isinstance(a, int) and isinstance(b, int)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op in ("/", "%"):
            if b == 0:
                if self.concrete:
                    raise ExecError("division by zero")
                return UNKNOWN
            if op == "%":
                if not both_int:
                    raise ExecError("'%' on floating-point operands")
                return c_mod(a, b)
            return c_div(a, b) if both_int else a / b
        if op == "<":
            return int(a < b)
        if op == ">":
            return int(a > b)
        if op == "<=":
            return int(a <= b)
        if op == ">=":
            return int(a >= b)
        if op == "==":
            return int(a == b)
        if op == "!=":
            return int(a != b)
        if not both_int:
            raise ExecError(f"'{op}' on floating-point operands")
        if op == "<<":
            return a << b
        if op == ">>":
            return a >> b
        if op == "&":
            return a & b
        if op == "|":
            return a | b
        if op == "^":
            return a ^ b
        raise ExecError(f"unsupported operator {op}")

    def call(self, e):
        fn = self.functions.get(e.func)
        if fn is None:
            if e.func == "rand":
                if self.concrete:
                    if self.rand is None:
                        raise ExecError("rand() called without a stub sequence")
                    try:
                        return int(next(self.rand))
                    except StopIteration:
                        raise ExecError("rand() stub sequence exhausted") from None
                return UNKNOWN
            if e.func in _PURE:
                return self.apply_call(e.func, [self.eval(a) for a in e.args], e)
            if e.func in N.SUMMARY_MACROS:
                return None
            raise PencilError("E-UNDEF", f"call to undefined function '{e.func}'", e.loc)
        if fn.access is not None and (not self.concrete or fn.body is None):
            summary = self.functions.get(fn.access.summary)
            if summary is None or summary.body is None:
                raise PencilError("E-SUMMARY-UNDEF",
                                  f"summary '{fn.access.summary}' of '{fn.name}' is missing", e.loc)
            if self.concrete:
                raise ExecError(f"'{fn.name}' has only a summary and cannot run concretely")
            return self.call_summary(fn, summary, e.args, e)
        if self.summary_depth and fn.name in self.summaries:
            raise PencilError("E-NESTED-SUMMARY", f"summary calls summary '{fn.name}'", e.loc)
        if fn.body is None:
            raise PencilError("E-NO-SUMMARY",
                              f"'{fn.name}' has neither a body nor an access summary", e.loc)
        self.tick()
        return self.call_function(fn, e.args, e)

    def apply_call(self, name, args, node):
        if any(is_unknown(a) for a in args):
            return UNKNOWN
        try:
            return _PURE[name](*args)
        except (ValueError, OverflowError):
            if self.concrete:
                raise ExecError(f"domain error in {name}") from None
            return UNKNOWN


def _label_of(s):
    return s.label if isinstance(s, N.Labeled) else None


def _minmax_tag(s):
    """'max'/'min' when s is ``x = fmax(x, e)`` / ``x = fmin(x, e)``."""
    v = s.value
    if (isinstance(v, N.Call) and v.func in ("fmax", "fmin") and len(v.args) == 2
            and v.args[0] == s.target):
        return "max" if v.func == "fmax" else "min"
    return None


def substitute(expr, mapping):
    """Replace Name nodes according to ``mapping`` (name -> expression)."""
    if isinstance(expr, N.Name):
        return mapping.get(expr.id, expr)
    if isinstance(expr, N.Index):
        base = mapping.get(expr.base)
        base_name = base.id if isinstance(base, N.Name) else expr.base
        return N.Index(base_name, [substitute(i, mapping) for i in expr.indices], loc=expr.loc)
    if isinstance(expr, N.Unary):
        return N.Unary(expr.op, substitute(expr.operand, mapping), loc=expr.loc)
    if isinstance(expr, N.Binary):
        return N.Binary(expr.op, substitute(expr.left, mapping), substitute(expr.right, mapping),
                        loc=expr.loc)
    if isinstance(expr, N.Call):
        return N.Call(expr.func, [substitute(a, mapping) for a in expr.args], loc=expr.loc)
    return expr


def run_concrete(unit, entry, binding, rand=None, budget=None):
    """Execute ``entry`` concretely; returns (return value, {param: final value})."""
    ex = Executor(unit, concrete=True, rand=rand, budget=budget)
    value, frame = ex.run_function(unit.function(entry), binding)
    out = {}
    for name, store in frame.items():
        out[name] = store.values() if isinstance(store, ArrayStore) else store.value
    return value, out


def concrete_extents(unit, fn, binding):
    """{array param: extent tuple} with every extent evaluated under ``binding``."""
    ex = Executor(unit, concrete=True)
    ex.scopes = [{}]
    out = {}
    for p in fn.params:
        if p.kind == "scalar":
            ex.new_cell(p.name, p.ctype, binding.scalars.get(p.name, 0))
        elif p.kind in ("array", "ptrarray"):
            extents = tuple(ex.extents(p.dims))
            if p.name in binding.arrays and len(extents) == 1 and extents[0] is None:
                extents = (len(binding.arrays[p.name]),)
            out[p.name] = extents
    return out
