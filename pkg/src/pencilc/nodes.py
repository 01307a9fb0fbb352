"""AST for the PENCIL subset.

Nodes are plain dataclasses.  Source locations never take part in equality so
that a re-parsed pretty-print compares equal to the original tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import NOWHERE, Loc

SCALAR_TYPES = ("int", "float", "double")
RETURN_TYPES = ("void",) + SCALAR_TYPES
SUMMARY_MACROS = ("DEF", "USE", "MAY_DEF")
# Pure math externals callable without a definition.  rand() is value-unknown
# to the analyzer; the rest are side-effect free.
PURE_EXTERNALS = ("exp", "log", "sqrt", "fabs", "fmax", "fmin", "rand")
REDUCTION_OPS = ("+", "*", "max", "min")


def _loc():
    return field(default=NOWHERE, compare=False, repr=False)


# ---------------------------------------------------------------- expressions


@dataclass
class Num:
    text: str
    loc: Loc = _loc()

    @property
    def is_float(self):
        return any(c in self.text for c in ".eE") and not self.text.lower().startswith("0x")

    @property
    def value(self):
        if self.is_float:
            return float(self.text.rstrip("fF"))
        return int(self.text.rstrip("uUlL"), 0)


@dataclass
class Name:
    id: str
    loc: Loc = _loc()


@dataclass
class Index:
    base: str
    indices: list
    loc: Loc = _loc()


@dataclass
class Unary:
    op: str  # - + ! ~ * &
    operand: "Expr"
    loc: Loc = _loc()


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()


@dataclass
class Call:
    func: str
    args: list
    loc: Loc = _loc()


Expr = Union[Num, Name, Index, Unary, Binary, Call]


# ----------------------------------------------------------------- directives


@dataclass
class Independent:
    labels: list = field(default_factory=list)
    text: str = field(default="", compare=False, repr=False)
    loc: Loc = _loc()

    def render(self):
        if self.labels:
            return "#pragma pencil independent (" + ", ".join(self.labels) + ")"
        return "#pragma pencil independent"


@dataclass
class Reduction:
    op: str
    names: list
    text: str = field(default="", compare=False, repr=False)
    loc: Loc = _loc()

    def render(self):
        return f"#pragma pencil reduction ({self.op}:{', '.join(self.names)})"


Directive = Union[Independent, Reduction]


# ----------------------------------------------------------------- statements


@dataclass
class Decl:
    name: str
    ctype: str
    dims: list = field(default_factory=list)
    init: Optional[Expr] = None
    pointer: int = 0
    const: bool = False
    loc: Loc = _loc()


@dataclass
class Assign:
    target: Expr
    op: str  # = += -= *= /= %= ++ --
    value: Optional[Expr] = None
    loc: Loc = _loc()


@dataclass
class ExprStmt:
    expr: Expr
    loc: Loc = _loc()


@dataclass
class SummaryAccess:
    kind: str  # DEF | USE | MAY_DEF
    target: Expr
    spelling: str = ""
    loc: Loc = _loc()


@dataclass
class Block:
    stmts: list = field(default_factory=list)
    loc: Loc = _loc()


@dataclass
class For:
    """Counted loop normalized to ``var`` in ``[lower, upper)`` with step +1.

    ``bound``/``cmp`` keep the spelling of the condition; ``upper`` is the
    exclusive bound derived from them.
    """

    var: str
    lower: Expr
    cmp: str  # "<" or "<="
    bound: Expr
    body: "Stmt"
    decl_type: Optional[str] = None
    directives: list = field(default_factory=list)
    loc: Loc = _loc()

    @property
    def upper(self):
        if self.cmp == "<=":
            return Binary("+", self.bound, Num("1"))
        return self.bound


@dataclass
class While:
    cond: Expr
    body: "Stmt"
    directives: list = field(default_factory=list)
    loc: Loc = _loc()


@dataclass
class If:
    cond: Expr
    then: "Stmt"
    orelse: Optional["Stmt"] = None
    loc: Loc = _loc()


@dataclass
class Return:
    value: Optional[Expr] = None
    loc: Loc = _loc()


@dataclass
class Labeled:
    label: str
    stmt: "Stmt"
    loc: Loc = _loc()


@dataclass
class Goto:
    label: str
    loc: Loc = _loc()


@dataclass
class Empty:
    loc: Loc = _loc()


@dataclass
class PragmaStmt:
    """A pencil pragma line awaiting attachment to the statement after it."""

    text: str
    directive: Optional[Directive] = None
    loc: Loc = _loc()


Stmt = Union[Decl, Assign, ExprStmt, SummaryAccess, Block, For, While, If,
             Return, Labeled, Goto, Empty, PragmaStmt]
LOOPS = (For, While)


# ------------------------------------------------------------------ functions


@dataclass
class Param:
    """A function parameter.

    kind is ``scalar``, ``array``, ``pointer`` (scalar passed by pointer) or
    ``ptrarray`` (array of pointers, always non-compliant).
    """

    name: str
    ctype: str
    kind: str = "scalar"
    dims: list = field(default_factory=list)  # first entry may be None: a[]
    restrict: bool = False
    const: bool = False
    static: bool = False
    ptr_depth: int = 0
    ptr_const: bool = False
    ptr_restrict: bool = False
    loc: Loc = _loc()

    @property
    def qualified(self):
        return self.restrict and self.const and self.static


@dataclass
class AccessBinding:
    summary: str
    args: list
    loc: Loc = _loc()


@dataclass
class FunctionDef:
    name: str
    ret: str
    params: list
    body: Optional[Block]
    access: Optional[AccessBinding] = None
    loc: Loc = _loc()

    def param(self, name):
        for p in self.params:
            if p.name == name:
                return p
        return None


@dataclass
class TranslationUnit:
    functions: list
    file: str = field(default="<input>", compare=False)

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        return None

    @property
    def summary_names(self):
        return {f.access.summary for f in self.functions if f.access is not None}


# ------------------------------------------------------------------- walking


def child_stmts(stmt):
    if isinstance(stmt, Block):
        return list(stmt.stmts)
    if isinstance(stmt, (For, While)):
        return [stmt.body]
    if isinstance(stmt, If):
        return [stmt.then] + ([stmt.orelse] if stmt.orelse is not None else [])
    if isinstance(stmt, Labeled):
        return [stmt.stmt]
    return []


def walk_stmts(stmt):
    """Pre-order traversal of a statement tree."""
    stack = [stmt]
    while stack:
        s = stack.pop()
        if s is None:
            continue
        yield s
        stack.extend(reversed(child_stmts(s)))


def stmt_exprs(stmt):
    """Expressions directly owned by one statement (not its children)."""
    if isinstance(stmt, Decl):
        return list(stmt.dims) + ([stmt.init] if stmt.init is not None else [])
    if isinstance(stmt, Assign):
        return [stmt.target] + ([stmt.value] if stmt.value is not None else [])
    if isinstance(stmt, (ExprStmt,)):
        return [stmt.expr]
    if isinstance(stmt, SummaryAccess):
        return [stmt.target]
    if isinstance(stmt, For):
        return [stmt.lower, stmt.bound]
    if isinstance(stmt, (While, If)):
        return [stmt.cond]
    if isinstance(stmt, Return):
        return [stmt.value] if stmt.value is not None else []
    return []


def walk_expr(expr):
    stack = [expr]
    while stack:
        e = stack.pop()
        yield e
        if isinstance(e, Index):
            stack.extend(reversed(e.indices))
        elif isinstance(e, Unary):
            stack.append(e.operand)
        elif isinstance(e, Binary):
            stack.extend([e.right, e.left])
        elif isinstance(e, Call):
            stack.extend(reversed(e.args))


def iter_loops(fn):
    """Yield ``(loop_id, loop)`` for every loop of ``fn`` in source order."""
    if fn.body is None:
        return
    n = 0
    for s in walk_stmts(fn.body):
        if isinstance(s, LOOPS):
            yield f"{fn.name}.L{n}", s
            n += 1


def labels_in(stmt):
    return {s.label for s in walk_stmts(stmt) if isinstance(s, Labeled)}
