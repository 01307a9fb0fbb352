"""Canonical PENCIL pretty-printer.

The output re-parses to a structurally identical tree.  Subclasses hook
``loop_prologue`` to inject extra lines (e.g. OpenMP pragmas) before loops.
"""

from __future__ import annotations

from .. import nodes as N

_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "<<": 8, ">>": 8,
    "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}
_UNARY_PREC = 11
INDENT = "  "


def expr_to_str(e, parent_prec=0):
    if isinstance(e, N.Num):
        return e.text
    if isinstance(e, N.Name):
        return e.id
    if isinstance(e, N.Index):
        return e.base + "".join(f"[{expr_to_str(i)}]" for i in e.indices)
    if isinstance(e, N.Call):
        return f"{e.func}(" + ", ".join(expr_to_str(a) for a in e.args) + ")"
    if isinstance(e, N.Unary):
        inner = expr_to_str(e.operand, _UNARY_PREC)
        if isinstance(e.operand, N.Unary):
            inner = f"({inner})"
        text = e.op + inner
        return f"({text})" if parent_prec > _UNARY_PREC else text
    if isinstance(e, N.Binary):
        prec = _PREC[e.op]
        left = expr_to_str(e.left, prec)
        # Left-associative: an equal-precedence right operand needs parentheses.
        right = expr_to_str(e.right, prec + 1)
        text = f"{left} {e.op} {right}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"not an expression: {e!r}")


def param_to_str(p):
    const = "const " if p.const and p.kind != "array" else ""
    if p.kind == "scalar":
        return f"{const}{p.ctype} {p.name}"
    if p.kind == "pointer":
        stars = "*" * p.ptr_depth
        quals = "".join(q for q, on in ((" const", p.ptr_const), (" restrict", p.ptr_restrict)) if on)
        return f"{const}{p.ctype} {stars}{quals} {p.name}"
    dims = "".join(f"[{expr_to_str(d)}]" if d is not None else "[]" for d in p.dims)
    if p.kind == "ptrarray":
        return f"{const}{p.ctype} {'*' * p.ptr_depth}({p.name}{dims})"
    quals = [q for q, on in (("restrict", p.restrict), ("const", p.const), ("static", p.static))
             if on]
    first = p.dims[0] if p.dims else None
    head = " ".join(quals + ([expr_to_str(first)] if first is not None else []))
    rest = "".join(f"[{expr_to_str(d)}]" for d in p.dims[1:])
    return f"{p.ctype} {p.name}[{head}]{rest}"


class Printer:
    def __init__(self):
        self.lines = []

    def emit(self, depth, text):
        self.lines.append(INDENT * depth + text)

    # hooks -------------------------------------------------------------

    def loop_prologue(self, loop, depth):
        for d in loop.directives:
            self.emit(depth, d.text or d.render())

    # units -------------------------------------------------------------

    def unit(self, unit):
        chunks = []
        for fn in unit.functions:
            self.lines = []
            self.function(fn)
            chunks.append("\n".join(self.lines) + "\n")
        return "\n".join(chunks)

    def signature(self, fn):
        params = ", ".join(param_to_str(p) for p in fn.params) if fn.params else "void"
        return f"{fn.ret} {fn.name}({params})"

    def function(self, fn):
        sig = self.signature(fn)
        if fn.access is not None:
            args = ", ".join(expr_to_str(a) for a in fn.access.args)
            access = f"ACCESS({fn.access.summary}({args}))"
            if fn.body is None:
                self.emit(0, sig)
                self.emit(2, access + ";")
                return
            self.emit(0, sig)
            self.emit(2, access)
        elif fn.body is None:
            self.emit(0, sig + ";")
            return
        else:
            self.emit(0, sig)
        self.emit(0, "{")
        for s in fn.body.stmts:
            self.stmt(s, 1)
        self.emit(0, "}")

    # statements --------------------------------------------------------

    def simple(self, s):
        """Text of a statement that fits on one line, else None."""
        if isinstance(s, N.Decl):
            const = "const " if s.const else ""
            dims = "".join(f"[{expr_to_str(d)}]" for d in s.dims)
            init = f" = {expr_to_str(s.init)}" if s.init is not None else ""
            return f"{const}{s.ctype} {'*' * s.pointer}{s.name}{dims}{init};"
        if isinstance(s, N.Assign):
            target = expr_to_str(s.target)
            if s.op in ("++", "--"):
                return f"{target}{s.op};"
            return f"{target} {s.op} {expr_to_str(s.value)};"
        if isinstance(s, N.ExprStmt):
            return expr_to_str(s.expr) + ";"
        if isinstance(s, N.SummaryAccess):
            return f"{s.spelling or s.kind}({expr_to_str(s.target)});"
        if isinstance(s, N.Return):
            return "return;" if s.value is None else f"return {expr_to_str(s.value)};"
        if isinstance(s, N.Goto):
            return f"goto {s.label};"
        if isinstance(s, N.Empty):
            return ";"
        return None

    def stmt(self, s, depth, prologue=True):
        line = self.simple(s)
        if line is not None:
            self.emit(depth, line)
        elif isinstance(s, N.PragmaStmt):
            self.emit(depth, s.text)
        elif isinstance(s, N.Block):
            self.emit(depth, "{")
            for c in s.stmts:
                self.stmt(c, depth + 1)
            self.emit(depth, "}")
        elif isinstance(s, N.Labeled):
            target = s.stmt
            while isinstance(target, N.Labeled):
                target = target.stmt
            if prologue and isinstance(target, N.LOOPS):
                # Pragmas must precede the label to re-attach through it.
                self.loop_prologue(target, depth)
            inner = self.simple(s.stmt)
            if inner is not None:
                self.emit(depth, f"{s.label}: {inner}")
            else:
                self.emit(depth, f"{s.label}:")
                self.stmt(s.stmt, depth, prologue=False)
        elif isinstance(s, N.For):
            if prologue:
                self.loop_prologue(s, depth)
            decl = f"{s.decl_type} " if s.decl_type else ""
            head = (f"for ({decl}{s.var} = {expr_to_str(s.lower)}; "
                    f"{s.var} {s.cmp} {expr_to_str(s.bound)}; {s.var}++)")
            self.body(head, s.body, depth)
        elif isinstance(s, N.While):
            if prologue:
                self.loop_prologue(s, depth)
            self.body(f"while ({expr_to_str(s.cond)})", s.body, depth)
        elif isinstance(s, N.If):
            self.body(f"if ({expr_to_str(s.cond)})", s.then, depth)
            if s.orelse is not None:
                if isinstance(s.orelse, N.If):
                    # Keep `else if` flat; the nested If prints its own header.
                    self.lines.append(INDENT * depth + "else")
                    self.stmt(s.orelse, depth + 1)
                else:
                    self.body("else", s.orelse, depth)
        else:
            raise TypeError(f"cannot print {type(s).__name__}")

    def body(self, head, body, depth):
        if isinstance(body, N.Block):
            self.emit(depth, head + " {")
            for c in body.stmts:
                self.stmt(c, depth + 1)
            self.emit(depth, "}")
        else:
            self.emit(depth, head)
            self.stmt(body, depth + 1)


def pretty_print(unit):
    """Render a TranslationUnit (or a single FunctionDef) as PENCIL source."""
    if isinstance(unit, N.FunctionDef):
        unit = N.TranslationUnit([unit])
    return Printer().unit(unit)
