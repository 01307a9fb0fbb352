"""Recursive-descent parser for the PENCIL subset of C99.

The parser collects every syntax error it can find, resynchronising at
statement boundaries, and returns either a TranslationUnit or a list of
diagnostics.  ``#pragma pencil`` lines become placeholder statements which
attach_directives later binds to the loop that follows them.
"""

from __future__ import annotations

import copy
import re

from . import nodes as N
from .diagnostics import Diagnostic, DiagnosticSink, LexError, Loc, PencilError
from .lexer import EOF, FLOAT, HASH, IDENT, INT, KEYWORD, PRAGMA, PUNCT, STRING, Token, tokenize

_UNSUPPORTED_KEYWORDS = {
    "switch": "switch statements", "do": "do-while loops", "case": "switch statements",
    "default": "switch statements", "break": "break", "continue": "continue",
    "struct": "structs", "union": "unions", "enum": "enums", "typedef": "typedefs",
    "sizeof": "sizeof", "char": "char types", "short": "short types", "long": "long types",
    "unsigned": "unsigned types", "signed": "signed types", "extern": "extern",
    "inline": "inline", "volatile": "volatile", "register": "register", "auto": "auto",
}
_TYPE_WORDS = ("int", "float", "double", "void")
_ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=", "%=")
_BINARY_PRECEDENCE = [
    ("||",), ("&&",), ("|",), ("^",), ("&",), ("==", "!="),
    ("<", ">", "<=", ">="), ("<<", ">>"), ("+", "-"), ("*", "/", "%"),
]


class _SyntaxError(Exception):
    def __init__(self, message, loc):
        super().__init__(message)
        self.message = message
        self.loc = loc


class _Parser:
    def __init__(self, tokens, filename):
        self.filename = filename
        last = tokens[-1].loc if tokens else Loc(filename, 1, 1)
        self.toks = list(tokens) + [Token(EOF, "", last)]
        self.pos = 0
        self.sink = DiagnosticSink()

    # ------------------------------------------------------------ utilities

    @property
    def tok(self):
        return self.toks[self.pos]

    def peek(self, k=1):
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self):
        t = self.toks[self.pos]
        if t.kind != EOF:
            self.pos += 1
        return t

    def at(self, text):
        return self.tok.is_(text)

    def accept(self, text):
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected '{text}' but found {self.describe(self.tok)}")
        return self.advance()

    def expect_ident(self):
        if self.tok.kind != IDENT:
            self.fail(f"expected identifier but found {self.describe(self.tok)}")
        return self.advance()

    def fail(self, message, tok=None):
        tok = tok or self.tok
        raise _SyntaxError(message, tok.loc)

    @staticmethod
    def describe(tok):
        if tok.kind == EOF:
            return "end of input"
        return f"'{tok.text}'"

    def check_keyword(self):
        t = self.tok
        if t.kind == KEYWORD and t.text in _UNSUPPORTED_KEYWORDS:
            self.fail(f"{_UNSUPPORTED_KEYWORDS[t.text]} are outside the PENCIL subset"
                      if t.text not in ("break", "continue", "sizeof", "inline", "auto", "extern",
                                        "register", "volatile")
                      else f"'{t.text}' is outside the PENCIL subset")

    def skip_balanced(self):
        """Skip to just past the next ';' or to the '}' closing this level."""
        depth = 0
        while self.tok.kind != EOF:
            t = self.tok
            if t.is_("{") or t.is_("(") or t.is_("["):
                depth += 1
            elif t.is_("}") or t.is_(")") or t.is_("]"):
                if depth == 0:
                    if t.is_("}"):
                        return
                    self.advance()
                    continue
                depth -= 1
                if depth == 0 and t.is_("}"):
                    self.advance()
                    return
            elif t.is_(";") and depth == 0:
                self.advance()
                return
            self.advance()

    # ------------------------------------------------------------ top level

    def unit(self):
        functions = []
        while self.tok.kind != EOF:
            start = self.pos
            try:
                fn = self.function()
                if fn is not None:
                    functions.append(fn)
            except _SyntaxError as e:
                self.sink.add("E-SYNTAX", e.message, e.loc)
                if self.pos == start:
                    self.advance()
                self.skip_toplevel()
        return self.merge_functions(functions)

    def skip_toplevel(self):
        depth = 0
        while self.tok.kind != EOF:
            t = self.advance()
            if t.is_("{"):
                depth += 1
            elif t.is_("}"):
                depth -= 1
                if depth <= 0:
                    return
            elif t.is_(";") and depth == 0:
                return

    def merge_functions(self, functions):
        out = {}
        order = []
        for fn in functions:
            prev = out.get(fn.name)
            if prev is None:
                out[fn.name] = fn
                order.append(fn.name)
                continue
            if prev.body is not None and fn.body is not None:
                self.sink.add("E-DUP", f"function '{fn.name}' is defined twice", fn.loc,
                              related=prev.loc)
                continue
            keep, other = (fn, prev) if fn.body is not None else (prev, fn)
            if keep.access is None:
                keep.access = other.access
            out[fn.name] = keep
        return [out[name] for name in order]

    def function(self):
        t = self.tok
        if t.kind == HASH:
            self.advance()
            self.fail("preprocessor lines other than '#pragma pencil' are not supported", t)
        if t.kind == PRAGMA:
            self.advance()
            self.fail("pencil pragma outside a function body", t)
        self.check_keyword()
        ret, _ = self.decl_specifiers()
        if ret is None:
            self.fail(f"expected a return type but found {self.describe(self.tok)}")
        name_tok = self.expect_ident()
        if not self.at("("):
            self.fail("global declarations are outside the PENCIL subset", name_tok)
        params = self.param_list()
        access = None
        if self.tok.kind == IDENT and self.tok.text == "ACCESS":
            access = self.access_binding()
        if self.accept(";"):
            return N.FunctionDef(name_tok.text, ret, params, None, access, loc=name_tok.loc)
        body = self.block()
        return N.FunctionDef(name_tok.text, ret, params, body, access, loc=name_tok.loc)

    def decl_specifiers(self):
        """Return (type, const) for a run of specifiers, or (None, False)."""
        ctype = None
        const = False
        while True:
            self.check_keyword()
            t = self.tok
            if t.is_("const"):
                const = True
            elif t.kind == KEYWORD and t.text in _TYPE_WORDS:
                if ctype is not None:
                    self.fail("multiple type specifiers")
                ctype = t.text
            elif t.is_("static") or t.is_("restrict"):
                self.fail(f"'{t.text}' is only accepted inside array parameter brackets")
            else:
                return ctype, const
            self.advance()

    def access_binding(self):
        start = self.advance()
        self.expect("(")
        callee = self.expect_ident()
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect(")")
        self.expect(")")
        return N.AccessBinding(callee.text, args, loc=start.loc)

    def param_list(self):
        self.expect("(")
        if self.at("void") and self.peek().is_(")"):
            self.advance()
            self.advance()
            return []
        params = []
        if self.accept(")"):
            return params
        while True:
            params.append(self.param(params))
            if self.accept(")"):
                return params
            self.expect(",")

    def param(self, earlier):
        ctype, const = self.decl_specifiers()
        if ctype is None or ctype == "void":
            self.fail(f"expected a parameter type but found {self.describe(self.tok)}")
        depth = 0
        ptr_const = ptr_restrict = False
        while self.accept("*"):
            depth += 1
            while self.at("const") or self.at("restrict"):
                if self.advance().text == "const":
                    ptr_const = True
                else:
                    ptr_restrict = True
        if depth and self.accept("("):
            name = self.expect_ident()
            dims = []
            while self.at("["):
                dims.append(self.array_bracket()[0])
            self.expect(")")
            return N.Param(name.text, ctype, "ptrarray", dims, ptr_depth=depth, const=const,
                           loc=name.loc)
        name = self.expect_ident()
        if not self.at("["):
            if depth:
                return N.Param(name.text, ctype, "pointer", ptr_depth=depth, const=const,
                               ptr_const=ptr_const, ptr_restrict=ptr_restrict, loc=name.loc)
            return N.Param(name.text, ctype, "scalar", const=const, loc=name.loc)
        dims = []
        restrict = qconst = static = False
        first = True
        while self.at("["):
            extent, quals = self.array_bracket(allow_quals=first)
            if first:
                restrict = "restrict" in quals
                qconst = "const" in quals
                static = "static" in quals
            dims.append(extent)
            first = False
        if depth:
            return N.Param(name.text, ctype, "ptrarray", dims, ptr_depth=depth, const=const,
                           loc=name.loc)
        known = {p.name for p in earlier if p.kind == "scalar"}
        for extent in dims:
            if extent is None:
                continue
            for e in N.walk_expr(extent):
                if isinstance(e, N.Name) and e.id not in known:
                    self.fail(f"extent of '{name.text}' uses '{e.id}', which is not an earlier "
                              "scalar parameter", name)
        return N.Param(name.text, ctype, "array", dims, restrict=restrict, const=qconst or const,
                       static=static, loc=name.loc)

    def array_bracket(self, allow_quals=False):
        open_tok = self.expect("[")
        quals = []
        while self.at("restrict") or self.at("const") or self.at("static"):
            if not allow_quals:
                self.fail("qualifiers are only allowed in the first array dimension")
            quals.append(self.advance().text)
        extent = None
        if not self.at("]"):
            extent = self.expr()
        elif "static" in quals:
            self.fail("'static' array parameter needs an extent", open_tok)
        self.expect("]")
        return extent, quals

    # ----------------------------------------------------------- statements

    def block(self):
        open_tok = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == EOF:
                self.fail("unterminated block", open_tok)
            stmts.extend(self.statement_recovering())
        self.advance()
        return N.Block(stmts, loc=open_tok.loc)

    def statement_recovering(self):
        start = self.pos
        try:
            return self.statement_list_item()
        except _SyntaxError as e:
            self.sink.add("E-SYNTAX", e.message, e.loc)
            if self.pos == start and not self.at("}"):
                self.advance()
            self.skip_balanced()
            return []

    def statement_list_item(self):
        """One block item; declarations may expand to several Decl nodes."""
        t = self.tok
        if t.kind == PRAGMA:
            return [self.pragma_statement()]
        if t.kind == KEYWORD and (t.text in _TYPE_WORDS or t.text == "const"):
            return self.declaration()
        return [self.statement()]

    def declaration(self):
        ctype, const = self.decl_specifiers()
        if ctype is None or ctype == "void":
            self.fail("expected a variable type")
        decls = []
        while True:
            depth = 0
            while self.accept("*"):
                depth += 1
                while self.at("const") or self.at("restrict"):
                    self.advance()
            name = self.expect_ident()
            dims = []
            while self.accept("["):
                if self.at("]"):
                    self.fail("local arrays need an explicit extent")
                dims.append(self.expr())
                self.expect("]")
            init = None
            if self.accept("="):
                if self.at("{"):
                    self.fail("initializer lists are outside the PENCIL subset")
                init = self.expr()
            decls.append(N.Decl(name.text, ctype, dims, init, depth, const, loc=name.loc))
            if self.accept(";"):
                return decls
            self.expect(",")

    def pragma_statement(self):
        t = self.advance()
        return N.PragmaStmt(t.text, loc=t.loc)

    def statement(self):
        t = self.tok
        if t.kind == PRAGMA:
            pragmas = [self.pragma_statement()]
            while self.tok.kind == PRAGMA:
                pragmas.append(self.pragma_statement())
            if self.at("}"):
                return N.Block(pragmas, loc=t.loc) if len(pragmas) > 1 else pragmas[0]
            return N.Block(pragmas + self.statement_list_item(), loc=t.loc)
        if t.kind == HASH:
            self.advance()
            if re.match(r"#\s*pragma\s+omp\b", t.text):
                return N.Empty(loc=t.loc) if self.at("}") else self.statement()
            self.fail("preprocessor lines other than '#pragma pencil' are not supported", t)
        self.check_keyword()
        if t.is_("{"):
            return self.block()
        if t.is_(";"):
            self.advance()
            return N.Empty(loc=t.loc)
        if t.is_("for"):
            return self.for_stmt()
        if t.is_("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            body = self.statement()
            return N.While(cond, body, loc=t.loc)
        if t.is_("if"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.statement()
            orelse = self.statement() if self.accept("else") else None
            return N.If(cond, then, orelse, loc=t.loc)
        if t.is_("return"):
            self.advance()
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return N.Return(value, loc=t.loc)
        if t.is_("goto"):
            self.advance()
            label = self.expect_ident()
            self.expect(";")
            return N.Goto(label.text, loc=t.loc)
        if t.kind == KEYWORD and t.text in _TYPE_WORDS + ("const",):
            self.fail("declaration is not allowed as a sub-statement; wrap it in braces")
        if t.kind == IDENT and self.peek().is_(":"):
            self.advance()
            self.advance()
            if self.at("}"):
                self.fail("label must precede a statement")
            return N.Labeled(t.text, self.statement(), loc=t.loc)
        stmt = self.simple_statement()
        self.expect_end_of_statement()
        return stmt

    def expect_end_of_statement(self):
        if self.at(","):
            self.fail("the comma operator is outside the PENCIL subset")
        self.expect(";")

    def simple_statement(self):
        """Assignment, increment, call or summary access (without the ';')."""
        t = self.tok
        if t.is_("++") or t.is_("--"):
            self.advance()
            target = self.unary()
            self.check_lvalue(target, t)
            return N.Assign(target, t.text, None, loc=t.loc)
        target = self.unary()
        op = self.tok
        if op.kind == PUNCT and op.text in _ASSIGN_OPS:
            self.advance()
            self.check_lvalue(target, t)
            value = self.expr()
            return N.Assign(target, op.text, value, loc=t.loc)
        if op.is_("++") or op.is_("--"):
            self.advance()
            self.check_lvalue(target, t)
            return N.Assign(target, op.text, None, loc=t.loc)
        if op.kind == PUNCT and op.text in ("<<=", ">>=", "&=", "|=", "^="):
            self.fail(f"compound assignment '{op.text}' is outside the PENCIL subset", op)
        if isinstance(target, N.Call):
            if target.func in N.SUMMARY_MACROS:
                if len(target.args) != 1:
                    self.fail(f"{target.func} takes exactly one argument", t)
                arg = target.args[0]
                if not isinstance(arg, (N.Index, N.Name)):
                    self.fail(f"{target.func} expects an array element or variable", t)
                return N.SummaryAccess(target.func, arg, target.func, loc=t.loc)
            return N.ExprStmt(target, loc=t.loc)
        self.fail("expression statement has no effect or is outside the PENCIL subset", t)

    def check_lvalue(self, target, tok):
        if isinstance(target, (N.Name, N.Index)):
            return
        if isinstance(target, N.Unary) and target.op == "*":
            return
        self.fail("invalid assignment target", tok)

    def for_stmt(self):
        t = self.advance()
        self.expect("(")
        decl_type = None
        if self.tok.kind == KEYWORD and self.tok.text in ("int", "float", "double"):
            decl_type = self.advance().text
        var = self.expect_ident()
        self.expect("=")
        lower = self.expr()
        self.expect(";")
        cond = self.expr()
        self.expect(";")
        if not (isinstance(cond, N.Binary) and cond.op in ("<", "<=")
                and isinstance(cond.left, N.Name) and cond.left.id == var.text):
            self.fail(f"for-loop condition must be '{var.text} < bound' or "
                      f"'{var.text} <= bound'", t)
        self.for_step(var.text, t)
        self.expect(")")
        body = self.statement()
        return N.For(var.text, lower, cond.op, cond.right, body, decl_type, loc=t.loc)

    def for_step(self, var, loop_tok):
        bad = f"for-loop step must increment '{var}' by one"
        if self.at("++"):
            self.advance()
            if self.expect_ident().text != var:
                self.fail(bad, loop_tok)
            return
        name = self.expect_ident()
        if name.text != var:
            self.fail(bad, loop_tok)
        if self.accept("++"):
            return
        if self.accept("+="):
            step = self.expr()
            if isinstance(step, N.Num) and not step.is_float and step.value == 1:
                return
        elif self.accept("="):
            step = self.expr()
            if (isinstance(step, N.Binary) and step.op == "+" and
                    isinstance(step.left, N.Name) and step.left.id == var and
                    isinstance(step.right, N.Num) and step.right.text == "1"):
                return
        self.fail(bad, loop_tok)

    # ---------------------------------------------------------- expressions

    def expr(self):
        e = self.binary(0)
        if self.at("?"):
            self.fail("the conditional operator is outside the PENCIL subset")
        return e

    def binary(self, level):
        if level == len(_BINARY_PRECEDENCE):
            return self.unary()
        left = self.binary(level + 1)
        ops = _BINARY_PRECEDENCE[level]
        while self.tok.kind == PUNCT and self.tok.text in ops:
            op = self.advance()
            right = self.binary(level + 1)
            left = N.Binary(op.text, left, right, loc=op.loc)
        return left

    def unary(self):
        t = self.tok
        if t.kind == PUNCT and t.text in ("-", "+", "!", "~", "*", "&"):
            self.advance()
            return N.Unary(t.text, self.unary(), loc=t.loc)
        if t.is_("++") or t.is_("--"):
            self.fail("increment inside an expression is outside the PENCIL subset")
        return self.postfix()

    def postfix(self):
        t = self.tok
        e = self.primary()
        while True:
            if self.at("["):
                if not isinstance(e, (N.Name, N.Index)):
                    self.fail("only named arrays may be indexed", t)
                self.advance()
                idx = self.expr()
                self.expect("]")
                if isinstance(e, N.Name):
                    e = N.Index(e.id, [idx], loc=e.loc)
                else:
                    e.indices.append(idx)
            elif self.at("("):
                if not isinstance(e, N.Name):
                    self.fail("calls through expressions (function pointers) are outside the "
                              "PENCIL subset", t)
                self.advance()
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                e = N.Call(e.id, args, loc=e.loc)
            elif self.at(".") or self.at("->"):
                self.fail("member access is outside the PENCIL subset")
            else:
                return e

    def primary(self):
        t = self.tok
        if t.kind == INT or t.kind == FLOAT:
            self.advance()
            return N.Num(t.text, loc=t.loc)
        if t.kind == IDENT:
            self.advance()
            return N.Name(t.text, loc=t.loc)
        if t.is_("("):
            nxt = self.peek()
            if nxt.kind == KEYWORD and (nxt.text in _TYPE_WORDS or nxt.text in _UNSUPPORTED_KEYWORDS
                                        or nxt.text == "const"):
                self.fail("casts are outside the PENCIL subset")
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == STRING:
            self.fail("string literals are outside the PENCIL subset")
        self.check_keyword()
        self.fail(f"unexpected {self.describe(t)} in expression")


# ------------------------------------------------------------------ public API


def parse_translation_unit(tokens, filename=None):
    """Parse tokens into a TranslationUnit, or return the list of diagnostics."""
    if filename is None:
        filename = tokens[0].loc.file if tokens else "<input>"
    p = _Parser(tokens, filename)
    functions = p.unit()
    if p.sink.items:
        return p.sink.items
    return N.TranslationUnit(functions, filename)


_IDENT = r"[A-Za-z_]\w*"
_INDEP_RE = re.compile(r"^independent\s*(?:\(\s*(?P<labels>.*?)\s*\))?$")
_RED_RE = re.compile(r"^reduction\s*\(\s*(?P<op>[^:\s]+)\s*:\s*(?P<names>.*?)\s*\)$")


def parse_pragma(pragma_line):
    """Turn a ``#pragma pencil ...`` token into an Independent or Reduction directive."""
    text = pragma_line.text if isinstance(pragma_line, Token) else str(pragma_line)
    loc = pragma_line.loc if isinstance(pragma_line, Token) else Loc()
    m = re.match(r"^#\s*pragma\s+pencil\b\s*(?P<rest>.*)$", text.strip())
    if m is None:
        raise PencilError("E-PRAGMA", "not a '#pragma pencil' line", loc)
    rest = m.group("rest").strip()
    kind = rest.split("(")[0].split()[0] if rest else ""
    if kind == "independent":
        mi = _INDEP_RE.match(rest)
        if mi is None:
            raise PencilError("E-PRAGMA", "malformed independent label list", loc)
        labels = []
        if mi.group("labels") is not None:
            labels = [s.strip() for s in mi.group("labels").split(",")]
            if not all(re.fullmatch(_IDENT, s) for s in labels):
                raise PencilError("E-PRAGMA", "malformed independent label list", loc)
        return N.Independent(labels, text=text, loc=loc)
    if kind == "reduction":
        mr = _RED_RE.match(rest)
        if mr is None:
            raise PencilError("E-PRAGMA", "malformed reduction clause; expected "
                              "'reduction (operator : scalars)'", loc)
        op = mr.group("op")
        if op not in N.REDUCTION_OPS:
            raise PencilError("E-PRAGMA", f"unsupported reduction operator '{op}'", loc)
        names = [s.strip() for s in mr.group("names").split(",")]
        if not all(re.fullmatch(_IDENT, s) for s in names):
            raise PencilError("E-PRAGMA", "malformed reduction variable list", loc)
        return N.Reduction(op, names, text=text, loc=loc)
    raise PencilError("E-PRAGMA", f"unknown pencil pragma '{kind or rest}'", loc)


def attach_directives(unit, directives=None):
    """Bind each pencil pragma to the loop that follows it.

    Returns ``(unit, diagnostics)``; the input tree is not modified.  When
    ``directives`` is given, directives are matched to pragma lines by source
    location instead of being re-parsed from the pragma text.
    """
    unit = copy.deepcopy(unit)
    by_loc = {d.loc: d for d in directives or ()}
    sink = DiagnosticSink()

    def directive_for(p):
        if p.loc in by_loc:
            return by_loc[p.loc]
        return parse_pragma(Token(PRAGMA, p.text, p.loc))

    def unwrap(stmt):
        while isinstance(stmt, N.Labeled):
            stmt = stmt.stmt
        return stmt

    def process(stmt):
        for child in N.child_stmts(stmt):
            process(child)
        if not isinstance(stmt, N.Block):
            return
        out = []
        pending = []
        for s in stmt.stmts:
            if isinstance(s, N.PragmaStmt):
                try:
                    pending.append(directive_for(s))
                except PencilError as e:
                    sink.items.append(e.diagnostic)
                continue
            if pending:
                bind(pending, s)
                pending = []
            out.append(s)
        for d in pending:
            sink.add("E-ATTACH", "pragma is not followed by a statement", d.loc)
        stmt.stmts = out

    def bind(pending, stmt):
        target = unwrap(stmt)
        for d in pending:
            if isinstance(d, N.Reduction) and not isinstance(target, N.For):
                sink.add("E-ATTACH", "reduction pragma must precede a for loop", d.loc)
                continue
            if isinstance(d, N.Independent) and not isinstance(target, N.LOOPS):
                sink.add("E-ATTACH", "independent pragma must precede a for or while loop",
                         d.loc)
                continue
            if isinstance(d, N.Independent):
                present = N.labels_in(target.body)
                missing = [lab for lab in d.labels if lab not in present]
                if missing:
                    sink.add("E-LABEL", "label(s) " + ", ".join(missing) +
                             " do not occur in the loop body", d.loc)
                    continue
            target.directives.append(d)

    for fn in unit.functions:
        if fn.body is not None:
            process(fn.body)
    return unit, sink.items


def parse_source(source, filename="<input>"):
    """Tokenize, parse and attach directives.

    Returns ``(unit, diagnostics)`` where unit is None if any frontend error
    occurred.
    """
    try:
        tokens = tokenize(source, filename)
    except LexError as e:
        return None, [e.diagnostic]
    result = parse_translation_unit(tokens, filename)
    if isinstance(result, list):
        return None, result
    unit, diags = attach_directives(result)
    if any(d.is_error for d in diags):
        return None, diags
    return unit, diags


def parse_expression(text):
    """Parse a standalone expression (used by the DSL templates)."""
    tokens = tokenize(text)
    p = _Parser(tokens, "<expr>")
    try:
        e = p.expr()
        if p.tok.kind != EOF:
            p.fail(f"unexpected {p.describe(p.tok)} after expression")
    except _SyntaxError as err:
        raise PencilError("E-SYNTAX", err.message, err.loc) from None
    return e


__all__ = ["parse_translation_unit", "parse_pragma", "attach_directives", "parse_source",
           "parse_expression", "Diagnostic"]
