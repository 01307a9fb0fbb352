"""Source locations, diagnostics and the exception types shared by all passes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

ERROR = "error"
WARNING = "warning"

# Every code a pass may emit.  docs/diagnostics.md mirrors this table.
CATALOG = {
    # frontend
    "E-LEX": "illegal character or unterminated comment",
    "E-SYNTAX": "construct outside the accepted C99 subset",
    "E-PRAGMA": "malformed or unknown pencil pragma",
    "E-ATTACH": "pragma not followed by a loop it may govern",
    "E-LABEL": "independent label list names a label absent from the loop body",
    "E-DUP": "function defined twice in one translation unit",
    # coding rules
    "R1": "array parameter missing restrict/const/static qualifiers",
    "R2": "pointer parameter that is not a 'T * const restrict' scalar pointer",
    "R3": "local pointer declaration",
    "R4": "pointer arithmetic, address-of or pointer reseating",
    "R5": "goto or goto target label",
    "R6": "recursion (direct or indirect)",
    "R7": "DEF/USE/MAY_DEF outside an access-summary function",
    "R8": "array-of-pointers parameter",
    "E-UNDEF": "call to a function that is neither defined nor whitelisted",
    # summaries
    "E-SUMMARY-ARITY": "ACCESS argument count differs from the summary's parameters",
    "E-SUMMARY-UNDEF": "ACCESS names a function missing from the unit",
    "E-NONAFFINE": "control flow or index depends on unknown data",
    "E-BUDGET": "enumeration cap exceeded",
    "E-BOUNDS": "access outside the declared extent",
    "E-NO-SUMMARY": "call to a function with neither a body nor a summary",
    "E-NESTED-SUMMARY": "summary function calls another summarized function",
    # dependence analysis
    "E-UNKNOWN-INDEX": "brute-force check given an access with an unknown index",
    "E-BINDING-REQUIRED": "exact verdict requested but no binding, directive or affine proof",
    # lowering
    "E-EMIT": "reduction variable not in scope at the loop",
    # dsl front-ends
    "E-OP2-RANGE": "OP2 map entry outside its target set",
    "E-OP2-SHAPE": "OP2 table or data length mismatch",
    "E-OP2-KERNEL": "OP2 kernel signature does not match the argument list",
    "E-OP2-CONFLICT": "OP2 loop mixes OP_INC with OP_WRITE/OP_RW on one dat",
    "E-OP2-MODEL": "malformed OP2 model document",
    "E-OPTIML-RANGE": "empty OptiML sum range",
    "E-OPTIML": "malformed OptiML construct",
    # cli
    "E-IO": "input/output failure",
    "E-USAGE": "invalid command-line usage",
}


@dataclass(frozen=True, order=True)
class Loc:
    file: str = "<input>"
    line: int = 1
    column: int = 1

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"

    def to_json(self):
        return {"file": self.file, "line": self.line, "column": self.column}


NOWHERE = Loc("<none>", 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    loc: Loc = NOWHERE
    severity: str = ERROR
    related: Optional[Loc] = None
    function: Optional[str] = None

    def __post_init__(self):
        if self.code not in CATALOG:
            raise ValueError(f"unknown diagnostic code {self.code!r}")
        if not self.message:
            raise ValueError("diagnostic message must be non-empty")

    @property
    def is_error(self):
        return self.severity == ERROR

    def sort_key(self):
        return (self.loc, self.code, self.message)

    def __str__(self):
        text = f"{self.loc}: {self.severity}: [{self.code}] {self.message}"
        if self.related is not None:
            text += f" (see {self.related})"
        return text

    def to_json(self):
        out = {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "location": self.loc.to_json(),
        }
        if self.related is not None:
            out["related"] = self.related.to_json()
        if self.function is not None:
            out["function"] = self.function
        return out


def sort_diagnostics(diags):
    return sorted(diags, key=Diagnostic.sort_key)


class PencilError(Exception):
    """Raised by passes whose failure aborts the operation."""

    def __init__(self, code, message, loc=NOWHERE, severity=ERROR):
        super().__init__(f"[{code}] {message}")
        self.diagnostic = Diagnostic(code, message, loc, severity)

    @property
    def code(self):
        return self.diagnostic.code


class LexError(PencilError):
    def __init__(self, message, loc):
        super().__init__("E-LEX", message, loc)


@dataclass
class DiagnosticSink:
    """Accumulates diagnostics from a pass that keeps going after errors."""

    items: list = field(default_factory=list)

    def add(self, code, message, loc=NOWHERE, severity=ERROR, **kw):
        self.items.append(Diagnostic(code, message, loc, severity, **kw))

    def extend(self, diags):
        self.items.extend(diags)

    @property
    def has_errors(self):
        return any(d.is_error for d in self.items)
