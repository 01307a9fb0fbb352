"""Stage wiring shared by the command line and the tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import nodes as N
from .compliance import check_compliance
from .depanalysis import analyze_function
from .diagnostics import Diagnostic, PencilError, sort_diagnostics
from .interp import Binding
from .parser import parse_source
from .summaries import interpret_summary, resolve_access_bindings, summarize_call

STAGES = ("check", "summarize", "analyze", "lower")


@dataclass
class PipelineResult:
    unit: Optional[N.TranslationUnit]
    diagnostics: list = field(default_factory=list)
    triples: dict = field(default_factory=dict)
    loops: list = field(default_factory=list)

    @property
    def has_errors(self):
        return any(d.is_error for d in self.diagnostics)


def _scalars_bound(fn, binding):
    return all(p.name in binding.scalars for p in fn.params if p.kind == "scalar")


def _summaries(unit, binding, exact, budget):
    triples = {}
    diags = []
    bindings, bdiags = resolve_access_bindings(unit)
    diags.extend(bdiags)
    summary_names = unit.summary_names
    for fn in unit.functions:
        if fn.name not in bindings and fn.name not in summary_names:
            continue
        target = unit.function(bindings[fn.name][0]) if fn.name in bindings else fn
        if binding is None or not _scalars_bound(fn, binding) or not _scalars_bound(target, binding):
            if exact:
                diags.append(Diagnostic("E-BINDING-REQUIRED",
                                        f"summary of '{fn.name}' needs --param values for its "
                                        f"scalar parameters", fn.loc, function=fn.name))
            continue
        try:
            if fn.name in bindings:
                triple = summarize_call(unit, fn.name, [N.Name(p.name) for p in fn.params],
                                        binding, budget)
            else:
                triple = interpret_summary(fn, binding, unit, budget)
        except PencilError as e:
            d = e.diagnostic
            diags.append(Diagnostic(d.code, d.message, d.loc if d.loc != N.NOWHERE else fn.loc,
                                    d.severity, function=fn.name))
            continue
        for w in triple.warnings:
            diags.append(Diagnostic(w.code, w.message, fn.loc, w.severity, function=fn.name))
        triples[fn.name] = triple
    return triples, diags


def run_pipeline(source, filename="<input>", stage="analyze", binding=None, exact=False,
                 budget=None):
    """Parse, check and (depending on ``stage``) summarize and analyze ``source``.

    ``binding`` is None when no values were supplied; enumeration is then
    skipped and only affine proofs and directives decide verdicts.
    """
    unit, diags = parse_source(source, filename)
    result = PipelineResult(unit, list(diags))
    if unit is None:
        result.diagnostics = sort_diagnostics(result.diagnostics)
        return result
    result.diagnostics.extend(check_compliance(unit))
    if STAGES.index(stage) >= 1:
        triples, sdiags = _summaries(unit, binding, exact, budget)
        result.triples = triples
        result.diagnostics.extend(sdiags)
    if STAGES.index(stage) >= 2:
        summaries = unit.summary_names
        for fn in unit.functions:
            if fn.body is None or fn.name in summaries:
                continue
            reps = analyze_function(unit, fn, binding, exact=exact, budget=budget)
            for r in reps:
                result.diagnostics.extend(r.diagnostics)
            result.loops.extend(reps)
    result.diagnostics = sort_diagnostics(_dedupe(result.diagnostics))
    return result


def _dedupe(diags):
    seen = set()
    out = []
    for d in diags:
        key = (d.code, d.message, d.loc, d.severity, d.function)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def parse_binding(params, arrays):
    """Build a Binding from ``name=value`` and ``name=v0,v1,...`` strings."""
    b = Binding()
    for text in params or ():
        name, value = _split(text, "--param")
        b.scalars[name] = _number(value, text)
    for text in arrays or ():
        name, value = _split(text, "--array")
        items = [v for v in value.split(",") if v.strip()] if value.strip() else []
        b.arrays[name] = [_number(v, text) for v in items]
    return b


def _split(text, flag):
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name.isidentifier():
        raise PencilError("E-USAGE", f"{flag} expects name=value, got {text!r}")
    return name, value


def _number(text, whole):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            raise PencilError("E-USAGE", f"not a number in {whole!r}: {text!r}") from None
