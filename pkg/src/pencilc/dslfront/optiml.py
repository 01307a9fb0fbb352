"""OptiML control structures as PENCIL templates.

Constructs arrive as small JSON objects (see ``lower_optiml``).  Each one
lowers to a fragment (the statements a DSL compiler would splice in) and a
complete function wrapping it so the result can be checked and analyzed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..diagnostics import PencilError
from ..parser import parse_expression, parse_source

SUM = "sum"
VECTOR = "vector"
UNTIL_CONVERGED = "untilconverged"
GRADIENT = "gradient"
KINDS = (SUM, VECTOR, UNTIL_CONVERGED, GRADIENT)


@dataclass
class OptimlLowering:
    kind: str
    fragment: str
    source: str  # a full PENCIL function containing the fragment
    function: str
    unit: object


def _field(c, key, default=None, kind=None):
    if key not in c:
        if default is None:
            raise PencilError("E-OPTIML", f"{c.get('kind', '?')} construct needs '{key}'")
        return default
    v = c[key]
    if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise PencilError("E-OPTIML", f"'{key}' must be an integer")
    if kind is str and not isinstance(v, str):
        raise PencilError("E-OPTIML", f"'{key}' must be a string")
    return v


def _name(c, key, default):
    v = _field(c, key, default, str)
    if not v.isidentifier():
        raise PencilError("E-OPTIML", f"'{key}' must be an identifier, got {v!r}")
    return v


def _expr(text, what):
    try:
        parse_expression(text)
    except PencilError as e:
        raise PencilError("E-OPTIML", f"{what}: {e.diagnostic.message}") from None
    return text


def _bound_text(v):
    return str(v) if isinstance(v, int) else _name({"v": v}, "v", None)


def _subst_index(text, var, value):
    """``text`` with the index variable replaced by an integer literal."""
    from ..interp import substitute
    from ..lowering.printer import expr_to_str
    from .. import nodes as N

    e = substitute(parse_expression(text), {var: N.Num(str(value))})
    return expr_to_str(e)


def _lower_sum(c):
    lo = _field(c, "lo", kind=int)
    hi = _field(c, "hi", kind=int)
    if hi < lo:
        raise PencilError("E-OPTIML-RANGE", f"sum over empty range {lo}..{hi}")
    x = _name(c, "var", "x")
    i = _name(c, "index", "i")
    ctype = _field(c, "type", "double", str)
    body = _expr(_field(c, "body", kind=str), "sum body")
    fragment = (f"{x} = {_subst_index(body, i, lo)};\n"
                f"#pragma pencil reduction (+:{x})\n"
                f"for ({i} = {lo + 1}; {i} <= {hi}; {i}++)\n"
                f"  {x} += {body};\n")
    fname = f"sum_{x}"
    src = (f"{ctype} {fname}(void)\n{{\n  {ctype} {x};\n  int {i};\n"
           + _indent(fragment) + f"  return {x};\n}}\n")
    return fragment, src, fname


def _lower_vector(c):
    v = _name(c, "name", "my_vector")
    i = _name(c, "index", "i")
    lo = _field(c, "lo", 0, int)
    end = _field(c, "end", "end")
    ctype = _field(c, "type", "int", str)
    init = _expr(_field(c, "init", kind=str), "vector init")
    end_text = _bound_text(end)
    if isinstance(end, int) and end < lo:
        raise PencilError("E-OPTIML-RANGE", f"vector range {lo}..{end} is empty")
    fragment = f"for ({i} = {lo}; {i} <= {end_text}; {i}++)\n  {v}[{i}] = {init};\n"
    fname = f"vector_{v}"
    params = []
    if not isinstance(end, int):
        params.append(f"int {end_text}")
    params.append(f"{ctype} {v}[restrict const static {end_text} + 1]")
    src = f"void {fname}({', '.join(params)})\n{{\n  int {i};\n" + _indent(fragment) + "}\n"
    return fragment, src, fname


def _lower_until(c):
    x = _name(c, "var", "x")
    update = _expr(_field(c, "update", kind=str), "untilconverged update")
    threshold = _field(c, "threshold")
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool) or threshold <= 0:
        raise PencilError("E-OPTIML", "threshold must be a positive number")
    t = repr(float(threshold))
    fragment = (f"diff = {t} + 1.0;\n"
                f"while (diff > {t}) {{\n"
                f"  prev = {x};\n"
                f"  {x} = {update};\n"
                f"  diff = fabs({x} - prev);\n"
                f"}}\n")
    fname = f"untilconverged_{x}"
    src = (f"double {fname}(double {x})\n{{\n  double prev;\n  double diff;\n"
           + _indent(fragment) + f"  return {x};\n}}\n")
    return fragment, src, fname


def _lower_gradient(c):
    variant = _field(c, "variant", kind=str)
    if variant not in ("batch", "stochastic"):
        raise PencilError("E-OPTIML", f"gradient variant must be batch or stochastic, got {variant!r}")
    n = _name(c, "samples", "n")
    i = _name(c, "index", "i")
    theta = _name(c, "theta", "theta")
    arrays = [_name({"a": a}, "a", None) for a in _field(c, "arrays", [])]
    term = _expr(_field(c, "term", kind=str), "gradient term")
    array_params = [f"double {a}[restrict const static {n}]" for a in arrays]
    if variant == "batch":
        grad = _name(c, "output", "grad")
        fragment = (f"#pragma pencil independent\n"
                    f"for ({i} = 0; {i} < {n}; {i}++)\n"
                    f"  {grad}[{i}] = {term};\n")
        fname = "gradient_batch"
        params = [f"int {n}", f"double {theta}"] + array_params + \
                 [f"double {grad}[restrict const static {n}]"]
        src = f"void {fname}({', '.join(params)})\n{{\n  int {i};\n" + _indent(fragment) + "}\n"
    else:
        alpha = _name(c, "rate", "alpha")
        fragment = (f"for ({i} = 0; {i} < {n}; {i}++)\n"
                    f"  {theta} = {theta} + {alpha} * ({term});\n")
        fname = "gradient_stochastic"
        params = [f"int {n}", f"double {theta}", f"double {alpha}"] + array_params
        src = (f"double {fname}({', '.join(params)})\n{{\n  int {i};\n" + _indent(fragment)
               + f"  return {theta};\n}}\n")
    return fragment, src, fname


def _indent(text):
    return "".join(f"  {line}\n" for line in text.splitlines())


_LOWER = {SUM: _lower_sum, VECTOR: _lower_vector, UNTIL_CONVERGED: _lower_until,
          GRADIENT: _lower_gradient}


def lower_optiml(construct):
    """Lower one construct (dict or JSON text) to an OptimlLowering.

    Forms::

        {"kind": "sum", "lo": 0, "hi": 100, "var": "x", "index": "i", "body": "exp(i)"}
        {"kind": "vector", "name": "my_vector", "end": "end", "init": "0"}
        {"kind": "untilconverged", "var": "x", "update": "x / 2", "threshold": 0.001}
        {"kind": "gradient", "variant": "batch" | "stochastic", "samples": "n",
         "arrays": ["xs", "ys"], "term": "ys[i] - theta * xs[i]"}
    """
    if isinstance(construct, (str, bytes)):
        try:
            construct = json.loads(construct)
        except json.JSONDecodeError as e:
            raise PencilError("E-OPTIML", f"invalid JSON: {e}") from None
    if not isinstance(construct, dict) or construct.get("kind") not in KINDS:
        raise PencilError("E-OPTIML", f"construct kind must be one of {', '.join(KINDS)}")
    kind = construct["kind"]
    fragment, src, fname = _LOWER[kind](construct)
    unit, diags = parse_source(src, f"<optiml-{kind}>")
    errors = [d for d in diags if d.is_error]
    if unit is None or errors:
        raise PencilError("E-OPTIML", f"template produced invalid PENCIL: {errors[0] if errors else ''}")
    return OptimlLowering(kind, fragment, src, fname, unit)
