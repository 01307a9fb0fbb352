"""OP2 mesh programs, given as JSON, lowered to PENCIL.

A model declares sets, maps between sets, data on sets ("dats"), kernels
written in pointer-free PENCIL, and par loops that apply a kernel over a set
with access-hinted arguments.  See docs/op2-input.md for the format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .. import nodes as N
from ..diagnostics import PencilError
from ..interp import ArrayStore, Binding, Executor, convert
from ..parser import parse_source

ACCESS_HINTS = ("OP_READ", "OP_WRITE", "OP_RW", "OP_INC")
IDENTITY = "OP_ID"


@dataclass
class Op2Set:
    name: str
    size: int


@dataclass
class Op2Map:
    name: str
    source: str
    target: str
    arity: int
    table: list


@dataclass
class Op2Dat:
    name: str
    set: str
    dim: int
    data: list
    ctype: str = "double"


@dataclass
class Op2Arg:
    dat: str
    index: Optional[int]  # None for OP_ID
    map: str  # map name or IDENTITY
    dim: int
    access: str

    @property
    def indirect(self):
        return self.map != IDENTITY


@dataclass
class Op2Kernel:
    name: str
    params: list  # [(array param, index param)] one pair per argument
    body: str


@dataclass
class Op2ParLoop:
    kernel: str
    set: str
    args: list


@dataclass
class Op2Model:
    sets: list = field(default_factory=list)
    maps: list = field(default_factory=list)
    dats: list = field(default_factory=list)
    kernels: list = field(default_factory=list)
    par_loops: list = field(default_factory=list)

    def set(self, name):
        return _find(self.sets, name, "set")

    def map(self, name):
        return _find(self.maps, name, "map")

    def dat(self, name):
        return _find(self.dats, name, "dat")

    def kernel(self, name):
        for k in self.kernels:
            if k.name == name:
                return k
        raise PencilError("E-OP2-KERNEL", f"par loop uses undeclared kernel '{name}'")

    def binding(self):
        """Concrete parameter values for the lowered program."""
        scalars = {size_param(s.name): s.size for s in self.sets}
        arrays = {m.name: list(m.table) for m in self.maps}
        arrays.update({d.name: list(d.data) for d in self.dats})
        return Binding(scalars, arrays)


def _find(items, name, what):
    for x in items:
        if x.name == name:
            return x
    raise PencilError("E-OP2-MODEL", f"unknown {what} '{name}'")


def size_param(set_name):
    return "n" + set_name


# ------------------------------------------------------------------ loading


def _need(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise PencilError("E-OP2-MODEL", f"{where}: missing '{key}'")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise PencilError("E-OP2-MODEL", f"{where}: '{key}' must be an integer")
    if kind is not int and not isinstance(value, kind):
        raise PencilError("E-OP2-MODEL", f"{where}: '{key}' has the wrong type")
    return value


def _ident(value, where):
    if not isinstance(value, str) or not value.isidentifier():
        raise PencilError("E-OP2-MODEL", f"{where}: '{value}' is not a valid C identifier")
    return value


def load_op2_model(document):
    """Parse and validate a model from JSON text, a path-like read by the caller, or a dict."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise PencilError("E-OP2-MODEL", f"invalid JSON: {e}") from None
    if not isinstance(document, dict):
        raise PencilError("E-OP2-MODEL", "model must be a JSON object")
    m = Op2Model()
    for k, s in enumerate(document.get("sets", [])):
        size = _need(s, "size", int, f"sets[{k}]")
        if size < 0:
            raise PencilError("E-OP2-SHAPE", f"set '{s.get('name')}' has negative size")
        m.sets.append(Op2Set(_ident(_need(s, "name", str, f"sets[{k}]"), "set"), size))
    for k, d in enumerate(document.get("maps", [])):
        w = f"maps[{k}]"
        mp = Op2Map(_ident(_need(d, "name", str, w), w), _need(d, "from", str, w),
                    _need(d, "to", str, w), _need(d, "arity", int, w), _need(d, "table", list, w))
        src, dst = m.set(mp.source), m.set(mp.target)
        if mp.arity < 1:
            raise PencilError("E-OP2-SHAPE", f"map '{mp.name}' needs a positive arity")
        if len(mp.table) != src.size * mp.arity:
            raise PencilError("E-OP2-SHAPE", f"map '{mp.name}' table has {len(mp.table)} entries, "
                              f"expected {src.size} x {mp.arity}")
        for pos, e in enumerate(mp.table):
            if isinstance(e, bool) or not isinstance(e, int) or not 0 <= e < dst.size:
                raise PencilError("E-OP2-RANGE", f"map '{mp.name}' entry {pos} = {e!r} lies "
                                  f"outside set '{dst.name}' of size {dst.size}")
        m.maps.append(mp)
    for k, d in enumerate(document.get("dats", [])):
        w = f"dats[{k}]"
        dat = Op2Dat(_ident(_need(d, "name", str, w), w), _need(d, "set", str, w),
                     _need(d, "dim", int, w), _need(d, "data", list, w), d.get("type", "double"))
        if dat.ctype not in N.SCALAR_TYPES:
            raise PencilError("E-OP2-MODEL", f"dat '{dat.name}' has unsupported type {dat.ctype!r}")
        expected = m.set(dat.set).size * dat.dim
        if dat.dim < 1 or len(dat.data) != expected:
            raise PencilError("E-OP2-SHAPE", f"dat '{dat.name}' has {len(dat.data)} values, "
                              f"expected {expected}")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in dat.data):
            raise PencilError("E-OP2-MODEL", f"dat '{dat.name}' data must be numbers")
        m.dats.append(dat)
    for k, d in enumerate(document.get("kernels", [])):
        w = f"kernels[{k}]"
        params = _need(d, "params", list, w)
        pairs = []
        for p in params:
            if not (isinstance(p, list) and len(p) == 2):
                raise PencilError("E-OP2-MODEL", f"{w}: each param is [array name, index name]")
            pairs.append((_ident(p[0], w), _ident(p[1], w)))
        m.kernels.append(Op2Kernel(_ident(_need(d, "name", str, w), w), pairs,
                                   _need(d, "body", str, w)))
    for k, d in enumerate(document.get("par_loops", [])):
        w = f"par_loops[{k}]"
        args = []
        for j, a in enumerate(_need(d, "args", list, w)):
            args.append(_load_arg(m, a, f"{w}.args[{j}]"))
        loop = Op2ParLoop(_need(d, "kernel", str, w), _need(d, "set", str, w), args)
        _check_loop(m, loop)
        m.par_loops.append(loop)
    names = [x.name for x in m.sets + m.maps + m.dats]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise PencilError("E-OP2-MODEL", f"duplicate names: {', '.join(sorted(dup))}")
    return m


def _load_arg(m, a, where):
    dat = m.dat(_need(a, "dat", str, where))
    map_name = a.get("map", IDENTITY)
    access = _need(a, "access", str, where)
    if access not in ACCESS_HINTS:
        raise PencilError("E-OP2-MODEL", f"{where}: unknown access hint {access!r}")
    dim = a.get("dim", dat.dim)
    if dim != dat.dim:
        raise PencilError("E-OP2-SHAPE", f"{where}: dim {dim} differs from dat '{dat.name}' dim "
                          f"{dat.dim}")
    index = a.get("index")
    if map_name == IDENTITY:
        if index not in (None, -1, IDENTITY):
            raise PencilError("E-OP2-RANGE", f"{where}: OP_ID arguments take index -1")
        return Op2Arg(dat.name, None, IDENTITY, dim, access)
    mp = m.map(map_name)
    if isinstance(index, bool) or not isinstance(index, int) or not 0 <= index < mp.arity:
        raise PencilError("E-OP2-RANGE", f"{where}: index {index!r} outside map '{mp.name}' "
                          f"arity {mp.arity}")
    if mp.target != dat.set:
        raise PencilError("E-OP2-MODEL", f"{where}: map '{mp.name}' targets '{mp.target}' but "
                          f"dat '{dat.name}' lives on '{dat.set}'")
    return Op2Arg(dat.name, index, mp.name, dim, access)


def _check_loop(m, loop):
    it = m.set(loop.set)
    kernel = m.kernel(loop.kernel)
    if len(kernel.params) != len(loop.args):
        raise PencilError("E-OP2-KERNEL", f"kernel '{kernel.name}' takes {len(kernel.params)} "
                          f"arguments, par loop passes {len(loop.args)}")
    for a in loop.args:
        if a.indirect and m.map(a.map).source != it.name:
            raise PencilError("E-OP2-MODEL", f"map '{a.map}' does not start at set '{it.name}'")
        if not a.indirect and m.dat(a.dat).set != it.name:
            raise PencilError("E-OP2-MODEL", f"direct argument '{a.dat}' is not on set '{it.name}'")
    hints = {}
    for a in loop.args:
        hints.setdefault(a.dat, set()).add(a.access)
    for dat, hs in hints.items():
        if "OP_INC" in hs and hs & {"OP_WRITE", "OP_RW"}:
            raise PencilError("E-OP2-CONFLICT", f"dat '{dat}' is both incremented and written "
                              f"in one par loop over '{loop.kernel}'")


# ------------------------------------------------------------------ lowering


def _extent(size_name, factor):
    return size_name if factor == 1 else f"{size_name} * {factor}"


def _program_params(m):
    params = [f"int {size_param(s.name)}" for s in m.sets]
    for mp in m.maps:
        params.append(f"int {mp.name}[restrict const static "
                      f"{_extent(size_param(mp.source), mp.arity)}]")
    for d in m.dats:
        params.append(f"{d.ctype} {d.name}[restrict const static "
                      f"{_extent(size_param(d.set), d.dim)}]")
    return params


def _param_names(m):
    return [size_param(s.name) for s in m.sets] + [x.name for x in m.maps + m.dats]


def _kernel_source(m, kernel):
    """The kernel as a PENCIL function; extents are the smallest dat it receives."""
    types = {}
    lengths = {}
    for loop in m.par_loops:
        if loop.kernel != kernel.name:
            continue
        for k, a in enumerate(loop.args):
            dat = m.dat(a.dat)
            if types.setdefault(k, dat.ctype) != dat.ctype:
                raise PencilError("E-OP2-KERNEL", f"kernel '{kernel.name}' argument {k} receives "
                                  f"dats of different types")
            lengths[k] = min(lengths.get(k, len(dat.data)), len(dat.data))
    params = []
    for k, (arr, idx) in enumerate(kernel.params):
        ext = max(1, lengths.get(k, 1))
        params.append(f"{types.get(k, 'double')} {arr}[restrict const static {ext}]")
        params.append(f"int {idx}")
    return f"void {kernel.name}({', '.join(params)})\n{{\n  {kernel.body.strip()}\n}}\n"


def par_loop_name(m, position):
    return f"par_loop_{position}_{m.par_loops[position].kernel}"


def _call_args(m, loop):
    out = []
    for a in loop.args:
        dat = m.dat(a.dat)
        if not a.indirect:
            idx = "i"
        else:
            mp = m.map(a.map)
            slot = f"{mp.arity} * i" if mp.arity != 1 else "i"
            if a.index:
                slot += f" + {a.index}"
            idx = f"{mp.name}[{slot}]"
        if dat.dim != 1:
            idx = f"{dat.dim} * {idx}"
        out += [a.dat, idx]
    return out


def directives_for(m, loop):
    """Pencil pragma lines implied by the access hints of one par loop."""
    lines = []
    inc = sorted({a.dat for a in loop.args if a.access == "OP_INC"})
    if inc:
        lines.append(f"#pragma pencil reduction (+:{', '.join(inc)})")
    if any(a.indirect and a.access in ("OP_WRITE", "OP_RW") for a in loop.args):
        lines.append("#pragma pencil independent")
    return lines


def _par_loop_source(m, position):
    loop = m.par_loops[position]
    body = [f"  {line}" for line in directives_for(m, loop)]
    body.append(f"  for (int i = 0; i < {size_param(loop.set)}; i++)")
    body.append(f"    {loop.kernel}({', '.join(_call_args(m, loop))});")
    sig = f"void {par_loop_name(m, position)}({', '.join(_program_params(m))})"
    return sig + "\n{\n" + "\n".join(body) + "\n}\n"


def op2_program_source(m, driver="op2_program"):
    parts = [_kernel_source(m, k) for k in m.kernels
             if any(lp.kernel == k.name for lp in m.par_loops)]
    parts += [_par_loop_source(m, k) for k in range(len(m.par_loops))]
    args = ", ".join(_param_names(m))
    calls = "".join(f"  {par_loop_name(m, k)}({args});\n" for k in range(len(m.par_loops)))
    parts.append(f"void {driver}({', '.join(_program_params(m))})\n{{\n{calls}}}\n")
    return "\n".join(parts)


def _parse(text, what):
    unit, diags = parse_source(text, what)
    if unit is None or any(d.is_error for d in diags):
        first = next((d for d in diags if d.is_error), None)
        raise PencilError("E-OP2-KERNEL", f"generated PENCIL does not parse: {first}")
    return unit


def lower_op2_program(m, driver="op2_program"):
    """A TranslationUnit holding kernels, one function per par loop and a driver."""
    return _parse(op2_program_source(m, driver), "<op2>")


def lower_op2_par_loop(m, loop):
    """The PENCIL function for one par loop (given as object or position)."""
    position = loop if isinstance(loop, int) else m.par_loops.index(loop)
    unit = lower_op2_program(m)
    return unit.function(par_loop_name(m, position))


# ------------------------------------------------------------------ reference


def interpret_op2_reference(m):
    """Run every par loop in order; returns {dat name: final flat values}.

    Map lookups happen here in Python; only kernel bodies go through the
    executor.
    """
    unit = _parse("\n".join(_kernel_source(m, k) for k in m.kernels
                            if any(lp.kernel == k.name for lp in m.par_loops)), "<op2-kernels>")
    values = {d.name: [convert(d.ctype, v) for v in d.data] for d in m.dats}
    for loop in m.par_loops:
        kernel = unit.function(loop.kernel)
        ex = Executor(unit, concrete=True)
        ex.scopes = [{}]
        stores = {}
        for d in m.dats:
            stores[d.name] = ex.new_array(d.name, d.ctype, [len(values[d.name])],
                                          {(k,): v for k, v in enumerate(values[d.name])})
        for i in range(m.set(loop.set).size):
            args = []
            for a in loop.args:
                dim = m.dat(a.dat).dim
                if a.indirect:
                    mp = m.map(a.map)
                    elem = mp.table[mp.arity * i + a.index]
                else:
                    elem = i
                args += [N.Name(a.dat), N.Num(str(dim * elem))]
            ex.call_function(kernel, args, None)
        for name, store in stores.items():
            values[name] = [store.get((k,), True) for k in range(len(values[name]))]
    return values


def run_lowered(m, budget=None):
    """Execute the lowered program with the model's data; same result shape as the reference."""
    from ..interp import run_concrete

    unit = lower_op2_program(m)
    _, out = run_concrete(unit, "op2_program", m.binding(), budget=budget)
    return {d.name: out[d.name] for d in m.dats}
