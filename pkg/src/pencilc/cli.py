"""pencilc command line.

Exit status: 0 clean, 1 error diagnostics (the report is still written),
2 usage or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import PencilError
from .dslfront.op2 import interpret_op2_reference, load_op2_model, lower_op2_program, op2_program_source
from .dslfront.optiml import lower_optiml
from .lowering.openmp import PRELUDE, emit_openmp
from .lowering.report import dumps, emit_report, report_text
from .pipeline import parse_binding, run_pipeline

EXIT_OK, EXIT_ERRORS, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _common(p, bindings=True):
    p.add_argument("input", help="input file")
    p.add_argument("-o", "--output", help="write the main output here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="text")
    if bindings:
        p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                       help="bind a scalar parameter (repeatable)")
        p.add_argument("--array", action="append", default=[], metavar="NAME=V0,V1,...",
                       help="bind an array parameter's contents (repeatable)")
    p.add_argument("--exact", action="store_true",
                   help="treat a missing binding as an error instead of an UNKNOWN verdict")


def build_parser():
    ap = _Parser(prog="pencilc", description="PENCIL checker, analyzer and lowering tool")
    ap.add_argument("--version", action="store_true", help="print the version and exit")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    for name, help_text in (("check", "parse and check the coding rules"),
                            ("summarize", "also interpret access summaries"),
                            ("analyze", "also analyze loop dependences")):
        _common(sub.add_parser(name, help=help_text))
    lower = sub.add_parser("lower", help="emit OpenMP-annotated C")
    _common(lower)
    lower.add_argument("--report", help="also write the JSON report to this path")
    lower.add_argument("--standalone", action="store_true",
                       help="prepend includes and macro definitions so the output builds as C")
    op2 = sub.add_parser("op2", help="lower an OP2 model (JSON) and analyze it")
    _common(op2, bindings=False)
    op2.add_argument("--run-reference", action="store_true",
                     help="print the reference interpreter's final dat values")
    for p in (op2, sub.add_parser("optiml", help="lower an OptiML construct (JSON)")):
        if p is not op2:
            _common(p, bindings=False)
        p.add_argument("--emit-pencil", metavar="PATH", help="write the generated PENCIL here")
        p.add_argument("--emit-omp", metavar="PATH", help="write OpenMP-annotated C here")
    return ap


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise PencilError("E-IO", f"cannot read {path}: {e}") from None


def _write(path, text, stdout):
    if path is None or path == "-":
        stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise PencilError("E-IO", f"cannot write {path}: {e}") from None


def _render(report, fmt):
    return dumps(report) if fmt == "json" else report_text(report)


def _fmt_number(v):
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return repr(v)


def _analyze_generated(source, filename, binding, args, out):
    result = run_pipeline(source, filename, "analyze", binding, args.exact)
    report = emit_report(result.unit, result.diagnostics, result.triples, result.loops, filename)
    if args.emit_pencil:
        _write(args.emit_pencil, source, out)
    if args.emit_omp and result.unit is not None:
        _write(args.emit_omp, emit_openmp(result.unit, result.loops).text, out)
    return result, report


def run(argv, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _Usage as e:
        stderr.write(f"pencilc: error: [E-USAGE] {e}\n")
        return EXIT_USAGE
    if args.version:
        from . import __version__
        stdout.write(f"pencilc {__version__}\n")
        return EXIT_OK
    if args.command is None:
        stderr.write("pencilc: error: [E-USAGE] a subcommand is required\n")
        return EXIT_USAGE
    try:
        return _dispatch(args, stdout, stderr)
    except PencilError as e:
        code = EXIT_USAGE if e.code in ("E-IO", "E-USAGE") else EXIT_ERRORS
        stderr.write(f"pencilc: error: {e}\n")
        return code


def _dispatch(args, stdout, stderr):
    source = _read(args.input)
    if args.command in ("check", "summarize", "analyze", "lower"):
        binding = None
        if args.param or args.array:
            binding = parse_binding(args.param, args.array)
        stage = "analyze" if args.command == "lower" else args.command
        result = run_pipeline(source, args.input, stage, binding, args.exact)
        report = emit_report(result.unit, result.diagnostics, result.triples, result.loops,
                             args.input)
        if args.command == "lower":
            if result.unit is not None:
                lowered = emit_openmp(result.unit, result.loops)
                report["diagnostics"] = report["diagnostics"] + [
                    d.to_json() for d in lowered.diagnostics]
                text = (PRELUDE + "\n" if args.standalone else "") + lowered.text
                _write(args.output, text, stdout)
                if lowered.diagnostics:
                    for d in lowered.diagnostics:
                        stderr.write(f"{d}\n")
                    result.diagnostics.extend(lowered.diagnostics)
            if args.report:
                _write(args.report, dumps(report), stdout)
            elif args.format == "text":
                for d in result.diagnostics:
                    stderr.write(f"{d}\n")
        else:
            _write(args.output, _render(report, args.format), stdout)
        return EXIT_ERRORS if result.has_errors else EXIT_OK

    if args.command == "op2":
        model = load_op2_model(source)
        program = op2_program_source(model)
        lower_op2_program(model)  # surfaces parse failures as E-OP2-KERNEL
        result, report = _analyze_generated(program, args.input, model.binding(), args, stdout)
        _write(args.output, _render(report, args.format), stdout)
        if args.run_reference:
            for name, values in interpret_op2_reference(model).items():
                stdout.write(f"{name} = [{', '.join(_fmt_number(v) for v in values)}]\n")
        return EXIT_ERRORS if result.has_errors else EXIT_OK

    if args.command == "optiml":
        try:
            construct = json.loads(source)
        except json.JSONDecodeError as e:
            raise PencilError("E-OPTIML", f"invalid JSON in {args.input}: {e}") from None
        lowered = lower_optiml(construct)
        result, report = _analyze_generated(lowered.source, args.input, None, args, stdout)
        _write(args.output, _render(report, args.format), stdout)
        return EXIT_ERRORS if result.has_errors else EXIT_OK
    raise PencilError("E-USAGE", f"unknown command {args.command}")


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
