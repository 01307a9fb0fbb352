"""Compile emitted C with the host gcc and compare against the interpreter."""

import os
import shutil
import subprocess
import tempfile

from pencilc.interp import concrete_extents, run_concrete
from pencilc.lowering.openmp import PRELUDE, emit_harness, emit_openmp, format_outputs
from pencilc.pipeline import run_pipeline

GCC = shutil.which("gcc")


def compile_and_run(c_text, workdir=None, openmp=False):
    own = workdir is None
    workdir = workdir or tempfile.mkdtemp(prefix="pencilc-")
    try:
        src = os.path.join(workdir, "prog.c")
        exe = os.path.join(workdir, "prog")
        with open(src, "w") as f:
            f.write(c_text)
        cmd = [GCC, "-std=c99", "-O0", "-w", src, "-o", exe, "-lm"]
        if openmp:
            cmd.insert(1, "-fopenmp")
        subprocess.run(cmd, check=True, capture_output=True, text=True)
        return subprocess.run([exe], check=True, capture_output=True, text=True,
                              timeout=30).stdout
    finally:
        if own:
            shutil.rmtree(workdir, ignore_errors=True)


def lowered_vs_interpreter(source, entry, binding, workdir=None):
    """(gcc output, interpreter output, pipeline result) for one program."""
    result = run_pipeline(source, f"{entry}.pencil.c", "analyze", binding)
    unit = result.unit
    lowered = emit_openmp(unit, result.loops)
    fn = unit.function(entry)
    extents = concrete_extents(unit, fn, binding)
    c_text = PRELUDE + "\n" + lowered.text + "\n" + emit_harness(unit, entry, binding, extents)
    got = compile_and_run(c_text, workdir)
    ret, outputs = run_concrete(unit, entry, binding)
    return got, format_outputs(fn, ret, outputs), result
