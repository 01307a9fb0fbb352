from .openmp import LoweredSource, emit_harness, emit_openmp
from .printer import pretty_print
from .report import dumps, emit_report, load_schema

__all__ = ["LoweredSource", "dumps", "emit_harness", "emit_openmp", "emit_report",
           "load_schema", "pretty_print"]
