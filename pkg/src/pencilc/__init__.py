"""PENCIL front end, rule checker, access-summary interpreter, dependence analyzer and lowerings."""

__version__ = "0.1.0"
