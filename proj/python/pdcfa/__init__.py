"""Pushdown control-flow analysis with abstract garbage collection."""

import json as _json

from ._pdcfa import ParseError, analyses, analyze, dump_anf, run_concrete

__all__ = ["ParseError", "analyses", "analyze", "analyze_all", "dump_anf", "run_concrete", "result_json"]


def result_json(src, analysis="pdcfa-gc", k=0, **kw):
    """The full serialized result as a Python object."""
    return _json.loads(analyze(src, analysis, k, **kw)["json"])


def analyze_all(src, k=0, **kw):
    return {name: analyze(src, name, k, **kw) for name in analyses()}
