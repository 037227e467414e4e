import json
import os
import pathlib

import pytest

import pdcfa

BENCH = pathlib.Path(os.environ.get("PDCFA_BENCH_DIR", pathlib.Path(__file__).parents[2] / "bench"))


def source(name):
    return (BENCH / f"{name}.scm").read_text()


def test_concrete_fig1():
    r = pdcfa.run_concrete(source("fig1"))
    assert r["outcome"] == "halt"
    assert r["value"] == "36"


def test_divergence():
    r = pdcfa.run_concrete("((lambda (x) (x x)) (lambda (x) (x x)))", fuel=50)
    assert r["outcome"] == "fuel-exhausted"
    assert r["steps"] == 50


def test_fig1_ordering():
    counts = {name: r["control_states"] for name, r in pdcfa.analyze_all(source("fig1")).items()}
    assert counts["pdcfa-gc"] < counts["plain-gc"] < counts["pdcfa"] < counts["plain"]


def test_json_and_dot():
    r = pdcfa.analyze(source("eta"), "pdcfa-gc-approx", timing=False, program="eta")
    doc = json.loads(r["json"])
    assert doc["schema"] == 1
    assert doc["program"] == "eta"
    assert len(doc["nodes"]) == r["control_states"]
    assert r["dot"].count(" -> ") == r["edges"]
    assert pdcfa.result_json(source("eta"), "pdcfa-gc-approx", timing=False, program="eta") == doc


def test_dump_anf_reparses():
    text = pdcfa.dump_anf(source("mj09"))
    assert pdcfa.run_concrete(text)["outcome"] == "halt"


def test_errors():
    with pytest.raises(pdcfa.ParseError, match="1:"):
        pdcfa.dump_anf("((")
    with pytest.raises(ValueError, match="unbound variable y"):
        pdcfa.analyze("(lambda (x) y)")
    with pytest.raises(ValueError, match="unknown analysis"):
        pdcfa.analyze("1", "nope")
