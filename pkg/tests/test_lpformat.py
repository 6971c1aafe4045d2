"""LP emission, checked by a small independent parser of the emitted text."""

import random
import re

import pytest

from cmpdp.graph import GraphError, build_graph
from cmpdp.lpformat import emit_lp

from helpers import random_graph

_CONSTRAINT = re.compile(r"^\s*\w+:\s*x(\d+)\s*\+\s*x(\d+)\s*(<=|>=)\s*1\s*$")


def parse_lp(text: str):
    """Minimal section-wise LP reader for the emitted dialect."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    sense = lines[0]
    assert lines[-1] == "End"
    sections = {"objective": [], "constraints": [], "binary": []}
    current = "objective"
    for ln in lines[1:-1]:
        if ln == "Subject To":
            current = "constraints"
        elif ln == "Binary":
            current = "binary"
        else:
            sections[current].append(ln)
    constraints = []
    for ln in sections["constraints"]:
        m = _CONSTRAINT.match(ln)
        assert m, f"unparseable constraint: {ln!r}"
        constraints.append((int(m.group(1)), int(m.group(2)), m.group(3)))
    objective_vars = re.findall(r"x(\d+)", " ".join(sections["objective"]))
    binaries = [ln.strip() for ln in sections["binary"]]
    return sense, [int(v) for v in objective_vars], constraints, binaries


def test_single_edge_mis():
    text = emit_lp(build_graph(2, [(0, 1)]), "mis")
    sense, obj, cons, binaries = parse_lp(text)
    assert sense == "Maximize"
    assert obj == [1, 2]
    assert cons == [(1, 2, "<=")]
    assert binaries == ["x1", "x2"]


def test_single_edge_mvc():
    sense, _, cons, _ = parse_lp(emit_lp(build_graph(2, [(0, 1)]), "mvc"))
    assert sense == "Minimize"
    assert cons == [(1, 2, ">=")]


def test_edgeless_has_no_constraints():
    sense, obj, cons, binaries = parse_lp(emit_lp(build_graph(4, []), "mis"))
    assert cons == []
    assert obj == [1, 2, 3, 4]
    assert len(binaries) == 4


def test_unknown_problem():
    with pytest.raises(GraphError):
        emit_lp(build_graph(1, []), "tsp")


def test_one_constraint_per_edge_randomized():
    rng = random.Random(99)
    for _ in range(20):
        g = random_graph(rng, rng.randint(2, 25), rng.random())
        for problem, op in (("mis", "<="), ("mvc", ">=")):
            _, obj, cons, binaries = parse_lp(emit_lp(g, problem))
            assert len(cons) == g.m
            assert all(c[2] == op for c in cons)
            assert sorted((a - 1, b - 1) for a, b, _ in cons) == g.edges()
            assert obj == list(range(1, g.n + 1))
            assert len(binaries) == g.n


def test_long_objective_wraps():
    text = emit_lp(build_graph(35, []), "mis")
    assert all(len(line) < 110 for line in text.splitlines())
