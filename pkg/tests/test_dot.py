import re

from qhorn.dot import emit_dot
from qhorn.formula import Clause
from qhorn.sldq import Derivation, ResolveStep, refutation_tree

from test_sldq import RIGHT_BRANCH, g

# the left branch stops at <- f, c once c has no clause
LEFT_BRANCH = Derivation(
    g("a"),
    (
        ResolveStep(0, "a", g("e", "c", "g")),
        ResolveStep(3, "e", g("f", "c", "g")),
        ResolveStep(5, "g", g("f", "c")),
    ),
)


def nodes(dot):
    return re.findall(r"^\s+(n\d+) \[label=\"(.*)\"\];$", dot, re.M)


def test_branching_tree_has_nine_nodes():
    dot = emit_dot([LEFT_BRANCH, RIGHT_BRANCH], name="branching")
    labels = [label for _, label in nodes(dot)]
    assert len(labels) == 9
    assert labels.count("□") == 1
    assert dot.startswith("digraph branching {")
    assert '[label="∀-Red"]' in dot


def test_empty_derivation():
    dot = emit_dot(Derivation(Clause(())))
    assert nodes(dot) == [("n0", "□")]
    assert "->" not in dot


def test_looping_tree(looping):
    dot = emit_dot(refutation_tree(looping.program, g("b")))
    assert [label for _, label in nodes(dot)] == ["<- b", "□", "<- b"]
    assert dot.count("->") == 2


def test_output_is_deterministic(branching):
    a = emit_dot(refutation_tree(branching.program, g("a")))
    b = emit_dot(refutation_tree(branching.program, g("a")))
    assert a == b
