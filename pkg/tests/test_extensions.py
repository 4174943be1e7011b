import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhorn.errors import ComplementMissing, LiteralNotInClause
from qhorn.extensions import (
    AnsweredNo,
    AnsweredYes,
    ReducedQuery,
    Unchanged,
    detect_renaming,
    head_first,
    outer_clause,
    outer_resolvent,
    resolve_new_variables,
)
from qhorn.formula import EXISTS, FORALL, Clause, DefiniteQuery, GoalQuery, Prefix, Program, apply_renaming, neg, pos
from qhorn.generate import chain_program, random_clause, random_horn_program
from qhorn.oracle import eval_qbf
from qhorn.syntax import parse_program


@pytest.fixture
def prefix():
    return Prefix([(EXISTS, ["a", "x", "y"]), (FORALL, ["f"]), (EXISTS, ["g", "z"])])


def test_outer_clause(prefix):
    c = Clause((pos("a"), neg("f"), neg("g")))
    assert outer_clause(prefix, c, neg("f")) == Clause((pos("a"),))
    assert outer_clause(prefix, c, pos("a")) == Clause(())
    assert outer_clause(prefix, c, neg("g")) == Clause((pos("a"), neg("f")))
    with pytest.raises(LiteralNotInClause):
        outer_clause(prefix, c, pos("g"))


def test_outer_resolvent(prefix):
    pre = Prefix([(EXISTS, ["y", "z"]), (FORALL, ["u"]), (EXISTS, ["x"])])
    assert outer_resolvent(pre, Clause((pos("x"), neg("y"))), Clause((neg("x"), pos("z"))), pos("x")) == Clause((neg("y"), pos("z")))
    assert outer_resolvent(prefix, Clause((pos("x"),)), Clause((neg("x"),)), pos("x")) == Clause(())
    # z lies strictly right of x, so the outer clause drops it
    assert outer_resolvent(prefix, Clause((pos("x"), neg("y"))), Clause((neg("x"), pos("z"))), pos("x")) == Clause((neg("y"),))
    with pytest.raises(ComplementMissing):
        outer_resolvent(prefix, Clause((pos("x"),)), Clause((neg("y"),)), pos("x"))


def test_new_variable_examples():
    p = chain_program(2)
    assert isinstance(resolve_new_variables(p, DefiniteQuery("w", ("e0",), (("w", EXISTS),))), AnsweredYes)
    r = resolve_new_variables(p, DefiniteQuery("e0", ("v",), (("v", FORALL),)))
    assert r == ReducedQuery(DefiniteQuery("e0", ()), ("v",))
    assert isinstance(resolve_new_variables(p, DefiniteQuery("e0")), Unchanged)
    assert isinstance(resolve_new_variables(p, GoalQuery(("e0", "w"), (("w", EXISTS),))), AnsweredNo)
    assert isinstance(resolve_new_variables(p, GoalQuery(("v",), (("v", FORALL),))), AnsweredYes)
    dropped_head = resolve_new_variables(p, DefiniteQuery("v", ("e0",), (("v", FORALL),)))
    assert dropped_head.query == DefiniteQuery(None, ("e0",))


def test_renaming_examples():
    p = parse_program("prefix exists x1; forall x2; exists x3. x1 ; x2 ; x3. x2 :- x1, x3.", allow_non_horn=True)
    flip = detect_renaming(p)
    assert flip is not None and apply_renaming(p, flip).is_horn()
    assert detect_renaming(chain_program(3)) == set()
    witness = parse_program("prefix exists x y. x ; y. y :- x. x :- y. :- x, y.", allow_non_horn=True)
    assert detect_renaming(witness) is None


def test_head_first():
    p = parse_program("prefix exists a b. :- a, b.", allow_non_horn=True)
    flipped = head_first(apply_renaming(p, {"b"}))
    assert flipped.clauses[0] == Clause.rule("b", "a")


def _brute_renamable(p: Program) -> bool:
    names = sorted(p.variables())
    for k in range(len(names) + 1):
        for flip in itertools.combinations(names, k):
            if apply_renaming(p, flip).is_horn():
                return True
    return False


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_detection_matches_brute_force(seed):
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(rng.randint(1, 8))]
    p = Program(Prefix([(EXISTS, names)]), tuple(random_clause(rng, names) for _ in range(rng.randint(1, 6))))
    flip = detect_renaming(p)
    assert (flip is not None) == _brute_renamable(p)
    if flip is not None:
        assert apply_renaming(p, flip).is_horn()
        assert eval_qbf(p) == eval_qbf(apply_renaming(p, flip))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_outer_resolvent_keeps_horn(seed):
    rng = random.Random(seed)
    p = random_horn_program(rng, max_vars=6)
    for c, d in itertools.product(p.clauses, repeat=2):
        if c.head is None:
            continue
        l = c.head
        if -l in d.literals and not any(-k in c.literals for k in c if k != l):
            assert outer_resolvent(p.prefix, c, d, l).is_horn()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_reduction_never_invents_literals(seed):
    rng = random.Random(seed)
    p = random_horn_program(rng, max_vars=5)
    names = list(p.prefix.variables)
    fresh = (("n1", rng.choice([EXISTS, FORALL])), ("n2", FORALL))
    pool = names + ["n1", "n2"]
    q = DefiniteQuery(rng.choice(pool), tuple(rng.choice(pool) for _ in range(2)), fresh)
    r = resolve_new_variables(p, q)
    if isinstance(r, ReducedQuery):
        assert set(r.query.variables()) <= set(q.variables())
        assert not set(r.query.variables()) & {"n1", "n2"}
