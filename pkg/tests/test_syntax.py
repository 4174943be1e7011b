import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhorn.errors import DeclarationError, NotHornError, ParseError, QhornError
from qhorn.fol.terms import Const, Var
from qhorn.formula import EXISTS, FORALL, Clause, DefiniteQuery, GoalQuery
from qhorn.generate import chain_program, random_horn_program
from qhorn.syntax import (
    FIRST_ORDER,
    format_fo_program,
    format_program,
    format_query,
    parse_program,
    parse_query,
    parse_source,
)


def test_chain_source():
    p = parse_program("prefix exists e0; forall u1; exists e1. e0 :- u1, e1. e1.")
    assert p == chain_program(1)


def test_clause_order_kept():
    p = parse_program("prefix exists a. a. a :- a.")
    assert p.clauses == (Clause.rule("a"), Clause.rule("a", "a"))


def test_empty_program_is_valid():
    p = parse_program("prefix exists a.")
    assert len(p) == 0


def test_two_positive_literals():
    with pytest.raises(NotHornError):
        parse_program("prefix exists x. x ; y.")
    p = parse_program("prefix exists x y. x ; y.", allow_non_horn=True)
    assert not p.is_horn()


def test_undeclared_variable():
    with pytest.raises(DeclarationError):
        parse_program("prefix exists a. a :- b.")


def test_queries():
    assert parse_query("? e0.") == DefiniteQuery("e0", ())
    assert parse_query("?- a.") == GoalQuery(("a",))
    assert parse_query("? a :- b, c.") == DefiniteQuery("a", ("b", "c"))
    q = parse_query("? forall z : a :- z.")
    assert q.fresh == (("z", FORALL),)


def test_empty_goal_is_an_error():
    with pytest.raises(ParseError):
        parse_query("?-.")


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse_program("prefix exists a.\na :- .")
    assert (info.value.line, info.value.col) == (2, 6)
    assert str(info.value).startswith("2:6:")


def test_query_against_prefix():
    prefix = chain_program(1).prefix
    with pytest.raises(DeclarationError):
        parse_query("? zz.", prefix)
    with pytest.raises(DeclarationError):
        parse_query("? exists e0 : e0.", prefix)


def test_fol_source():
    unit = parse_source("#mode fol\nforall H exists K : p(H,K).\nr(X, a) :- p(X, Y).\n? forall H : r(H, a).")
    assert unit.mode == FIRST_ORDER
    first, second = unit.program.clauses
    assert first.head.args == (Var("H", FORALL), Var("K", EXISTS))
    assert second.head.args == (Var("X", FORALL), Const("a"))
    assert unit.query.head.pred == "r"


def test_fol_declared_prefix_must_cover_variables():
    with pytest.raises(DeclarationError):
        parse_source("#mode fol\nforall X : p(X, Y).")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_round_trip_propositional(seed):
    p = random_horn_program(random.Random(seed))
    assert parse_program(format_program(p)) == p


def test_round_trip_fol():
    text = "#mode fol\nforall X exists Y forall Z : eq(Z,Y) :- e(Y,X), e(Z,X).\nforall X : :- root(X), nr(X).\np(a)."
    p = parse_program(text)
    again = parse_program(format_fo_program(p))
    assert again == p


def test_round_trip_queries():
    for text in ["? a :- b.", "?- a, b.", "? forall z : a :- z."]:
        q = parse_query(text)
        assert parse_query(format_query(q)) == q


_pieces = st.sampled_from(
    ["prefix", "exists", "forall", "a", "b", "X", "p", "(", ")", ",", ".", ";", ":-", "?", "?-", ":", "#mode", "fol", "%", "\n", " ", "$"]
)


@settings(max_examples=300, deadline=None)
@given(st.lists(_pieces, max_size=25).map(" ".join) | st.text(max_size=40))
def test_parse_is_total(text):
    try:
        parse_source(text)
    except QhornError:
        pass
