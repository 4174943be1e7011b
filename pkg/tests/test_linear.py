import random

from hypothesis import given, settings
from hypothesis import strategies as st

from qhorn.formula import EXISTS, FORALL, Clause, DefiniteQuery, GoalQuery, Prefix, Program, neg
from qhorn.generate import chain_program, random_definite_query, random_horn_program
from qhorn.linear import (
    INF,
    LOOP,
    NEW,
    NO,
    YES,
    BlockStatus,
    Verdict,
    WorkCounter,
    comp_block,
    output,
    refutation_state,
    solve_states,
    test_clause,
)
from qhorn.oracle import implies
from qhorn.syntax import parse_program


def test_chain_is_yes():
    for n in (1, 5, 200, 1000):
        assert output(chain_program(n), DefiniteQuery("e0")).verdict is Verdict.YES


def test_missing_head_is_no():
    p = parse_program("prefix exists a b. a :- b.")
    assert output(p, DefiniteQuery("b")).verdict is Verdict.NO


def test_looping_states(looping):
    p = looping.program
    assert refutation_state(p, "b") is INF
    assert refutation_state(p, "a") is LOOP
    r = output(p, DefiniteQuery("a"))
    assert r.verdict is Verdict.LOOP
    assert r.dump() == "a = loop\nb = inf\nc = no"
    assert solve_states(p, ["a"]) == {"a": LOOP, "b": INF, "c": NO}


def test_branching_goal_query(branching):
    r = output(branching.program, GoalQuery(("a",)))
    assert r.verdict is Verdict.YES
    assert r.states["a"] is YES


def test_empty_head_list_is_no():
    p = parse_program("prefix exists x y. y.")
    assert refutation_state(p, "x") is NO


def test_clause_level_states(looping):
    p = looping.program
    assert test_clause(p, Clause.rule("b")) is YES
    assert test_clause(p, Clause.rule("b", "b"), {"b": LOOP}) is LOOP
    assert test_clause(p, Clause.rule("a", "d", "b", "c"), {"b": INF, "c": NO}) is LOOP


def test_comp_block():
    prefix = Prefix([(FORALL, ["u"]), (EXISTS, ["e", "f"])])
    c = Clause.goal("u", "e")
    assert comp_block("u", c, {"e": NO}, prefix) is BlockStatus.BLOCKED_YES
    assert comp_block("u", c, {"e": LOOP}, prefix) is BlockStatus.BLOCKED_YES
    assert comp_block("u", Clause.goal("e", "u"), {"e": NO}, Prefix([(EXISTS, ["e"]), (FORALL, ["u"])])) is BlockStatus.BLOCKED_NO
    assert comp_block("u", Clause.goal("u", "e", "f"), {"e": YES, "f": INF}, prefix) is BlockStatus.BLOCKED_NO


def test_blocked_universal_makes_no():
    # u sits left of e, and e has no clause, so u can never be reduced
    p = parse_program("prefix exists a; forall u; exists e. a :- u, e.")
    assert output(p, DefiniteQuery("a")).verdict is Verdict.NO


def test_work_counter_is_linear():
    counts = []
    for n in (64, 128, 256):
        w = WorkCounter()
        output(chain_program(n), DefiniteQuery("e0"), counter=w)
        counts.append(w.total)
    assert counts == [3 * n + 1 for n in (64, 128, 256)]


def test_deep_chain_needs_no_recursion():
    assert output(chain_program(50_000), DefiniteQuery("e0")).verdict is Verdict.YES


def test_states_start_fresh_each_call(looping):
    first = output(looping.program, DefiniteQuery("b"))
    second = output(looping.program, DefiniteQuery("b"))
    assert first.states == second.states
    assert first.states["a"] is NEW


def _check_monotone(transitions):
    seen = {}
    for var, before, after in transitions:
        prev = seen.get(var, NEW)
        assert before is prev
        if prev is NEW:
            assert after in (LOOP, NO)
        elif prev is LOOP:
            assert after in (YES, NO, LOOP, INF)
        elif prev is INF:
            # second pass of a successful first clause
            assert after in (YES, INF)
        else:
            raise AssertionError(f"{var} changed after reaching {prev}")
        seen[var] = after


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_yes_is_sound_and_states_monotone(seed):
    rng = random.Random(seed)
    p = random_horn_program(rng)
    q = random_definite_query(rng, p)
    r = output(p, q, record=True)
    _check_monotone(r.transitions)
    again = output(p, q)
    assert again.verdict is r.verdict and again.states == r.states
    if r.verdict is Verdict.YES:
        assert implies(p, p.with_clauses(q.clause()))


def test_headless_query_uses_goal_clauses():
    p = Program(Prefix([(EXISTS, ["a", "b"])]), (Clause.rule("a"), Clause((neg("a"),))))
    assert output(p, DefiniteQuery(None, ())).verdict is Verdict.YES
