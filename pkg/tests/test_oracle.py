import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhorn.errors import CapExceeded, NotHornError, PrefixMismatch
from qhorn.formula import EXISTS, FORALL, Clause, ClauseKind, Prefix, Program, apply_renaming, classify_clause, neg, pos
from qhorn.generate import chain_program, random_clause, random_horn_program, random_prefix
from qhorn.oracle import (
    enumerate_models,
    equivalent,
    eval_qbf,
    find_witness_goal,
    horn_quick_sat,
    implies,
    satisfies,
)


def naive_eval(p: Program) -> bool:
    """Plain recursive game evaluation, independent of the numpy fold."""
    names = p.prefix.variables

    def go(k: int, val: dict) -> bool:
        if k == len(names):
            return all(any(val[l.var] == l.positive for l in c) for c in p.clauses)
        branches = (go(k + 1, {**val, names[k]: b}) for b in (False, True))
        return any(branches) if p.prefix.is_existential(names[k]) else all(branches)

    return go(0, {})


def random_qbf(rng: random.Random, n: int = 6, m: int = 6) -> Program:
    names = [f"v{i}" for i in range(n)]
    prefix = random_prefix(rng, names)
    return Program(prefix, tuple(random_clause(rng, names) for _ in range(rng.randint(0, m))))


def ex(*names):
    return Prefix([(EXISTS, list(names))])


def test_examples():
    assert eval_qbf(chain_program(1))
    assert not eval_qbf(Program(ex("x"), (Clause((pos("x"),)), Clause((neg("x"),)))))
    p1 = chain_program(1)
    assert not eval_qbf(p1.with_clauses(Clause.goal("e0")))


def test_model_counts():
    assert len(enumerate_models(Program(ex("x"), (Clause.rule("x"),)))) == 1
    assert len(enumerate_models(Program(ex("x"), ()))) == 2
    models = enumerate_models(chain_program(1))
    assert models and all(satisfies(chain_program(1), m) for m in models)


def test_implication_examples():
    small = chain_program(3)
    assert implies(small, small.with_clauses(Clause.rule("e0")))
    assert implies(small, small)
    x = Program(ex("x"), (Clause.rule("x"),))
    assert not implies(x, x.with_clauses(Clause.goal("x")))


def test_guards():
    with pytest.raises(CapExceeded):
        eval_qbf(chain_program(11))
    assert eval_qbf(chain_program(10), cap=21)
    with pytest.raises(PrefixMismatch):
        implies(chain_program(1), chain_program(2))


def test_quick_sat():
    assert horn_quick_sat(chain_program(1)) is True
    p = Program(ex("a", "b"), (Clause.rule("b", "a"), Clause.goal("b")))
    assert horn_quick_sat(p) is True
    q = Program(ex("a"), (Clause.rule("a"), Clause.goal("a")))
    assert horn_quick_sat(q) is None
    with pytest.raises(NotHornError):
        horn_quick_sat(Program(ex("a", "b"), (Clause((pos("a"), pos("b"))),)))


def test_witness_examples():
    p = chain_program(1).with_clauses(Clause.goal("e0"))
    assert find_witness_goal(p) == len(p.clauses) - 1
    assert find_witness_goal(chain_program(2)) is None
    # only the universal-head clause u <- e can be the witness
    prefix = Prefix([(EXISTS, ["e"]), (FORALL, ["u"])])
    w = Program(prefix, (Clause.rule("e"), Clause.rule("u", "e")))
    assert not eval_qbf(w)
    assert find_witness_goal(w) == 1


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_fold_matches_recursion(seed):
    p = random_qbf(random.Random(seed))
    assert eval_qbf(p) == naive_eval(p)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_models_exist_iff_true(seed):
    # model enumeration is exponential in the universals, so stay small
    p = random_qbf(random.Random(seed), n=4)
    assert eval_qbf(p) == bool(enumerate_models(p))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_implication_is_model_inclusion(seed):
    rng = random.Random(seed)
    p = random_qbf(rng, n=4, m=4)
    q = Program(p.prefix, tuple(random_clause(rng, p.prefix.variables) for _ in range(rng.randint(0, 3))))
    expected = all(satisfies(q, m) for m in enumerate_models(p))
    assert implies(p, q) == expected
    assert equivalent(p, p)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_renaming_preserves_satisfiability(seed):
    rng = random.Random(seed)
    p = random_qbf(rng, n=rng.randint(1, 8))
    flip = {v for v in p.prefix.variables if rng.random() < 0.5}
    assert eval_qbf(p) == eval_qbf(apply_renaming(p, flip))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_witness_iff_false(seed):
    p = random_horn_program(random.Random(seed), max_vars=7, max_clauses=8)
    w = find_witness_goal(p)
    assert (w is None) == eval_qbf(p)
    if w is not None:
        c = p.clauses[w]
        assert classify_clause(p.prefix, c) is not ClauseKind.DEFINITE_EXISTENTIAL_HEAD
        heads = {d.head.var for d in p.clauses if d.head is not None}
        for lit in c.body:
            if p.prefix.is_existential(lit.var):
                assert lit.var in heads
