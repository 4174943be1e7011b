"""Grounding over a finite universe, for cross-checking first-order verdicts.

Quantifiers are expanded over the universe: a universal becomes a
conjunction of copies, an existential a disjunction, which is pushed back to
CNF by distributing. The result is a purely existential propositional
program whose variables are the ground atoms, so the truth-table oracle can
decide implication on it.
"""
from __future__ import annotations

import itertools
from typing import Sequence

from ..formula import EXISTS, Clause, Literal, Prefix, Program
from ..oracle import DEFAULT_CAP, eval_qbf, implies
from ..syntax import format_program
from .solver import constants_of
from .terms import Atom, Const, FOClause, FOProgram, FOQuery, Var

GroundCNF = list[tuple[Literal, ...]]


def universe(p: FOProgram, q: FOQuery | None = None, size: int = 2) -> list[str]:
    """Constants of the program and query, padded with ``c0, c1, …`` up to ``size``."""
    names = constants_of(p, q)
    i = 0
    while len(names) < size:
        if f"c{i}" not in names:
            names.append(f"c{i}")
        i += 1
    return names


def atom_name(a: Atom) -> str:
    if not a.args:
        return a.pred
    return "_".join([a.pred, *(t.name for t in a.args)])


def _matrix(c: FOClause, binding: dict[Var, Const]) -> tuple[Literal, ...]:
    lits = []
    if c.head is not None:
        lits.append(Literal(atom_name(c.head.substitute(binding)), True))
    for b in c.body:
        lits.append(Literal(atom_name(b.substitute(binding)), False))
    return tuple(dict.fromkeys(lits))


def ground_clause(c: FOClause, consts: Sequence[str]) -> GroundCNF:
    """CNF of the clause with its quantifier prefix expanded over ``consts``."""

    def expand(i: int, binding: dict[Var, Const]) -> GroundCNF:
        if i == len(c.prefix):
            return [_matrix(c, binding)]
        v = c.prefix[i]
        parts = [expand(i + 1, {**binding, v: Const(k)}) for k in consts]
        if v.quantifier is not EXISTS:
            return [cl for part in parts for cl in part]
        # a disjunction of CNFs: pick one clause from each part
        return [tuple(dict.fromkeys(itertools.chain(*combo))) for combo in itertools.product(*parts)]

    out: GroundCNF = []
    for cl in expand(0, {}):
        if any(-l in cl for l in cl):
            continue  # tautology
        if cl not in out:
            out.append(cl)
    return out


def ground_program(p: FOProgram, consts: Sequence[str], extra: Sequence[FOClause] = ()) -> Program:
    clauses: GroundCNF = []
    for c in list(p.clauses) + list(extra):
        for cl in ground_clause(c, consts):
            if cl not in clauses:
                clauses.append(cl)
    names: dict[str, None] = {}
    for cl in clauses:
        for lit in cl:
            names.setdefault(lit.var, None)
    return Program(Prefix([(EXISTS, sorted(names))]), tuple(Clause(cl) for cl in clauses))


def ground_implies(p: FOProgram, q: FOQuery, size: int = 2, cap: int = DEFAULT_CAP) -> bool:
    """Does the grounding of ``p`` imply the grounding of the query clause?

    A goal query ``?- body`` is read as its negation: the answer is True when
    the program together with the goal clause is unsatisfiable.
    """
    consts = universe(p, q, size)
    qc = q.clause()
    both = ground_program(p, consts, [qc])
    base = Program(both.prefix, ground_program(p, consts).clauses)
    if q.goal:
        return not eval_qbf(both, cap)
    target = Program(both.prefix, base.clauses + tuple(Clause(cl) for cl in ground_clause(qc, consts)))
    return implies(base, target, cap)


def dump_grounding(p: FOProgram, q: FOQuery | None = None, size: int = 2) -> str:
    """The grounding as propositional source text (non-Horn clauses use ``;``)."""
    consts = universe(p, q, size)
    return format_program(ground_program(p, consts)) + "\n"
