"""Outer clauses, queries over fresh variables, and renamable-Horn detection."""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .errors import ComplementMissing, DeclarationError, LiteralNotInClause
from .formula import (
    EXISTS,
    FORALL,
    Clause,
    DefiniteQuery,
    GoalQuery,
    Literal,
    Prefix,
    Program,
    Quantifier,
    Query,
    apply_renaming,
)


def _dedupe(lits) -> tuple[Literal, ...]:
    return tuple(dict.fromkeys(lits))


def outer_clause(prefix: Prefix, c: Clause, l: Literal) -> Clause:
    """Literals of ``c`` other than ``l`` that are not right of ``l``."""
    if l not in c.literals:
        raise LiteralNotInClause(f"{l} is not in {c}")
    pl = prefix.position(l.var)
    return Clause(_dedupe(k for k in c if k != l and prefix.position(k.var) <= pl))


def outer_resolvent(prefix: Prefix, c: Clause, d: Clause, l: Literal) -> Clause:
    """``(c minus l)`` joined with the outer clause of ``d`` at the complement of ``l``."""
    if l not in c.literals:
        raise LiteralNotInClause(f"{l} is not in {c}")
    if -l not in d.literals:
        raise ComplementMissing(f"{-l} is not in {d}")
    rest = [k for k in c if k != l]
    return Clause(_dedupe(rest + list(outer_clause(prefix, d, -l))))


@dataclass(frozen=True)
class AnsweredYes:
    reason: str


@dataclass(frozen=True)
class AnsweredNo:
    reason: str


@dataclass(frozen=True)
class ReducedQuery:
    query: Query
    dropped: tuple[str, ...]


@dataclass(frozen=True)
class Unchanged:
    query: Query


NewVarResolution = AnsweredYes | AnsweredNo | ReducedQuery | Unchanged


def fresh_variables(p: Program, q: Query) -> dict[str, Quantifier]:
    declared = dict(q.fresh)
    out: dict[str, Quantifier] = {}
    for name in q.variables():
        if name is None or name in p.prefix:
            continue
        if name not in declared:
            raise DeclarationError(f"query variable {name!r} has no quantifier")
        out[name] = declared[name]
    return out


def resolve_new_variables(p: Program, q: Query) -> NewVarResolution:
    """Settle or simplify a query that mentions variables absent from ``p``.

    A definite query with a fresh existential is implied outright: no clause
    of the program can clash with it. Fresh universals are dropped. For a
    goal query a fresh existential can simply be made false, so the goal is
    not refutable.
    """
    fresh = fresh_variables(p, q)
    if not fresh:
        return Unchanged(q)
    existential = [v for v, quant in fresh.items() if quant is EXISTS]
    universal = tuple(v for v, quant in fresh.items() if quant is FORALL)
    if isinstance(q, DefiniteQuery):
        if existential:
            return AnsweredYes(f"fresh existential {existential[0]} makes the query clause redundant")
        head = None if q.head in universal else q.head
        body = tuple(b for b in q.body if b not in universal)
        return ReducedQuery(DefiniteQuery(head, body), universal)
    if existential:
        return AnsweredNo(f"fresh existential {existential[0]} can be set false")
    body = tuple(b for b in q.body if b not in universal)
    if not body:
        return AnsweredYes("every goal literal is a fresh universal and reduces away")
    return ReducedQuery(GoalQuery(body), universal)


def detect_renaming(p: Program) -> set[str] | None:
    """A set of variables whose flip makes ``p`` Horn, or None.

    Every pair of literals in a clause must not both end up positive; with
    one flip indicator per variable this is 2-SAT, solved through the
    strongly connected components of the implication graph. Quantifiers
    play no part. A program that is already Horn gets the empty set.
    """
    if p.is_horn():
        return set()
    g = nx.DiGraph()
    names = sorted(p.variables())
    for x in names:
        g.add_node((x, True))
        g.add_node((x, False))
    # node (x, b) reads "flip(x) == b"; literal k stays non-positive iff flip == k.positive
    for c in p.clauses:
        lits = c.literals
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                a, b = lits[i], lits[j]
                if a.var == b.var:
                    if a.positive == b.positive:
                        g.add_edge((a.var, not a.positive), (a.var, a.positive))
                    continue
                g.add_edge((a.var, not a.positive), (b.var, b.positive))
                g.add_edge((b.var, not b.positive), (a.var, a.positive))
    dag = nx.condensation(g)
    mapping = dag.graph["mapping"]
    if any(mapping[(x, True)] == mapping[(x, False)] for x in names):
        return None
    order = {c: i for i, c in enumerate(nx.topological_sort(dag))}
    flip = {x for x in names if order[mapping[(x, True)]] > order[mapping[(x, False)]]}
    renamed = apply_renaming(p, flip)
    assert renamed.is_horn(), "2-SAT assignment failed to produce a Horn program"
    return flip


def head_first(p: Program) -> Program:
    """Move each clause's positive literal to the front, keeping body order."""
    clauses = tuple(Clause(c.positives + c.body) for c in p.clauses)
    return Program(p.prefix, clauses)
