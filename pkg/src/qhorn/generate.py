"""Program families and random instances for tests and benchmarks."""
from __future__ import annotations

import random
from typing import Sequence

from .formula import EXISTS, FORALL, Clause, DefiniteQuery, Literal, Prefix, Program, Quantifier


def chain_program(n: int) -> Program:
    """``∃e0 ∀u1 ∃e1 … ∀un ∃en`` with rules ``e(i-1) :- u(i), e(i)`` and fact ``en``."""
    blocks: list[tuple[Quantifier, list[str]]] = [(EXISTS, ["e0"])]
    clauses = []
    for i in range(1, n + 1):
        blocks.append((FORALL, [f"u{i}"]))
        blocks.append((EXISTS, [f"e{i}"]))
        clauses.append(Clause.rule(f"e{i - 1}", f"u{i}", f"e{i}"))
    clauses.append(Clause.rule(f"e{n}"))
    return Program(Prefix(blocks), tuple(clauses))


def random_prefix(rng: random.Random, names: Sequence[str], max_blocks: int = 4) -> Prefix:
    k = rng.randint(1, min(max_blocks, len(names)))
    cuts = sorted(rng.sample(range(1, len(names)), k - 1)) if k > 1 else []
    first = rng.choice([EXISTS, FORALL])
    blocks = []
    bounds = [0, *cuts, len(names)]
    for j in range(k):
        q = first if j % 2 == 0 else (FORALL if first is EXISTS else EXISTS)
        blocks.append((q, list(names[bounds[j]:bounds[j + 1]])))
    return Prefix(blocks)


def random_horn_program(
    rng: random.Random,
    max_vars: int = 10,
    max_clauses: int = 12,
    max_body: int = 3,
    goal_ratio: float = 0.2,
    min_vars: int = 2,
) -> Program:
    """A quantified Horn program; heads are drawn from every variable."""
    n = rng.randint(min_vars, max_vars)
    names = [f"x{i}" for i in range(1, n + 1)]
    order = names[:]
    rng.shuffle(order)
    prefix = random_prefix(rng, order)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        body = [rng.choice(names) for _ in range(rng.randint(0, max_body))]
        if rng.random() < goal_ratio and body:
            clauses.append(Clause.goal(*body))
        else:
            clauses.append(Clause.rule(rng.choice(names), *body))
    return Program(prefix, tuple(clauses))


def random_definite_query(rng: random.Random, p: Program, max_body: int = 2) -> DefiniteQuery:
    names = list(p.prefix.variables)
    head = rng.choice(names)
    body = tuple(rng.choice(names) for _ in range(rng.randint(0, max_body)))
    return DefiniteQuery(head, body)


def random_clause(rng: random.Random, names: Sequence[str], width: int = 3) -> Clause:
    k = rng.randint(1, width)
    return Clause(tuple(Literal(rng.choice(names), rng.random() < 0.5) for _ in range(k)))
