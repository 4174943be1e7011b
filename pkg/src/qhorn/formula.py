"""Core data model: prefixes, literals, Horn clauses, programs and queries.

All values are immutable after construction. Variables are referred to by
name; the prefix owns their quantifier, level and position.
"""
from __future__ import annotations

import enum
from functools import cached_property
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import DeclarationError, NotHornError


class Quantifier(enum.Enum):
    EXISTS = "exists"
    FORALL = "forall"

    @property
    def symbol(self) -> str:
        return "∃" if self is Quantifier.EXISTS else "∀"

    def __str__(self) -> str:
        return self.value


EXISTS = Quantifier.EXISTS
FORALL = Quantifier.FORALL


class Order(enum.Enum):
    BEFORE = -1
    SAME = 0
    AFTER = 1


class ClauseKind(enum.Enum):
    DEFINITE_EXISTENTIAL_HEAD = "definite-existential"
    DEFINITE_UNIVERSAL_HEAD = "definite-universal"
    GOAL = "goal"


@dataclass(frozen=True)
class Variable:
    name: str
    quantifier: Quantifier
    level: int


class Prefix:
    """An ordered list of quantifier blocks.

    Construction normalizes the block list: empty blocks are dropped and
    adjacent blocks with the same quantifier are merged, so levels are the
    1-based indices of alternating blocks.
    """

    __slots__ = ("blocks", "_info", "_order")

    def __init__(self, blocks: Iterable[tuple[Quantifier, Iterable[str]]] = ()):
        merged: list[tuple[Quantifier, list[str]]] = []
        for quantifier, names in blocks:
            names = list(names)
            if not names:
                continue
            if merged and merged[-1][0] is quantifier:
                merged[-1][1].extend(names)
            else:
                merged.append((quantifier, names))
        info: dict[str, tuple[int, int, Quantifier]] = {}
        order: list[str] = []
        for level, (quantifier, names) in enumerate(merged, start=1):
            for name in names:
                if name in info:
                    raise DeclarationError(f"variable {name!r} declared twice")
                info[name] = (level, len(order), quantifier)
                order.append(name)
        self.blocks: tuple[tuple[Quantifier, tuple[str, ...]], ...] = tuple(
            (q, tuple(ns)) for q, ns in merged
        )
        self._info = info
        self._order = tuple(order)

    @classmethod
    def of(cls, *blocks: tuple[Quantifier, Iterable[str]]) -> "Prefix":
        return cls(blocks)

    @property
    def variables(self) -> tuple[str, ...]:
        """All variable names in declaration order."""
        return self._order

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, name: object) -> bool:
        return name in self._info

    def __iter__(self) -> Iterator[str]:
        return iter(self._order)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Prefix) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __repr__(self) -> str:
        return f"Prefix({self})"

    def __str__(self) -> str:
        return " ".join(f"{q.symbol}{','.join(ns)}" for q, ns in self.blocks)

    @property
    def depth(self) -> int:
        """Number of blocks."""
        return len(self.blocks)

    def _lookup(self, name: str) -> tuple[int, int, Quantifier]:
        try:
            return self._info[name]
        except KeyError:
            raise DeclarationError(f"variable {name!r} is not declared in the prefix") from None

    def level(self, name: str) -> int:
        return self._lookup(name)[0]

    def position(self, name: str) -> int:
        """0-based index in the total order used for tie-breaking."""
        return self._lookup(name)[1]

    def quantifier(self, name: str) -> Quantifier:
        return self._lookup(name)[2]

    def is_universal(self, name: str) -> bool:
        return self._lookup(name)[2] is FORALL

    def is_existential(self, name: str) -> bool:
        return self._lookup(name)[2] is EXISTS

    def variable(self, name: str) -> Variable:
        level, _, quantifier = self._lookup(name)
        return Variable(name, quantifier, level)

    def existentials(self) -> list[str]:
        return [v for v in self._order if self._info[v][2] is EXISTS]

    def universals(self) -> list[str]:
        return [v for v in self._order if self._info[v][2] is FORALL]

    def extended(self, quantifier: Quantifier, name: str, block: int) -> "Prefix":
        """Insert ``name`` as a new block before index ``block`` (0..depth).

        Inserting next to a block of the same quantifier merges into it.
        """
        blocks = list(self.blocks)
        blocks.insert(block, (quantifier, (name,)))
        return Prefix(blocks)


@dataclass(frozen=True, order=True)
class Literal:
    var: str
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def __str__(self) -> str:
        return self.var if self.positive else f"-{self.var}"


def pos(name: str) -> Literal:
    return Literal(name, True)


def neg(name: str) -> Literal:
    return Literal(name, False)


@dataclass(frozen=True)
class Clause:
    """An ordered list of literals. Duplicates are kept (multiset semantics)."""

    literals: tuple[Literal, ...] = ()

    def __post_init__(self):
        if not isinstance(self.literals, tuple):
            object.__setattr__(self, "literals", tuple(self.literals))

    @classmethod
    def rule(cls, head: str | None, *body: str) -> "Clause":
        """``head :- body`` in Prolog notation; ``head=None`` gives a goal."""
        lits = [] if head is None else [pos(head)]
        lits.extend(neg(b) for b in body)
        return cls(tuple(lits))

    @classmethod
    def goal(cls, *body: str) -> "Clause":
        return cls(tuple(neg(b) for b in body))

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def __getitem__(self, i):
        return self.literals[i]

    def __bool__(self) -> bool:
        return bool(self.literals)

    @cached_property
    def positives(self) -> tuple[Literal, ...]:
        return tuple(lit for lit in self.literals if lit.positive)

    @cached_property
    def head(self) -> Literal | None:
        """The positive literal of a Horn clause, if any."""
        ps = self.positives
        return ps[0] if len(ps) == 1 else None

    @cached_property
    def body(self) -> tuple[Literal, ...]:
        """The negative literals, in order."""
        return tuple(lit for lit in self.literals if not lit.positive)

    def is_horn(self) -> bool:
        return sum(1 for lit in self.literals if lit.positive) <= 1

    def is_goal(self) -> bool:
        return all(not lit.positive for lit in self.literals)

    def variables(self) -> set[str]:
        return {lit.var for lit in self.literals}

    def __str__(self) -> str:
        return render_clause(self)


def render_clause(c: Clause | Sequence[Literal]) -> str:
    """Prolog-style text: ``h <- b1, b2``, ``<- g1, g2``; the empty clause is ``□``."""
    lits = tuple(c)
    if not lits:
        return "□"
    heads = [lit.var for lit in lits if lit.positive]
    body = [lit.var for lit in lits if not lit.positive]
    left = " ; ".join(heads)
    if not body:
        return left
    return (left + " " if left else "") + "<- " + ", ".join(body)


@dataclass(frozen=True)
class Program:
    prefix: Prefix
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        if not isinstance(self.clauses, tuple):
            object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            for lit in c.literals:
                if lit.var not in self.prefix:
                    raise DeclarationError(
                        f"variable {lit.var!r} is not declared in the prefix"
                    )

    def __len__(self) -> int:
        return len(self.clauses)

    def is_horn(self) -> bool:
        return all(c.is_horn() for c in self.clauses)

    def size(self) -> int:
        """Total number of literal occurrences."""
        return sum(len(c) for c in self.clauses)

    def with_clauses(self, *extra: Clause) -> "Program":
        return Program(self.prefix, self.clauses + tuple(extra))

    def variables(self) -> set[str]:
        out: set[str] = set()
        for c in self.clauses:
            out |= c.variables()
        return out

    @cached_property
    def head_index(self) -> "HeadIndex":
        """Clause bodies grouped by existential head, built once per program."""
        return HeadIndex.build(self)


@dataclass(frozen=True)
class HeadIndex:
    """Integer view of a program: variables are prefix positions.

    ``bodies[v]`` lists the bodies of clauses whose head is the existential
    at position ``v``, in program order; ``goals`` holds goal-clause bodies.
    """

    names: tuple[str, ...]
    universal: tuple[bool, ...]
    bodies: tuple[tuple[tuple[int, ...], ...] | None, ...]
    goals: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, p: Program) -> "HeadIndex":
        prefix = p.prefix
        info = prefix._info
        universal: list[bool] = []
        for q, names in prefix.blocks:
            universal.extend([q is FORALL] * len(names))
        grouped: list[list | None] = [None] * len(universal)
        goals = []
        for c in p.clauses:
            h = c.head
            body = tuple(info[lit.var][1] for lit in c.body)
            if h is None:
                if c.is_goal():
                    goals.append(body)
                continue
            v = info[h.var][1]
            if universal[v]:
                continue
            if grouped[v] is None:
                grouped[v] = [body]
            else:
                grouped[v].append(body)
        return cls(
            prefix.variables,
            tuple(universal),
            tuple(None if g is None else tuple(g) for g in grouped),
            tuple(goals),
        )


@dataclass(frozen=True)
class DefiniteQuery:
    """``? head :- body.`` asks whether the program implies the clause.

    ``head`` may be None only for queries produced by dropping a fresh
    universal head; the clause is then a goal clause. ``fresh`` declares
    quantifiers for variables the program does not know.
    """

    head: str | None
    body: tuple[str, ...] = ()
    fresh: tuple[tuple[str, Quantifier], ...] = ()

    def clause(self) -> Clause:
        return Clause.rule(self.head, *self.body)

    def variables(self) -> list[str]:
        names = [] if self.head is None else [self.head]
        return names + list(self.body)


@dataclass(frozen=True)
class GoalQuery:
    """``?- g1, ..., gn.``: refute the goal clause against the program."""

    body: tuple[str, ...]
    fresh: tuple[tuple[str, Quantifier], ...] = ()

    def clause(self) -> Clause:
        return Clause.goal(*self.body)

    def variables(self) -> list[str]:
        return list(self.body)


Query = DefiniteQuery | GoalQuery


def level_of(prefix: Prefix, lit: Literal | str) -> int:
    return prefix.level(lit if isinstance(lit, str) else lit.var)


def compare_prefix_order(prefix: Prefix, l: Literal | str, k: Literal | str) -> Order:
    a = l if isinstance(l, str) else l.var
    b = k if isinstance(k, str) else k.var
    pa, pb = prefix.position(a), prefix.position(b)
    if pa == pb:
        return Order.SAME
    return Order.BEFORE if pa < pb else Order.AFTER


def classify_clause(prefix: Prefix, c: Clause) -> ClauseKind:
    positives = c.positives
    if len(positives) > 1:
        raise NotHornError(f"clause {c} has {len(positives)} positive literals")
    if not positives:
        return ClauseKind.GOAL
    if prefix.is_universal(positives[0].var):
        return ClauseKind.DEFINITE_UNIVERSAL_HEAD
    return ClauseKind.DEFINITE_EXISTENTIAL_HEAD


def partition_clauses(p: Program) -> dict[ClauseKind, list[int]]:
    """Clause indices of F∃, F∀ and the goal clauses, in program order."""
    parts: dict[ClauseKind, list[int]] = {k: [] for k in ClauseKind}
    for i, c in enumerate(p.clauses):
        parts[classify_clause(p.prefix, c)].append(i)
    return parts


def apply_renaming(p: Program, flip: Iterable[str]) -> Program:
    flip = frozenset(flip)
    for name in flip:
        if name not in p.prefix:
            raise DeclarationError(f"cannot rename undeclared variable {name!r}")
    if not flip:
        return p
    clauses = tuple(
        Clause(tuple(-lit if lit.var in flip else lit for lit in c.literals))
        for c in p.clauses
    )
    return Program(p.prefix, clauses)


@dataclass
class ProgramBuilder:
    """Convenience for tests and generators: accumulate blocks and rules."""

    blocks: list[tuple[Quantifier, list[str]]] = field(default_factory=list)
    clauses: list[Clause] = field(default_factory=list)

    def exists(self, *names: str) -> "ProgramBuilder":
        self.blocks.append((EXISTS, list(names)))
        return self

    def forall(self, *names: str) -> "ProgramBuilder":
        self.blocks.append((FORALL, list(names)))
        return self

    def rule(self, head: str | None, *body: str) -> "ProgramBuilder":
        self.clauses.append(Clause.rule(head, *body))
        return self

    def build(self) -> Program:
        return Program(Prefix(self.blocks), tuple(self.clauses))
