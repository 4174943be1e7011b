"""Brute-force game semantics for small quantified formulas.

The matrix is tabulated over all 2^n assignments with numpy (the first
prefix variable is the most significant bit) and then folded one variable at
a time from the innermost quantifier outwards: ``any`` for an existential,
``all`` for a universal. This is the independent reference the engines are
tested against; it never looks at resolution.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapExceeded, NotHornError, PrefixMismatch
from .formula import Clause, ClauseKind, Prefix, Program, classify_clause

DEFAULT_CAP = 20


def _check_cap(prefix: Prefix, cap: int) -> int:
    n = len(prefix)
    if n > cap:
        raise CapExceeded(f"{n} variables exceed the oracle cap of {cap}")
    return n


def truth_table(prefix: Prefix, clauses: Iterable[Clause]) -> np.ndarray:
    """Boolean vector of the matrix value for every assignment."""
    n = len(prefix)
    idx = np.arange(1 << n, dtype=np.int64)
    columns: dict[str, np.ndarray] = {}

    def column(name: str) -> np.ndarray:
        if name not in columns:
            shift = n - 1 - prefix.position(name)
            columns[name] = ((idx >> shift) & 1).astype(bool)
        return columns[name]

    table = np.ones(1 << n, dtype=bool)
    for c in clauses:
        sat = np.zeros(1 << n, dtype=bool)
        for lit in c:
            col = column(lit.var)
            sat |= col if lit.positive else ~col
        table &= sat
    return table


def _fold(prefix: Prefix, table: np.ndarray) -> bool:
    arr = table
    for name in reversed(prefix.variables):
        pairs = arr.reshape(-1, 2)
        arr = pairs.any(axis=1) if prefix.is_existential(name) else pairs.all(axis=1)
    return bool(arr[0])


def eval_qbf(p: Program, cap: int = DEFAULT_CAP) -> bool:
    _check_cap(p.prefix, cap)
    return _fold(p.prefix, truth_table(p.prefix, p.clauses))


def implies(p: Program, q: Program, cap: int = DEFAULT_CAP) -> bool:
    """Every model of ``p`` is a model of ``q`` (identical prefixes required).

    Folds two quantities together: whether some strategy keeps every path
    inside p, and whether some such strategy also lets a path escape q.
    """
    if p.prefix != q.prefix:
        raise PrefixMismatch("implication needs identical prefixes")
    _check_cap(p.prefix, cap)
    phi = truth_table(p.prefix, p.clauses)
    psi = truth_table(q.prefix, q.clauses)
    good, escape = phi, phi & ~psi
    for name in reversed(p.prefix.variables):
        g = good.reshape(-1, 2)
        e = escape.reshape(-1, 2)
        if p.prefix.is_existential(name):
            good, escape = g.any(axis=1), e.any(axis=1)
        else:
            good = g[:, 0] & g[:, 1]
            escape = (e[:, 0] & g[:, 1]) | (g[:, 0] & e[:, 1])
    return not bool(escape[0])


def equivalent(p: Program, q: Program, cap: int = DEFAULT_CAP) -> bool:
    return implies(p, q, cap) and implies(q, p, cap)


@dataclass(frozen=True)
class Strategy:
    """Existential choices keyed by (variable, values of all earlier variables).

    Only positions reachable under the strategy itself are recorded, so two
    strategies are equal exactly when they describe the same pre-model.
    """

    choices: tuple[tuple[tuple[str, tuple[bool, ...]], bool], ...]

    def as_dict(self) -> dict[tuple[str, tuple[bool, ...]], bool]:
        return dict(self.choices)

    def choice(self, var: str, earlier: Iterable[bool]) -> bool:
        return self.as_dict()[(var, tuple(bool(b) for b in earlier))]

    def __len__(self) -> int:
        return len(self.choices)


def enumerate_models(p: Program, cap: int = DEFAULT_CAP) -> list[Strategy]:
    n = _check_cap(p.prefix, cap)
    table = truth_table(p.prefix, p.clauses)
    names = p.prefix.variables

    def walk(k: int, index: int, path: tuple[bool, ...]) -> list[dict]:
        if k == n:
            return [{}] if table[index] else []
        name = names[k]
        branches = [walk(k + 1, (index << 1) | b, path + (bool(b),)) for b in (0, 1)]
        if p.prefix.is_existential(name):
            out = []
            for b, sub in enumerate(branches):
                for s in sub:
                    merged = dict(s)
                    merged[(name, path)] = bool(b)
                    out.append(merged)
            return out
        return [{**s0, **s1} for s0, s1 in itertools.product(*branches)]

    return [Strategy(tuple(sorted(m.items()))) for m in walk(0, 0, ())]


def satisfies(p: Program, strategy: Strategy | Mapping) -> bool:
    """Check that every path consistent with the strategy satisfies the matrix."""
    choices = strategy.as_dict() if isinstance(strategy, Strategy) else dict(strategy)
    names = p.prefix.variables
    table = truth_table(p.prefix, p.clauses)

    def walk(k: int, index: int, path: tuple[bool, ...]) -> bool:
        if k == len(names):
            return bool(table[index])
        name = names[k]
        if p.prefix.is_existential(name):
            key = (name, path)
            if key not in choices:
                return False
            b = choices[key]
            return walk(k + 1, (index << 1) | int(b), path + (b,))
        return all(walk(k + 1, (index << 1) | b, path + (bool(b),)) for b in (0, 1))

    return walk(0, 0, ())


def horn_quick_sat(p: Program) -> bool | None:
    """True when every clause is definite or no positive unit clause exists."""
    if not p.is_horn():
        raise NotHornError("quick check needs a Horn program")
    if all(c.head is not None for c in p.clauses):
        return True
    if not any(len(c) == 1 and c[0].positive for c in p.clauses):
        return True
    return None


def find_witness_goal(p: Program, cap: int = DEFAULT_CAP) -> int | None:
    """Index of a universal-head or goal clause that is false together with F∃."""
    if eval_qbf(p, cap):
        return None
    existential_heads = []
    candidates = []
    for i, c in enumerate(p.clauses):
        kind = classify_clause(p.prefix, c)
        if kind is ClauseKind.DEFINITE_EXISTENTIAL_HEAD:
            existential_heads.append(c)
        else:
            candidates.append(i)
    for i in candidates:
        if not eval_qbf(Program(p.prefix, tuple(existential_heads) + (p.clauses[i],)), cap):
            return i
    return None

