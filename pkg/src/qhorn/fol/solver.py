"""The five-state refutation procedure lifted to first-order Horn clauses.

Goal atoms play the role of existential variables. Each canonical goal
(predicate plus argument pattern, variables numbered by first occurrence and
tagged with their quantifier) owns one state and a list of answers. A goal
met again while its clauses are still being tested yields ``loop`` (first
pass) or ``inf`` with the answers found so far (second pass), exactly as in
the propositional procedure.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field

from ..linear import INF, LOOP, NO, YES, State, Verdict
from .terms import (
    Atom,
    Const,
    FOClause,
    FOProgram,
    FOQuery,
    Param,
    Substitution,
    Term,
    Var,
    compatible,
    compose,
    unify,
)

DEFAULT_MAX_ATOMS = 100_000
DEFAULT_MAX_STEPS = 1_000_000
DEFAULT_MAX_DEPTH = 2_000


class _Ceiling(Exception):
    pass


@dataclass
class _Entry:
    state: State
    answers: list[Atom] = field(default_factory=list)


@dataclass
class FOResult:
    verdict: Verdict
    final: State
    states: dict[str, State]
    steps: int
    program: FOProgram


def canonical(a: Atom) -> tuple[tuple, Atom]:
    """Variant key and the atom rewritten over canonical variables ``_0, _1, …``."""
    numbering: dict[Var, Var] = {}
    key: list[tuple] = []
    args: list[Term] = []
    for t in a.args:
        if isinstance(t, Var):
            if t not in numbering:
                numbering[t] = Var(f"_{len(numbering)}", t.quantifier)
            v = numbering[t]
            key.append(("v", v.name, t.quantifier.value))
            args.append(v)
        elif isinstance(t, Param):
            key.append(("p", t.name, t.quantifier.value))
            args.append(t)
        else:
            key.append(("c", t.name))
            args.append(t)
    return (a.pred, tuple(key)), Atom(a.pred, tuple(args))


def _key_text(key: tuple) -> str:
    pred, args = key
    parts = []
    for a in args:
        if a[0] == "v":
            parts.append(f"{a[1]}:{a[2]}")
        elif a[0] == "p":
            parts.append(f"{a[1]}*")
        else:
            parts.append(a[1])
    return f"{pred}({','.join(parts)})" if parts else pred


class _Solver:
    def __init__(self, program: FOProgram, max_atoms: int, max_steps: int, max_depth: int):
        self.program = program
        self.heads: dict[str, list[FOClause]] = {}
        for c in program.clauses:
            if c.head is not None:
                self.heads.setdefault(c.head.pred, []).append(c)
        self.memo: dict[tuple, _Entry] = {}
        self.fresh = itertools.count()
        self.steps = 0
        self.max_atoms = max_atoms
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.depth = 0

    def rename(self, c: FOClause) -> FOClause:
        k = next(self.fresh)
        s = {v: Var(f"{v.name}#{k}", v.quantifier) for v in c.prefix}
        return c.substitute(s)

    def instantiate(self, a: Atom, answers: list[Atom]) -> list[Substitution]:
        out = []
        for ans in answers:
            k = next(self.fresh)
            fresh = {v: Var(f"{v.name}#{k}", v.quantifier) for v in ans.variables()}
            theta = unify(a, ans.substitute(fresh))
            if theta is not None:
                out.append(theta)
        return out

    def solve(self, a: Atom) -> tuple[State, list[Substitution]]:
        key, canon = canonical(a)
        entry = self.memo.get(key)
        if entry is not None:
            if entry.state is LOOP:
                return LOOP, []
            return entry.state, self.instantiate(a, entry.answers)
        if len(self.memo) >= self.max_atoms or self.depth >= self.max_depth:
            return LOOP, []
        entry = _Entry(LOOP)
        self.memo[key] = entry
        clauses = self.heads.get(a.pred, [])
        self.depth += 1
        try:
            state = NO
            i = 0
            while i < len(clauses):
                r = self.test_clause(canon, clauses[i], entry)
                i += 1
                if r is NO:
                    continue
                if r is not YES:
                    state = r
                    break
                entry.state = INF
                infflag = False
                while not infflag and i < len(clauses):
                    r = self.test_clause(canon, clauses[i], entry)
                    i += 1
                    infflag = r is LOOP or r is INF
                state = INF if infflag else YES
                break
        finally:
            self.depth -= 1
        entry.state = state
        if state is NO or state is LOOP:
            return state, []
        return state, self.instantiate(a, entry.answers)

    def test_clause(self, goal: Atom, clause: FOClause, entry: _Entry) -> State:
        self.steps += 1
        if self.steps > self.max_steps:
            raise _Ceiling()
        c = self.rename(clause)
        if not compatible(goal, c.head):
            return NO
        theta = unify(goal, c.head)
        if theta is None:
            return NO
        r, subs = self.conj(c.body, theta)
        if r is YES or r is INF:
            for s in subs:
                ans = goal.substitute(s)
                if ans not in entry.answers:
                    entry.answers.append(ans)
        return r

    def conj(self, atoms: tuple[Atom, ...], sigma: Substitution) -> tuple[State, list[Substitution]]:
        """TestClause over a body under ``sigma``; branches follow answer order."""
        if not atoms:
            return YES, [sigma]
        first = atoms[0].substitute(sigma)
        s, thetas = self.solve(first)
        if s is NO or s is LOOP or not thetas:
            return (NO if s is not LOOP else LOOP), []
        infflag = s is INF
        # fold the branches like the clauses of one Refutation call
        combined = NO
        out: list[Substitution] = []
        phase = 1
        for theta in thetas:
            r, subs = self.conj(atoms[1:], compose(sigma, theta))
            if r is YES or r is INF:
                out.extend(subs)
            if phase == 1:
                if r is NO:
                    continue
                if r is not YES:
                    combined = r
                    break
                combined = YES
                phase = 2
            elif r is LOOP or r is INF:
                combined = INF
                break
        if combined is YES or combined is INF:
            return (INF if infflag or combined is INF else YES), out
        if combined is LOOP:
            return LOOP, []
        return (LOOP if infflag else NO), []


def _rigid(q: FOQuery) -> dict[Var, Term]:
    return {v: Param(v.name.lower(), v.quantifier) for v in q.prefix}


def build_fo_refutation_input(p: FOProgram, q: FOQuery) -> tuple[FOProgram, tuple[Atom, ...]]:
    """Facts from the query body go first; the goal is the query head (or body)."""
    if q.goal:
        return p, q.body
    s = _rigid(q)
    facts = tuple(FOClause((), b.substitute(s), ()) for b in q.body)
    return FOProgram(facts + p.clauses), (q.head.substitute(s),)


def fol_output(
    p: FOProgram,
    q: FOQuery,
    max_atoms: int = DEFAULT_MAX_ATOMS,
    max_steps: int = DEFAULT_MAX_STEPS,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> FOResult:
    program, goal = build_fo_refutation_input(p, q)
    solver = _Solver(program, max_atoms, max_steps, max_depth)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10 * max_depth + 1000))
    try:
        if len(goal) == 1 and not q.goal:
            state, _ = solver.solve(goal[0])
        else:
            state, _ = solver.conj(goal, {})
    except _Ceiling:
        state = LOOP
    finally:
        sys.setrecursionlimit(old_limit)
    verdict = Verdict.YES if state in (YES, INF) else Verdict.LOOP if state is LOOP else Verdict.NO
    states = {_key_text(k): e.state for k, e in solver.memo.items()}
    return FOResult(verdict, state, states, solver.steps, program)


def constants_of(p: FOProgram, q: FOQuery | None = None) -> list[str]:
    names: dict[str, None] = {}
    clauses = list(p.clauses) + ([q.clause()] if q is not None else [])
    for c in clauses:
        for a in c.atoms():
            for t in a.args:
                if isinstance(t, Const):
                    names.setdefault(t.name, None)
    return list(names)
