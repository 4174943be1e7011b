"""Linear-time evaluation of ``output(P, C)`` with the five-state machine.

Each existential variable moves from ``new`` to a final state at most once
per call, and each clause is tested at most once, so the work is linear in
the size of the program plus the query. Recursion is run on an explicit
stack so deep chains (hundreds of thousands of clauses) need no Python
recursion and little memory per frame.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import Clause, DefiniteQuery, Literal, Prefix, Program, Query
from .sldq import build_refutation_input


class State(enum.Enum):
    NEW = "new"
    YES = "yes"
    NO = "no"
    LOOP = "loop"
    INF = "inf"

    def __str__(self) -> str:
        return self.value


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    LOOP = "loop"

    def __str__(self) -> str:
        return self.value


class BlockStatus(enum.Enum):
    BLOCKED_YES = "blocked"
    BLOCKED_NO = "free"


NEW, YES, NO, LOOP, INF = State.NEW, State.YES, State.NO, State.LOOP, State.INF
_SUCCESS = (YES, INF)


@dataclass
class WorkCounter:
    literal_visits: int = 0
    clause_tests: int = 0

    @property
    def total(self) -> int:
        return self.literal_visits + self.clause_tests


@dataclass
class LinearResult:
    verdict: Verdict
    program: Program
    final: State
    table: list
    transitions: list[tuple[str, State, State]] = field(default_factory=list)

    @property
    def states(self) -> dict[str, State]:
        """Final state of every existential of the refuted program, prefix order."""
        names = self.program.prefix.variables
        return {names[i]: s for i, s in enumerate(self.table) if s is not None}

    def dump(self) -> str:
        return format_states(self.states)


def format_states(states: Mapping[str, State]) -> str:
    return "\n".join(f"{v} = {s}" for v, s in states.items())


def comp_block(u: str, c: Iterable[Literal], states: Mapping[str, State], prefix: Prefix) -> BlockStatus:
    """Blocked iff an existential literal right of ``u`` in ``c`` is no or loop."""
    pu = prefix.position(u)
    for lit in c:
        if prefix.is_existential(lit.var) and prefix.position(lit.var) > pu:
            if states.get(lit.var, NEW) in (NO, LOOP):
                return BlockStatus.BLOCKED_YES
    return BlockStatus.BLOCKED_NO


def _blocked(u: int, body: tuple[int, ...], table: list) -> bool:
    for v in body:
        if v > u and table[v] in (NO, LOOP):
            return True
    return False


class _Machine:
    """Refutation and TestClause on an explicit stack.

    The current Refutation frame (``rvar, rbodies, ri, rphase``) and the
    current TestClause frame (``body, k, result, infflag, deferred``) live in
    local variables; descending into a new variable saves both as nine flat
    stack entries. This keeps deep chains cheap in time and memory.
    """

    def __init__(self, p: Program, counter: WorkCounter | None, record: bool):
        self.p = p
        self.index = index = p.head_index
        self.counter = counter if counter is not None else WorkCounter()
        # universal positions hold None and are never consulted
        self.table: list = [None if u else NEW for u in index.universal]
        self.record = record
        self.transitions: list[tuple[str, State, State]] = []

    def position(self, var: str) -> int:
        return self.p.prefix.position(var)

    def _note(self, v: int, s: State) -> None:
        self.transitions.append((self.index.names[v], self.table[v], s))

    def solve(self, var: str) -> State:
        v = self.position(var)
        s = self.table[v]
        if s is not NEW:
            return s
        hb = self.index.bodies[v]
        if self.record:
            self._note(v, LOOP if hb else NO)
        if not hb:
            self.table[v] = NO
            return NO
        self.table[v] = LOOP
        return self.run(v, hb)

    def solve_virtual(self, bodies: Sequence[tuple[int, ...]]) -> State:
        if not bodies:
            return NO
        return self.run(-1, bodies)

    def run(self, rvar: int, rbodies) -> State:
        universal = self.index.universal
        bodies = self.index.bodies
        record = self.record
        table = self.table
        stack: list = []
        visits = 0
        clause_tests = 1
        ri, rphase = 0, 1
        body, k, result, infflag, deferred = rbodies[0], 0, YES, False, None
        while True:
            # TestClause: walk the body left to right, deferring universals
            done = result is not YES and result is not INF
            descended = False
            while not done and k < len(body):
                v = body[k]
                k += 1
                visits += 1
                if universal[v]:
                    if deferred is None:
                        deferred = []
                    deferred.append(v)
                    continue
                r = table[v]
                if r is NEW:
                    hb = bodies[v]
                    if record:
                        self._note(v, LOOP if hb else NO)
                    if hb:
                        table[v] = LOOP
                        stack.extend((rvar, rbodies, ri, rphase, body, k, result, infflag, deferred))
                        rvar, rbodies, ri, rphase = v, hb, 0, 1
                        body, k, result, infflag, deferred = hb[0], 0, YES, False, None
                        clause_tests += 1
                        descended = True
                        break
                    table[v] = r = NO
                result = r
                if r is INF:
                    infflag = True
                done = r is not YES and r is not INF
            if descended:
                continue

            while True:
                # the clause is finished: map it to state(x, C)
                if result in _SUCCESS and deferred:
                    for u in deferred:
                        if _blocked(u, body, table):
                            result = NO
                            break
                if result is YES or result is INF:
                    ret = INF if infflag else YES
                elif result is LOOP:
                    ret = LOOP
                else:
                    ret = LOOP if infflag else NO

                # Refutation: fold state(x, C) into state(x)
                final = None
                if rphase == 1:
                    if ret is NO:
                        ri += 1
                        if ri >= len(rbodies):
                            final = NO
                    elif ret is not YES:
                        final = ret
                    else:
                        rphase = 2
                        if rvar >= 0:
                            if record:
                                self._note(rvar, INF)
                            table[rvar] = INF
                        ri += 1
                        if ri >= len(rbodies):
                            final = YES
                else:
                    ri += 1
                    if ret is LOOP or ret is INF:
                        final = INF
                    elif ri >= len(rbodies):
                        final = YES
                if final is None:
                    body, k, result, infflag, deferred = rbodies[ri], 0, YES, False, None
                    clause_tests += 1
                    break
                if rvar >= 0:
                    if record:
                        self._note(rvar, final)
                    table[rvar] = final
                if not stack:
                    self.counter.literal_visits += visits
                    self.counter.clause_tests += clause_tests
                    return final
                rvar, rbodies, ri, rphase, body, k, result, infflag, deferred = stack[-9:]
                del stack[-9:]
                result = final
                if final is INF:
                    infflag = True
                if final is YES or final is INF:
                    break


def _verdict(s: State) -> Verdict:
    if s in _SUCCESS:
        return Verdict.YES
    return Verdict.LOOP if s is LOOP else Verdict.NO


def output(
    p: Program, q: Query, counter: WorkCounter | None = None, record: bool = False
) -> LinearResult:
    """Decide whether the program implies the query clause: yes, no or loop."""
    program, top = build_refutation_input(p, q)
    m = _Machine(program, counter, record)
    if isinstance(q, DefiniteQuery) and q.head is not None:
        s = m.solve(q.head)
    elif top is not None:
        s = m.solve_virtual([tuple(m.position(lit.var) for lit in top)])
    else:
        s = m.solve_virtual(m.index.goals)
    return LinearResult(_verdict(s), program, s, m.table, m.transitions)


def refutation_state(p: Program, x: str, counter: WorkCounter | None = None) -> State:
    """state(x) computed over ``p`` with every state starting new."""
    return _Machine(p, counter, False).solve(x)


def solve_states(p: Program, xs: Sequence[str]) -> dict[str, State]:
    """Run Refutation on each variable in turn, sharing one state table."""
    m = _Machine(p, None, False)
    for x in xs:
        m.solve(x)
    names = p.prefix.variables
    return {names[i]: s for i, s in enumerate(m.table) if s is not None}


def test_clause(p: Program, c: Clause, states: Mapping[str, State] | None = None) -> State:
    """state(head, c) given a starting state table (default: all new)."""
    m = _Machine(p, None, False)
    for var, s in (states or {}).items():
        m.table[m.position(var)] = s
    return m.solve_virtual([tuple(m.position(lit.var) for lit in c.body)])


test_clause.__test__ = False  # keep pytest from collecting it
