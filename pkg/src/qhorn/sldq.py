"""SLD-Q resolution over clauses-as-lists.

Goal lists keep duplicate literals. A resolution step on pivot ``x`` joins the
body of the side clause (whose head is ``x``) in front of the rest of the
goal; universal reduction drops every universal literal that has no
existential literal to its right in the prefix order.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    CapExceeded,
    NewVariableError,
    PivotMismatch,
    RangeError,
    UniversalPivot,
)
from .formula import (
    EXISTS,
    Clause,
    GoalQuery,
    Literal,
    Prefix,
    Program,
    Query,
    pos,
    render_clause,
)

DEFAULT_BUDGET = 10_000


def max_level(prefix: Prefix, c: Clause | Query) -> int:
    if isinstance(c, Clause):
        names = [lit.var for lit in c]
    else:
        names = [v for v in c.variables() if v is not None]
    return max((prefix.level(v) for v in names), default=0)


def build_abstraction(p: Program, i: int) -> Program:
    """Collapse the first ``i`` blocks into one existential block."""
    if not 0 <= i <= p.prefix.depth:
        raise RangeError(f"abstraction level {i} outside 0..{p.prefix.depth}")
    if i == 0 or (i == 1 and p.prefix.blocks[0][0] is EXISTS):
        return p
    merged = [v for _, names in p.prefix.blocks[:i] for v in names]
    blocks = [(EXISTS, merged)] + list(p.prefix.blocks[i:])
    return Program(Prefix(blocks), p.clauses)


def build_refutation_input(p: Program, q: Query) -> tuple[Program, Clause | None]:
    """The program to refute and its top goal.

    For ``? x :- x1..xn`` the first ``i`` blocks are abstracted (``i`` the
    query's maximum level) and the unit facts ``x1..xn`` are placed ahead of
    the program clauses; the top goal is ``<- x``. A headless definite query
    has no single top goal, so None is returned and the goal clauses of the
    result are the candidates. Goal queries leave the program untouched.
    """
    missing = [v for v in q.variables() if v is not None and v not in p.prefix]
    if missing:
        raise NewVariableError(f"query variables {missing} do not occur in the program")
    if isinstance(q, GoalQuery):
        return p, Clause.goal(*q.body)
    i = max_level(p.prefix, q)
    abstracted = build_abstraction(p, i)
    if not q.body:
        program = abstracted
    else:
        facts = tuple(Clause((pos(b),)) for b in q.body)
        program = Program(abstracted.prefix, facts + p.clauses)
    top = None if q.head is None else Clause.goal(q.head)
    return program, top


def resolve_prolog(center: Clause, side: Clause, prefix: Prefix | None = None) -> Clause:
    """Resolve on the first literal of ``center`` against the head of ``side``."""
    if not center or center[0].positive:
        raise PivotMismatch("centre clause must start with a negative literal")
    pivot = center[0].var
    if not side or not side[0].positive or side[0].var != pivot:
        raise PivotMismatch(f"side clause does not start with head {pivot}")
    if prefix is not None and prefix.is_universal(pivot):
        raise UniversalPivot(f"cannot resolve on universal variable {pivot}")
    return Clause(side.literals[1:] + center.literals[1:])


def unblocked_universals(c: Iterable[Literal], prefix: Prefix) -> set[str]:
    lits = list(c)
    rightmost = max((prefix.position(l.var) for l in lits if prefix.is_existential(l.var)), default=-1)
    return {l.var for l in lits if prefix.is_universal(l.var) and prefix.position(l.var) > rightmost}


def forall_reduce(c: Clause, prefix: Prefix) -> Clause:
    drop = unblocked_universals(c, prefix)
    if not drop:
        return c
    return Clause(tuple(l for l in c if l.var not in drop))


@dataclass(frozen=True)
class ResolveStep:
    side_index: int
    pivot: str
    goal: Clause


@dataclass(frozen=True)
class ForallReduceStep:
    var: str
    goal: Clause


Step = ResolveStep | ForallReduceStep


@dataclass(frozen=True)
class Derivation:
    top_goal: Clause
    steps: tuple[Step, ...] = ()

    @property
    def final(self) -> Clause:
        return self.steps[-1].goal if self.steps else self.top_goal

    def goals(self) -> list[Clause]:
        return [self.top_goal] + [s.goal for s in self.steps]

    def is_refutation(self) -> bool:
        return len(self.final) == 0

    def resolution_count(self) -> int:
        return sum(isinstance(s, ResolveStep) for s in self.steps)


def format_trace(d: Derivation) -> str:
    lines = [render_clause(d.top_goal)]
    for s in d.steps:
        if isinstance(s, ResolveStep):
            lines.append(f"R {s.side_index} on {s.pivot}: {render_clause(s.goal)}")
        else:
            lines.append(f"U {s.var}: {render_clause(s.goal)}")
    return "\n".join(lines)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    reason: str = ""
    step: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def _reduce_steps(c: Clause, prefix: Prefix) -> list[ForallReduceStep]:
    steps = []
    for var in sorted(unblocked_universals(c, prefix), key=prefix.position, reverse=True):
        c = Clause(tuple(l for l in c if l.var != var))
        steps.append(ForallReduceStep(var, c))
    return steps


def check_derivation(p: Program, d: Derivation, top: Clause | None = None) -> CheckResult:
    """Validate every step of ``d`` against ``p``.

    The top clause must be the supplied ``top`` or a clause of ``p`` without
    an existential positive literal. Resolution steps are compared as
    multisets, so any pivot position is accepted.
    """
    prefix = p.prefix
    current = d.top_goal
    for lit in current:
        if lit.var not in prefix:
            return CheckResult(False, f"top clause mentions undeclared {lit.var}", 0)
    if any(l.positive and prefix.is_existential(l.var) for l in current):
        return CheckResult(False, "top clause has an existential positive literal", 0)
    if top is not None:
        if Counter(top.literals) != Counter(current.literals):
            return CheckResult(False, "top clause differs from the expected top goal", 0)
    elif current not in p.clauses:
        return CheckResult(False, "top clause is not a clause of the program", 0)

    for n, step in enumerate(d.steps, start=1):
        if isinstance(step, ResolveStep):
            if not 0 <= step.side_index < len(p.clauses):
                return CheckResult(False, f"side index {step.side_index} out of range", n)
            if step.pivot not in prefix:
                return CheckResult(False, f"pivot {step.pivot} undeclared", n)
            if prefix.is_universal(step.pivot):
                return CheckResult(False, f"pivot {step.pivot} is universal", n)
            side = p.clauses[step.side_index]
            head = side.head
            if head is None or head.var != step.pivot or not side.is_horn():
                return CheckResult(False, f"side clause {step.side_index} has no head {step.pivot}", n)
            pivot_lit = Literal(step.pivot, False)
            have = Counter(current.literals)
            if have[pivot_lit] == 0:
                return CheckResult(False, f"goal has no literal -{step.pivot}", n)
            have[pivot_lit] -= 1
            have.update(side.body)
            if +have != Counter(step.goal.literals):
                return CheckResult(False, "resolvent does not match", n)
        else:
            if step.var not in prefix or not prefix.is_universal(step.var):
                return CheckResult(False, f"{step.var} is not universal", n)
            if step.var not in current.variables():
                return CheckResult(False, f"{step.var} does not occur in the goal", n)
            if step.var not in unblocked_universals(current, prefix):
                return CheckResult(False, f"{step.var} is blocked", n)
            expected = Counter(l for l in current if l.var != step.var)
            if expected != Counter(step.goal.literals):
                return CheckResult(False, "reduced clause does not match", n)
        if any(l.positive and prefix.is_existential(l.var) for l in step.goal):
            return CheckResult(False, "intermediate clause is not a goal clause", n)
        current = step.goal
    return CheckResult(True)


@dataclass(frozen=True)
class Found:
    derivation: Derivation


@dataclass(frozen=True)
class NotFound:
    pass


@dataclass(frozen=True)
class BudgetExhausted:
    partial: Derivation


SearchOutcome = Found | NotFound | BudgetExhausted


def _head_index(p: Program) -> dict[str, list[int]]:
    heads: dict[str, list[int]] = {}
    for i, c in enumerate(p.clauses):
        h = c.head
        if h is not None and p.prefix.is_existential(h.var):
            heads.setdefault(h.var, []).append(i)
    return heads


def first_existential(goal: Clause, prefix: Prefix) -> int | None:
    for i, lit in enumerate(goal):
        if prefix.is_existential(lit.var):
            return i
    return None


def _expand(p: Program, goal: Clause, at: int, side_index: int) -> list[Step]:
    """Resolve ``goal[at]`` with a side clause, then reduce eagerly."""
    side = p.clauses[side_index]
    rest = goal.literals[:at] + goal.literals[at + 1:]
    resolvent = Clause(side.body + rest)
    steps: list[Step] = [ResolveStep(side_index, goal[at].var, resolvent)]
    steps.extend(_reduce_steps(resolvent, p.prefix))
    return steps


PARTIAL_STEPS = 200


def _replay(p: Program, goal: Clause, records: Sequence[tuple[int, int]]) -> Derivation:
    """Rebuild full goal lists from (pivot position, side index) records."""
    steps: list[Step] = list(_reduce_steps(goal, p.prefix))
    current = steps[-1].goal if steps else goal
    for at, idx in records:
        more = _expand(p, current, at, idx)
        steps.extend(more)
        current = more[-1].goal
    return Derivation(goal, tuple(steps))


def search_recursive(p: Program, goal: Clause, budget: int = DEFAULT_BUDGET) -> SearchOutcome:
    """Depth-first, clause-order search on the first existential literal.

    Goals are linked lists of literal codes (``2 * position + sign``) whose
    cells also carry the largest existential and universal position of
    their tail, so a resolution step shares the old tail and costs only the
    length of the side clause. Readable goals are rebuilt only for the
    derivation that is returned; a budget-exhausted branch keeps its first
    ``PARTIAL_STEPS`` resolutions.
    """
    prefix = p.prefix
    universal = [prefix.is_universal(v) for v in prefix.variables]
    heads = _head_index(p)
    cands_of = [heads.get(v, []) for v in prefix.variables]
    bodies = [tuple(2 * prefix.position(l.var) + l.positive for l in c.body) for c in p.clauses]

    def cons(code: int, rest: tuple | None) -> tuple:
        v = code >> 1
        mx, mu = (-1, -1) if rest is None else (rest[2], rest[3])
        if universal[v]:
            mu = v if v > mu else mu
        else:
            mx = v if v > mx else mx
        return (code, rest, mx, mu)

    def build(codes: Sequence[int]) -> tuple | None:
        node = None
        for code in reversed(codes):
            node = cons(code, node)
        return node

    def reduce(node: tuple | None) -> tuple | None:
        if node is None or node[3] <= node[2]:
            return node
        mx = node[2]
        codes = []
        # only walk as far as the tail still holds an unblocked universal
        while node is not None and node[3] > mx:
            codes.append(node[0])
            node = node[1]
        for code in reversed(codes):
            if not (universal[code >> 1] and code >> 1 > mx):
                node = cons(code, node)
        return node

    def frame(node: tuple) -> list:
        skipped = []
        while universal[node[0] >> 1]:
            skipped.append(node[0])
            node = node[1]
        return [node, skipped, cands_of[node[0] >> 1], 0]

    def path(stack: list) -> list[tuple[int, int]]:
        return [(len(f[1]), f[2][f[3] - 1]) for f in stack]

    start = reduce(build([2 * prefix.position(l.var) + l.positive for l in goal]))
    if start is None:
        return Found(_replay(p, goal, []))
    stack = [frame(start)]
    used = 0
    while stack:
        f = stack[-1]
        cands = f[2]
        if f[3] >= len(cands):
            stack.pop()
            continue
        idx = cands[f[3]]
        f[3] += 1
        used += 1
        if used > budget:
            return BudgetExhausted(_replay(p, goal, path(stack[:-1])[:PARTIAL_STEPS]))
        rest = f[0][1]
        for code in reversed(f[1]):
            rest = cons(code, rest)
        for code in reversed(bodies[idx]):
            rest = cons(code, rest)
        new = reduce(rest)
        if new is None:
            return Found(_replay(p, goal, path(stack)))
        stack.append(frame(new))
    return NotFound()


def exhaustive_search(
    p: Program, goal: Clause, depth_cap: int = 25, cap: int = 20, max_states: int = 200_000
) -> Derivation | None:
    """Breadth-first search over every pivot position and side clause.

    Goals are deduplicated as multisets; ``depth_cap`` bounds the number of
    resolution steps.
    """
    prefix = p.prefix
    if len(prefix) > cap:
        raise CapExceeded(f"{len(prefix)} variables exceed the search cap of {cap}")
    heads = _head_index(p)
    init = _reduce_steps(goal, prefix)
    start = init[-1].goal if init else goal
    if not start:
        return Derivation(goal, tuple(init))

    def key(c: Clause):
        return tuple(sorted(c.literals))

    parents: dict[tuple, tuple[tuple | None, list[Step]]] = {key(start): (None, init)}
    frontier = deque([start])
    for _ in range(depth_cap):
        nxt: deque[Clause] = deque()
        for g in frontier:
            seen_pivots = set()
            for at, lit in enumerate(g):
                if lit.positive or not prefix.is_existential(lit.var) or lit.var in seen_pivots:
                    continue
                seen_pivots.add(lit.var)
                for idx in heads.get(lit.var, []):
                    steps = _expand(p, g, at, idx)
                    new = steps[-1].goal
                    k = key(new)
                    if k in parents:
                        continue
                    parents[k] = (key(g), steps)
                    if not new:
                        chain: list[Step] = []
                        cur: tuple | None = k
                        while cur is not None:
                            prev, st = parents[cur]
                            chain[:0] = st
                            cur = prev
                        return Derivation(goal, tuple(chain))
                    if len(parents) > max_states:
                        raise CapExceeded(f"more than {max_states} goals explored")
                    nxt.append(new)
        if not nxt:
            return None
        frontier = nxt
    return None


def refute_program(p: Program, depth_cap: int = 25, cap: int = 20) -> Derivation | None:
    """Try every goal clause and every universal-head clause as the top clause."""
    for c in p.clauses:
        h = c.head
        if h is not None and p.prefix.is_existential(h.var):
            continue
        d = exhaustive_search(p, c, depth_cap, cap)
        if d is not None:
            return d
    return None


@dataclass
class TreeNode:
    goal: Clause
    children: list[tuple[str, "TreeNode"]] = field(default_factory=list)
    status: str = "open"  # open, empty, loop, fail, cut


@dataclass
class RefutationTree:
    root: TreeNode

    def nodes(self) -> list[TreeNode]:
        out, stack = [], [self.root]
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(child for _, child in reversed(n.children))
        return out

    @classmethod
    def from_derivations(cls, derivations: Sequence[Derivation]) -> "RefutationTree":
        """Merge derivations sharing a top goal into one tree (common prefixes shared)."""
        if not derivations:
            raise ValueError("no derivations to merge")
        root = TreeNode(derivations[0].top_goal)
        for d in derivations:
            if d.top_goal != root.goal:
                raise ValueError("derivations start from different goals")
            node = root
            for s in d.steps:
                label = str(s.side_index) if isinstance(s, ResolveStep) else "∀-Red"
                match = next((c for lab, c in node.children if lab == label and c.goal == s.goal), None)
                if match is None:
                    match = TreeNode(s.goal)
                    node.children.append((label, match))
                node = match
            if not node.goal:
                node.status = "empty"
        return cls(root)


def refutation_tree(p: Program, goal: Clause, max_nodes: int = 1000) -> RefutationTree:
    """Expand every side clause of the first existential literal.

    A goal equal to one of its ancestors becomes a loop leaf; a goal with no
    matching clause is a failure leaf.
    """
    prefix = p.prefix
    heads = _head_index(p)
    root = TreeNode(goal)
    count = 1
    todo: list[tuple[TreeNode, tuple[tuple, ...]]] = [(root, ())]
    while todo:
        node, ancestors = todo.pop()
        node_goal = node.goal
        for s in _reduce_steps(node_goal, prefix):
            child = TreeNode(s.goal)
            node.children.append(("∀-Red", child))
            count += 1
            node = child
        g = node.goal
        if not g:
            node.status = "empty"
            continue
        if g.literals in ancestors:
            node.status = "loop"
            continue
        at = first_existential(g, prefix)
        cands = heads.get(g[at].var, [])
        if not cands:
            node.status = "fail"
            continue
        if count >= max_nodes:
            node.status = "cut"
            continue
        lineage = ancestors + (g.literals,)
        for idx in cands:
            side = p.clauses[idx]
            child = TreeNode(Clause(side.body + g.literals[:at] + g.literals[at + 1:]))
            node.children.append((str(idx), child))
            count += 1
            todo.append((child, lineage))
    return RefutationTree(root)
