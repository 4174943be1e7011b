"""Terms, atoms, substitutions and unification for the first-order Horn mode.

Terms are variables or constants only, so unification always terminates and
the occurs check never fires. ``Param`` is a rigid symbol standing for a
query variable: it unifies like a constant but remembers its quantifier.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..errors import ArityMismatch, DeclarationError
from ..formula import EXISTS, FORALL, Quantifier


@dataclass(frozen=True)
class Var:
    name: str
    quantifier: Quantifier = FORALL

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Param:
    name: str
    quantifier: Quantifier = FORALL

    def __str__(self) -> str:
        return f"{self.name}*"


Term = Var | Const | Param
Substitution = dict[Var, Term]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> list[Var]:
        seen: dict[Var, None] = {}
        for t in self.args:
            if isinstance(t, Var):
                seen.setdefault(t, None)
        return list(seen)

    def is_ground(self) -> bool:
        return not any(isinstance(t, Var) for t in self.args)

    def substitute(self, s: Mapping[Var, Term]) -> "Atom":
        if not s:
            return self
        return Atom(self.pred, tuple(s.get(t, t) if isinstance(t, Var) else t for t in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class FOClause:
    """``prefix : head :- body``; ``head`` is None for a goal clause."""

    prefix: tuple[Var, ...]
    head: Atom | None
    body: tuple[Atom, ...] = ()

    def __post_init__(self):
        declared = set(self.prefix)
        for atom in self.atoms():
            for v in atom.variables():
                if v not in declared:
                    raise DeclarationError(f"variable {v.name} is not quantified in its clause")

    def atoms(self) -> list[Atom]:
        return ([self.head] if self.head is not None else []) + list(self.body)

    def substitute(self, s: Mapping[Var, Term]) -> "FOClause":
        return apply_substitution(self, s)

    def __str__(self) -> str:
        head = "" if self.head is None else str(self.head)
        text = head
        if self.body:
            text = (head + " " if head else "") + ":- " + ", ".join(map(str, self.body))
        return f"{render_fo_prefix(self.prefix)}{text}"


def render_fo_prefix(prefix: Iterable[Var]) -> str:
    parts: list[str] = []
    last = None
    for v in prefix:
        if v.quantifier is not last:
            parts.append(str(v.quantifier))
            last = v.quantifier
        parts.append(v.name)
    return " ".join(parts) + " : " if parts else ""


@dataclass(frozen=True)
class FOProgram:
    clauses: tuple[FOClause, ...] = ()
    arities: dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arities: dict[str, int] = {}
        for c in self.clauses:
            for atom in c.atoms():
                known = arities.setdefault(atom.pred, atom.arity)
                if known != atom.arity:
                    raise ArityMismatch(
                        f"predicate {atom.pred} used with arity {atom.arity} and {known}"
                    )
        object.__setattr__(self, "arities", arities)

    def __len__(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class FOQuery:
    """A definite query ``? prefix : head :- body.`` or a goal query ``?- body.``."""

    prefix: tuple[Var, ...]
    head: Atom | None
    body: tuple[Atom, ...] = ()
    goal: bool = False

    def __post_init__(self):
        FOClause(self.prefix, self.head, self.body)

    def clause(self) -> FOClause:
        return FOClause(self.prefix, self.head, self.body)


def _walk(t: Term, s: Mapping[Var, Term]) -> Term:
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def unify(a: Atom, b: Atom, s: Mapping[Var, Term] | None = None) -> Substitution | None:
    """Most general unifier of two atoms, or None.

    The result is idempotent: every bound variable maps to a term that is
    not itself bound.
    """
    if a.pred != b.pred or a.arity != b.arity:
        return None
    acc: dict[Var, Term] = dict(s or {})
    for x, y in zip(a.args, b.args):
        x, y = _walk(x, acc), _walk(y, acc)
        if x == y:
            continue
        if isinstance(x, Var):
            acc[x] = y
        elif isinstance(y, Var):
            acc[y] = x
        else:
            return None
    return {v: _walk(v, acc) for v in acc if _walk(v, acc) != v}


def apply_substitution(c: FOClause, s: Mapping[Var, Term]) -> FOClause:
    if not s:
        return c
    head = c.head.substitute(s) if c.head is not None else None
    body = tuple(atom.substitute(s) for atom in c.body)
    # variables renamed to other variables stay quantified; bound ones disappear
    prefix: list[Var] = []
    for v in c.prefix:
        t = s.get(v, v)
        if isinstance(t, Var) and t not in prefix:
            prefix.append(t)
    return FOClause(tuple(prefix), head, body)


def compose(s: Mapping[Var, Term], t: Mapping[Var, Term]) -> Substitution:
    """Apply ``s`` then ``t``."""
    out: dict[Var, Term] = {}
    for v, term in s.items():
        r = t.get(term, term) if isinstance(term, Var) else term
        if r != v:
            out[v] = r
    for v, term in t.items():
        if v not in s and term != v:
            out[v] = term
    return out


def term_quantifier(t: Term) -> Quantifier:
    if isinstance(t, (Var, Param)):
        return t.quantifier
    return EXISTS


def compatible(query_atom: Atom, rule_atom: Atom) -> bool:
    """Quantifier compatibility of a goal atom with a rule head.

    Position i is fine when the rule argument is universal, or when both
    arguments are existential. Rule-side constants and rigid parameters
    restrict nothing; query-side constants count as existential.
    """
    if query_atom.pred != rule_atom.pred or query_atom.arity != rule_atom.arity:
        raise ArityMismatch(f"cannot compare {query_atom} with {rule_atom}")
    for x, y in zip(query_atom.args, rule_atom.args):
        if not isinstance(y, Var) or y.quantifier is FORALL:
            continue
        if term_quantifier(x) is not EXISTS:
            return False
    return True
