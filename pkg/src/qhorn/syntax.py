"""Reader and printer for ``.qhp`` source text.

Propositional mode::

    % comment
    prefix exists a b; forall u; exists c.
    a :- u, c.
    c.
    :- a, b.
    ? a :- b.
    ?- a, c.

First-order mode starts with ``#mode fol``. Clauses carry their own prefix
(``forall X exists Y : p(X,Y) :- q(X).``); uppercase identifiers are
variables, lowercase ones constants. A clause without a prefix quantifies
all its variables universally.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DeclarationError, NotHornError, ParseError
from .fol.terms import Atom, Const, FOClause, FOProgram, FOQuery, Term, Var
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
)

PROPOSITIONAL = "propositional"
FIRST_ORDER = "fol"

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<nl>\n)"
    r"|(?P<comment>%[^\n]*)"
    r"|(?P<directive>\#[A-Za-z_]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>:-|\?-|[?.,;:()])"
)

_KEYWORDS = {"prefix", "exists", "forall"}
_QUANTIFIER_WORDS = {"exists": EXISTS, "forall": FORALL}


@dataclass(frozen=True)
class Token:
    kind: str  # ident, punct, directive, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ident", "punct", "directive"):
            tokens.append(Token(kind, m.group(), line, i - line_start + 1))
        i = m.end()
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


@dataclass
class SourceUnit:
    """Everything a ``.qhp`` file declares."""

    mode: str
    program: Program | FOProgram
    queries: list[Query | FOQuery] = field(default_factory=list)

    @property
    def query(self) -> Query | FOQuery | None:
        return self.queries[-1] if self.queries else None


class _Parser:
    def __init__(self, text: str, allow_non_horn: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_non_horn = allow_non_horn
        self.mode = PROPOSITIONAL

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "directive") and self.tok.text == text

    def at_word(self, word: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text == word

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def name(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident" or self.tok.text in _KEYWORDS:
            raise self.error(f"expected {what}")
        return self.advance()

    # top level

    def parse_unit(self) -> SourceUnit:
        blocks: list[tuple[Quantifier, list[str]]] | None = None
        clauses: list[tuple[Clause, Token]] = []
        fo_clauses: list[FOClause] = []
        queries: list[tuple[object, Token]] = []
        seen_item = False
        while self.tok.kind != "eof":
            start = self.tok
            if self.tok.kind == "directive":
                if self.tok.text != "#mode":
                    raise self.error("unknown directive")
                if seen_item:
                    raise self.error("#mode must come before any declaration")
                self.advance()
                word = self.name("mode name")
                if word.text in ("fol", "first_order"):
                    self.mode = FIRST_ORDER
                elif word.text in ("prop", "propositional"):
                    self.mode = PROPOSITIONAL
                else:
                    raise ParseError(f"unknown mode {word.text!r}", word.line, word.col)
                if self.at("."):
                    self.advance()
                continue
            seen_item = True
            if self.at_word("prefix"):
                if self.mode == FIRST_ORDER:
                    raise self.error("a global prefix is not used in first-order mode")
                if blocks is not None:
                    raise self.error("duplicate prefix declaration")
                self.advance()
                blocks = self.prefix_blocks()
                self.expect(".")
            elif self.at("?") or self.at("?-"):
                if self.mode == FIRST_ORDER:
                    queries.append((self.fo_query(), start))
                else:
                    queries.append((self.prop_query(), start))
            elif self.mode == FIRST_ORDER:
                fo_clauses.append(self.fo_clause())
            else:
                clauses.append((self.prop_clause(), start))

        if self.mode == FIRST_ORDER:
            return SourceUnit(FIRST_ORDER, FOProgram(tuple(fo_clauses)), [q for q, _ in queries])

        prefix = Prefix(blocks or [])
        for c, tok in clauses:
            for lit in c:
                if lit.var not in prefix:
                    raise DeclarationError(
                        f"{tok.line}:{tok.col}: variable {lit.var!r} is not declared in the prefix"
                    )
        program = Program(prefix, tuple(c for c, _ in clauses))
        checked = [check_query_declarations(q, prefix, tok) for q, tok in queries]
        return SourceUnit(PROPOSITIONAL, program, checked)

    def prefix_blocks(self) -> list[tuple[Quantifier, list[str]]]:
        blocks = [self.block()]
        while self.at(";"):
            self.advance()
            blocks.append(self.block())
        return blocks

    def block(self) -> tuple[Quantifier, list[str]]:
        if not (self.at_word("exists") or self.at_word("forall")):
            raise self.error("expected 'exists' or 'forall'")
        quantifier = _QUANTIFIER_WORDS[self.advance().text]
        names: list[str] = []
        while self.tok.kind == "ident" and self.tok.text not in _KEYWORDS:
            names.append(self.advance().text)
            if self.at(","):
                self.advance()
        return quantifier, names

    # propositional

    def name_list(self) -> list[str]:
        names = [self.name("variable").text]
        while self.at(","):
            self.advance()
            names.append(self.name("variable").text)
        return names

    def prop_clause(self) -> Clause:
        start = self.tok
        heads: list[str] = []
        if not self.at(":-"):
            heads = [self.name("variable").text]
            while self.at(";"):
                self.advance()
                heads.append(self.name("variable").text)
        body: list[str] = []
        if self.at(":-"):
            self.advance()
            body = self.name_list()
        elif not heads:
            raise self.error("expected clause")
        self.expect(".")
        if len(heads) > 1 and not self.allow_non_horn:
            raise NotHornError(
                f"{start.line}:{start.col}: clause has {len(heads)} positive literals"
            )
        return Clause(tuple(Literal(h, True) for h in heads) + tuple(Literal(b, False) for b in body))

    def query_prefix(self) -> list[tuple[str, Quantifier]]:
        """Optional ``forall v exists w :`` in front of a query."""
        if not (self.at_word("exists") or self.at_word("forall")):
            return []
        fresh: list[tuple[str, Quantifier]] = []
        while self.at_word("exists") or self.at_word("forall"):
            quantifier, names = self.block()
            fresh.extend((n, quantifier) for n in names)
        self.expect(":")
        return fresh

    def prop_query(self) -> Query:
        if self.at("?-"):
            self.advance()
            fresh = self.query_prefix()
            if self.at("."):
                raise self.error("empty goal query")
            body = self.name_list()
            self.expect(".")
            return GoalQuery(tuple(body), tuple(fresh))
        self.expect("?")
        fresh = self.query_prefix()
        head = self.name("query head").text
        body: list[str] = []
        if self.at(":-"):
            self.advance()
            body = self.name_list()
        self.expect(".")
        return DefiniteQuery(head, tuple(body), tuple(fresh))

    # first-order

    def fo_prefix(self) -> list[Var] | None:
        if not (self.at_word("exists") or self.at_word("forall")):
            return None
        out: list[Var] = []
        while self.at_word("exists") or self.at_word("forall"):
            quantifier = _QUANTIFIER_WORDS[self.advance().text]
            while self.tok.kind == "ident" and self.tok.text not in _KEYWORDS:
                t = self.advance()
                if not _is_variable(t.text):
                    raise ParseError(f"quantified name {t.text!r} must start uppercase", t.line, t.col)
                if any(v.name == t.text for v in out):
                    raise DeclarationError(f"{t.line}:{t.col}: variable {t.text} quantified twice")
                out.append(Var(t.text, quantifier))
                if self.at(","):
                    self.advance()
        self.expect(":")
        return out

    def atom(self) -> tuple[str, list[str], Token]:
        start = self.name("predicate")
        args: list[str] = []
        if self.at("("):
            self.advance()
            args.append(self.name("term").text)
            while self.at(","):
                self.advance()
                args.append(self.name("term").text)
            self.expect(")")
        return start.text, args, start

    def atom_list(self) -> list[tuple[str, list[str], Token]]:
        atoms = [self.atom()]
        while self.at(","):
            self.advance()
            atoms.append(self.atom())
        return atoms

    def fo_parts(self, allow_headless: bool):
        start = self.tok
        prefix = self.fo_prefix()
        heads = []
        if not self.at(":-"):
            heads = [self.atom()]
            while self.at(";"):
                self.advance()
                heads.append(self.atom())
        body = []
        if self.at(":-"):
            self.advance()
            body = self.atom_list()
        elif not heads:
            raise self.error("expected clause")
        self.expect(".")
        if len(heads) > 1:
            raise NotHornError(f"{start.line}:{start.col}: clause has {len(heads)} positive literals")
        if not heads and not allow_headless:
            raise self.error("expected query head", start)
        return prefix, (heads[0] if heads else None), body

    def build_fo(self, prefix, head, body) -> tuple[tuple[Var, ...], Atom | None, tuple[Atom, ...]]:
        raw = ([head] if head is not None else []) + list(body)
        if prefix is None:
            names: list[str] = []
            for _, args, _ in raw:
                for a in args:
                    if _is_variable(a) and a not in names:
                        names.append(a)
            prefix = [Var(n, FORALL) for n in names]
        table = {v.name: v for v in prefix}

        def conv(entry) -> Atom:
            pred, args, tok = entry
            terms: list[Term] = []
            for a in args:
                if _is_variable(a):
                    if a not in table:
                        raise DeclarationError(
                            f"{tok.line}:{tok.col}: variable {a} is not quantified in its clause"
                        )
                    terms.append(table[a])
                else:
                    terms.append(Const(a))
            return Atom(pred, tuple(terms))

        return (
            tuple(prefix),
            conv(head) if head is not None else None,
            tuple(conv(b) for b in body),
        )

    def fo_clause(self) -> FOClause:
        prefix, head, body = self.fo_parts(allow_headless=True)
        return FOClause(*self.build_fo(prefix, head, body))

    def fo_query(self) -> FOQuery:
        if self.at("?-"):
            self.advance()
            if self.at("."):
                raise self.error("empty goal query")
            prefix = self.fo_prefix()
            body = self.atom_list()
            self.expect(".")
            p, _, b = self.build_fo(prefix, None, body)
            return FOQuery(p, None, b, goal=True)
        self.expect("?")
        prefix, head, body = self.fo_parts(allow_headless=False)
        return FOQuery(*self.build_fo(prefix, head, body))


def _is_variable(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


def check_query_declarations(q: Query, prefix: Prefix, tok: Token | None = None) -> Query:
    where = f"{tok.line}:{tok.col}: " if tok is not None else ""
    fresh = dict(q.fresh)
    for name in fresh:
        if name in prefix:
            raise DeclarationError(f"{where}query variable {name!r} is already declared by the program")
    for name in q.variables():
        if name is not None and name not in prefix and name not in fresh:
            raise DeclarationError(f"{where}query variable {name!r} is not declared")
    return q


def parse_source(text: str, allow_non_horn: bool = False) -> SourceUnit:
    return _Parser(text, allow_non_horn).parse_unit()


def parse_program(text: str, allow_non_horn: bool = False) -> Program | FOProgram:
    return parse_source(text, allow_non_horn).program


def parse_query(text: str, prefix: Prefix | None = None, mode: str = PROPOSITIONAL) -> Query | FOQuery:
    """Parse one query. With a program prefix, undeclared variables are rejected."""
    parser = _Parser(text)
    parser.mode = mode
    start = parser.tok
    if not (parser.at("?") or parser.at("?-")):
        raise parser.error("expected '?' or '?-'")
    q = parser.fo_query() if mode == FIRST_ORDER else parser.prop_query()
    if parser.tok.kind != "eof":
        raise parser.error("unexpected text after query")
    if prefix is not None and mode == PROPOSITIONAL:
        check_query_declarations(q, prefix, start)
    return q


# printing


def format_prefix(prefix: Prefix) -> str:
    if not prefix.blocks:
        return ""
    blocks = "; ".join(f"{q.value} {' '.join(names)}" for q, names in prefix.blocks)
    return f"prefix {blocks}."


def format_clause(c: Clause) -> str:
    heads = [lit.var for lit in c if lit.positive]
    body = [lit.var for lit in c if not lit.positive]
    text = " ; ".join(heads)
    if body:
        text = (text + " " if text else "") + ":- " + ", ".join(body)
    return text + "."


def format_query(q: Query) -> str:
    fresh = ""
    if q.fresh:
        fresh = " ".join(f"{quant.value} {name}" for name, quant in q.fresh) + " : "
    if isinstance(q, GoalQuery):
        return f"?- {fresh}{', '.join(q.body)}."
    head = q.head if q.head is not None else ""
    body = f" :- {', '.join(q.body)}" if q.body else ""
    return f"? {fresh}{head}{body}."


def format_program(p: Program) -> str:
    lines = [format_prefix(p.prefix)] if p.prefix.blocks else []
    lines.extend(format_clause(c) for c in p.clauses)
    return "\n".join(lines) + "\n"


def format_fo_clause(c: FOClause) -> str:
    return str(c) + "."


def format_fo_query(q: FOQuery) -> str:
    from .fol.terms import render_fo_prefix

    prefix = render_fo_prefix(q.prefix)
    if q.goal:
        return f"?- {prefix}{', '.join(map(str, q.body))}."
    body = f" :- {', '.join(map(str, q.body))}" if q.body else ""
    return f"? {prefix}{q.head}{body}."


def format_fo_program(p: FOProgram) -> str:
    return "#mode fol\n" + "".join(format_fo_clause(c) + "\n" for c in p.clauses)


def format_source(unit: SourceUnit) -> str:
    if unit.mode == FIRST_ORDER:
        text = format_fo_program(unit.program)
        return text + "".join(format_fo_query(q) + "\n" for q in unit.queries)
    text = format_program(unit.program)
    return text + "".join(format_query(q) + "\n" for q in unit.queries)

