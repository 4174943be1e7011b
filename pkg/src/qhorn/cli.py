"""Batch runner and interactive REPL."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import TextIO

from .dot import emit_dot
from .errors import NotHornError, QhornError
from .extensions import (
    AnsweredNo,
    AnsweredYes,
    ReducedQuery,
    detect_renaming,
    head_first,
    resolve_new_variables,
)
from .fol.solver import fol_output
from .fol.terms import FOProgram, FOQuery
from .formula import Clause, DefiniteQuery, GoalQuery, Literal, Program, Query, apply_renaming
from .linear import Verdict, output
from .oracle import DEFAULT_CAP, eval_qbf, horn_quick_sat
from .sldq import DEFAULT_BUDGET, Found, format_trace, refutation_tree, search_recursive
from .syntax import PROPOSITIONAL, parse_query, parse_source

EXIT = {Verdict.YES: 0, Verdict.NO: 1, Verdict.LOOP: 2}
EXIT_PARSE = 64
EXIT_NOT_HORN = 65


class NotRenamable(QhornError):
    pass


@dataclass
class Session:
    program: Program | FOProgram | None = None
    original: Program | None = None
    mode: str = PROPOSITIONAL
    flip: frozenset[str] = frozenset()
    trace: bool = False
    budget: int = DEFAULT_BUDGET
    oracle_cap: int = DEFAULT_CAP
    history: list = field(default_factory=list)
    last_states: str | None = None
    last_tree: object = None
    out: TextIO = field(default_factory=lambda: sys.stdout)
    err: TextIO = field(default_factory=lambda: sys.stderr)

    def say(self, text: str) -> None:
        print(text, file=self.out)

    def warn(self, text: str) -> None:
        print(text, file=self.err)

    def load_text(self, text: str) -> list:
        """Replace the loaded program; returns the queries found in the text."""
        unit = parse_source(text, allow_non_horn=True)
        program = unit.program
        flip: frozenset[str] = frozenset()
        original = program if isinstance(program, Program) else None
        if isinstance(program, Program) and not program.is_horn():
            found = detect_renaming(program)
            if found is None:
                raise NotRenamable("program is not Horn and no renaming makes it Horn")
            flip = frozenset(found)
            program = head_first(apply_renaming(program, flip))
            self.warn(f"note: renamed {', '.join(sorted(flip))} to obtain a Horn program")
        self.program, self.original, self.mode, self.flip = program, original, unit.mode, flip
        self.last_states = self.last_tree = None
        return unit.queries

    def load(self, path: str) -> list:
        with open(path, encoding="utf-8") as fh:
            return self.load_text(fh.read())

    # queries

    def rename_query(self, q: Query) -> Query:
        if not self.flip:
            return q
        lits = [Literal(l.var, l.positive != (l.var in self.flip)) for l in q.clause()]
        c = Clause(tuple(lits))
        if not c.is_horn():
            raise NotHornError("query is not Horn after renaming the program")
        if isinstance(q, GoalQuery):
            if c.head is not None:
                raise NotHornError("goal query gains a positive literal after renaming")
            return GoalQuery(tuple(l.var for l in c.body), q.fresh)
        head = None if c.head is None else c.head.var
        return DefiniteQuery(head, tuple(l.var for l in c.body), q.fresh)

    def ask(self, q: Query | FOQuery) -> Verdict:
        if self.program is None:
            raise QhornError("no program loaded")
        self.history.append(q)
        if isinstance(q, FOQuery):
            if not isinstance(self.program, FOProgram):
                raise QhornError("first-order query against a propositional program")
            r = fol_output(self.program, q)
            self.last_states = "\n".join(f"{k} = {v}" for k, v in r.states.items())
            self.last_tree = None
            return r.verdict
        if not isinstance(self.program, Program):
            raise QhornError("propositional query against a first-order program")
        q = self.rename_query(q)
        settled = resolve_new_variables(self.program, q)
        if isinstance(settled, AnsweredYes):
            self.last_states, self.last_tree = "", None
            return Verdict.YES
        if isinstance(settled, AnsweredNo):
            self.last_states, self.last_tree = "", None
            return Verdict.NO
        if isinstance(settled, ReducedQuery):
            q = settled.query
        r = output(self.program, q)
        self.last_states = r.dump()
        tops = self._tops(r.program, q)
        self.last_tree = (r.program, tops[0]) if tops else None
        if self.trace and r.verdict is Verdict.YES:
            for top in tops:
                found = search_recursive(r.program, top, self.budget)
                if isinstance(found, Found):
                    self.say(format_trace(found.derivation))
                    break
            else:
                self.say("% no derivation within budget")
        return r.verdict

    @staticmethod
    def _tops(program: Program, q: Query) -> list[Clause]:
        if isinstance(q, GoalQuery):
            return [q.clause()]
        if q.head is not None:
            return [Clause.goal(q.head)]
        return [c for c in program.clauses if c.head is None]

    def tree_dot(self) -> str:
        if self.last_tree is None:
            raise QhornError("no refutation tree: run a propositional query first")
        program, top = self.last_tree
        return emit_dot(refutation_tree(program, top))

    def parse(self, line: str) -> Query | FOQuery:
        prefix = self.program.prefix if isinstance(self.program, Program) else None
        return parse_query(line, prefix, self.mode)


def run_batch(path: str, session: Session, dot_path: str | None = None) -> int:
    try:
        queries = session.load(path)
    except NotRenamable as e:
        session.warn(f"error: {e}")
        return EXIT_NOT_HORN
    except (QhornError, OSError) as e:
        session.warn(f"error: {e}")
        return EXIT_PARSE
    code = 0
    for q in queries:
        try:
            verdict = session.ask(q)
        except QhornError as e:
            session.warn(f"error: {e}")
            code = EXIT_PARSE
            continue
        session.say(str(verdict))
        code = EXIT[verdict]
    if dot_path is not None and session.last_tree is not None:
        with open(dot_path, "w", encoding="utf-8") as fh:
            fh.write(session.tree_dot())
    return code


HELP = """commands:
  :load <path>      load a program (replaces the current one)
  ? h :- b.  ?- g.  ask a query
  :trace on|off     print a derivation when the answer is yes
  :tree <path.dot>  write the refutation tree of the last query
  :states           show the state table of the last query
  :sat              decide the loaded program
  :rename           report the flip set that makes the program Horn
  :budget <n>       search budget for traces
  :mode             show the current settings
  :quit             leave"""


def command(session: Session, line: str) -> bool:
    """Run one REPL line; False means quit."""
    line = line.strip()
    if not line or line.startswith("%"):
        return True
    if line.startswith("?"):
        session.say(str(session.ask(session.parse(line))))
        return True
    if not line.startswith(":"):
        session.warn("unknown input; type :help")
        return True
    name, _, arg = line[1:].partition(" ")
    arg = arg.strip()
    if name in ("quit", "q"):
        return False
    if name == "help":
        session.say(HELP)
    elif name == "load":
        queries = session.load(arg)
        session.say(f"loaded {arg} ({session.mode})")
        for q in queries:
            session.say(str(session.ask(q)))
    elif name == "trace":
        if arg not in ("on", "off"):
            raise QhornError("usage: :trace on|off")
        session.trace = arg == "on"
    elif name == "tree":
        if not arg:
            raise QhornError("usage: :tree <path.dot>")
        with open(arg, "w", encoding="utf-8") as fh:
            fh.write(session.tree_dot())
        session.say(f"wrote {arg}")
    elif name == "states":
        if session.last_states is None:
            raise QhornError("no query has been run")
        session.say(session.last_states or "(no states)")
    elif name == "sat":
        p = session.program
        if not isinstance(p, Program):
            raise QhornError(":sat needs a propositional program")
        quick = horn_quick_sat(p)
        if quick is not None:
            session.say("true")
        else:
            session.say("true" if eval_qbf(p, session.oracle_cap) else "false")
    elif name == "rename":
        p = session.original
        if p is None:
            raise QhornError(":rename needs a propositional program")
        flip = detect_renaming(p)
        if flip is None:
            session.say("not renamable")
        else:
            session.say("flip: " + (" ".join(sorted(flip)) if flip else "(none)"))
    elif name == "budget":
        try:
            n = int(arg)
        except ValueError:
            raise QhornError("usage: :budget <n>") from None
        if n <= 0:
            raise QhornError("budget must be positive")
        session.budget = n
    elif name == "mode":
        loaded = "none" if session.program is None else session.mode
        session.say(
            f"program: {loaded}; trace: {'on' if session.trace else 'off'}; "
            f"budget: {session.budget}; oracle cap: {session.oracle_cap}"
        )
    else:
        session.warn(f"unknown command :{name}; type :help")
    return True


def repl(session: Session, stream: TextIO = sys.stdin, prompt: bool = False) -> int:
    while True:
        if prompt:
            print("qhorn> ", end="", file=session.out, flush=True)
        line = stream.readline()
        if not line:
            return 0
        try:
            if not command(session, line):
                return 0
        except (QhornError, OSError, RecursionError) as e:
            session.warn(f"error: {e}")


def _default_budget() -> int:
    raw = os.environ.get("QHORN_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_BUDGET


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="qhorn", description="Quantified Horn clause engine")
    ap.add_argument("--batch", metavar="FILE", help="run every query in FILE and exit")
    ap.add_argument("--trace", action="store_true", help="print a derivation for each yes")
    ap.add_argument("--budget", type=int, default=_default_budget(), help="search budget for traces")
    ap.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP, help="variable cap for :sat")
    ap.add_argument("--dot", metavar="PATH", help="write the last refutation tree as DOT")
    args = ap.parse_args(argv)
    session = Session(trace=args.trace, budget=args.budget, oracle_cap=args.oracle_cap)
    if args.batch:
        return run_batch(args.batch, session, args.dot)
    return repl(session, prompt=sys.stdin.isatty())


if __name__ == "__main__":
    sys.exit(main())
