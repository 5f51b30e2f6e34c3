"""Equations and quasiequations over the four operation symbols.

Concrete syntax::

    law   := atom | atom ("," atom)* "=>" atom
    atom  := term ("=" | "<=" | "<~") term
    term  := ident | "(" term ")" | term ("|" | "+" | "&" | "\\") term

``|`` is override, ``+`` restricted union, ``&`` intersection and ``\\``
difference.  All four share one precedence level and associate to the left.
``s <= t`` abbreviates ``s|t = t`` and ``s <~ t`` abbreviates ``t|s = t``.

Checking is exhaustive over every assignment of carrier elements to the
variables and vectorized with numpy; the reported counterexample is the
lexicographically least failing assignment (variables in order of first
appearance, elements in carrier order).
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

from .algebra import SYMBOLS, FiniteAlgebra
from .errors import BudgetError, InputError, LawSyntaxError, SignatureError

DEFAULT_BUDGET = 10**8
BUDGET_ENV = "OVERRIDE_ALG_BUDGET"
CHUNK = 1 << 20

OP_OF_SYMBOL = {s: op for op, s in SYMBOLS.items()}
RELATIONS = ("=", "<=", "<~")


def default_budget() -> int:
    value = os.environ.get(BUDGET_ENV)
    if value:
        try:
            return int(value)
        except ValueError:
            raise InputError(f"{BUDGET_ENV} must be an integer, got {value!r}") from None
    return DEFAULT_BUDGET


# ------------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"{_wrap(self.left)}{SYMBOLS[self.op]}{_wrap(self.right)}"


Term = Union[Var, App]


def _wrap(t):
    return str(t) if isinstance(t, Var) else f"({t})"


def variables(t: Term, out: list[str] | None = None) -> list[str]:
    out = [] if out is None else out
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    else:
        variables(t.left, out)
        variables(t.right, out)
    return out


def term_ops(t: Term) -> set[str]:
    if isinstance(t, Var):
        return set()
    return {t.op} | term_ops(t.left) | term_ops(t.right)


def term_size(t: Term) -> int:
    return 0 if isinstance(t, Var) else 1 + term_size(t.left) + term_size(t.right)


@dataclass(frozen=True)
class Atom:
    lhs: Term
    rel: str
    rhs: Term

    def equation(self) -> tuple[Term, Term]:
        """The atom with order sugar expanded."""
        if self.rel == "=":
            return self.lhs, self.rhs
        if self.rel == "<=":
            return App("or", self.lhs, self.rhs), self.rhs
        return App("or", self.rhs, self.lhs), self.rhs

    def __str__(self):
        rel = {"=": "=", "<=": "<=", "<~": "<~"}[self.rel]
        return f"{self.lhs} {rel} {self.rhs}"


@dataclass(frozen=True)
class Law:
    premises: tuple[Atom, ...]
    conclusion: Atom
    name: str = ""
    citation: str = field(default="", compare=False)

    @property
    def is_quasi(self) -> bool:
        return bool(self.premises)

    def atoms(self) -> tuple[Atom, ...]:
        return self.premises + (self.conclusion,)

    def variables(self) -> list[str]:
        out: list[str] = []
        for atom in self.atoms():
            variables(atom.lhs, out)
            variables(atom.rhs, out)
        return out

    def ops(self) -> set[str]:
        found = set()
        for atom in self.atoms():
            lhs, rhs = atom.equation()
            found |= term_ops(lhs) | term_ops(rhs)
        return found

    def body(self) -> str:
        if not self.premises:
            return str(self.conclusion)
        return ", ".join(map(str, self.premises)) + " => " + str(self.conclusion)

    def __str__(self):
        return f"{self.name} : {self.body()}" if self.name else self.body()


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<arrow>=>)|(?P<rel><=|<~|=)"
                    r"|(?P<op>[|+&\\])|(?P<punct>[(),]))")


class _Parser:
    def __init__(self, text: str, line_offset: int = 0, col_offset: int = 0):
        self.text = text
        self.line_offset = line_offset
        self.col_offset = col_offset
        self.tokens = list(self._lex())
        self.pos = 0

    def _where(self, offset):
        line = self.text.count("\n", 0, offset)
        start = self.text.rfind("\n", 0, offset) + 1
        col = offset - start + 1 + (self.col_offset if line == 0 else 0)
        return line + 1 + self.line_offset, col

    def error(self, msg, offset):
        raise LawSyntaxError(msg, *self._where(offset))

    def _lex(self):
        i = 0
        text = self.text
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(text, i)
            if not m or m.end() == i:
                ch = text[i]
                self.error(f"unknown operator symbol {ch!r}" if not ch.isalnum() else
                           f"unexpected character {ch!r}", i)
            kind = m.lastgroup
            start = m.start(kind)
            yield kind, m.group(kind), start
            i = m.end()
        yield "end", "", len(text)

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.take()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            self.error(f"expected {want!r}, found {got!r}", tok[2])
        return tok

    def law(self, name="", citation=""):
        if self.peek()[0] == "end":
            self.error("empty law", self.peek()[2])
        atoms = [self.atom()]
        while self.peek()[:2] == ("punct", ","):
            self.take()
            atoms.append(self.atom())
        if self.peek()[0] == "arrow":
            tok = self.take()
            if self.peek()[0] == "end":
                self.error("empty conclusion", tok[2] + 2)
            conclusion = self.atom()
        else:
            if len(atoms) > 1:
                self.error("premises must be followed by '=>' and a conclusion", self.peek()[2])
            conclusion = atoms.pop()
        tok = self.peek()
        if tok[0] != "end":
            self.error(f"unexpected {tok[1]!r}", tok[2])
        return Law(tuple(atoms), conclusion, name, citation)

    def atom(self):
        lhs = self.term()
        tok = self.take()
        if tok[0] != "rel":
            self.error(f"expected '=', '<=' or '<~', found {tok[1] or 'end of input'!r}", tok[2])
        rhs = self.term()
        return Atom(lhs, tok[1], rhs)

    def term(self):
        t = self.primary()
        while self.peek()[0] == "op":
            sym = self.take()[1]
            t = App(OP_OF_SYMBOL[sym], t, self.primary())
        return t

    def primary(self):
        tok = self.take()
        if tok[0] == "ident":
            return Var(tok[1])
        if tok[:2] == ("punct", "("):
            t = self.term()
            self.expect("punct", ")")
            return t
        self.error(f"expected a variable or '(', found {tok[1] or 'end of input'!r}", tok[2])


def parse_law(text: str, name: str = "", citation: str = "") -> Law:
    """Parse one law body, e.g. ``d <~ a, d <~ b => d <~ a&b``."""
    return _Parser(text).law(name, citation)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek()[0] != "end":
        p.error(f"unexpected {p.peek()[1]!r}", p.peek()[2])
    return t


def parse_law_file(text: str) -> list[Law]:
    """Laws given one per line as ``NAME : BODY``; ``#`` starts a comment."""
    laws = []
    names = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        name, sep, body = line.partition(":")
        if not sep or not name.strip():
            raise LawSyntaxError("expected 'NAME : BODY'", lineno, 1)
        name = name.strip()
        if name in names:
            raise LawSyntaxError(f"duplicate law name {name!r}", lineno, 1)
        names.add(name)
        laws.append(_Parser(body, lineno - 1, len(line) - len(body)).law(name))
    return laws


def load_laws(path) -> list[Law]:
    return parse_law_file(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------- derived symbols

def expand_term(t: Term, available: set[str]) -> Term:
    """Rewrite ``t`` so only operations in ``available`` occur."""
    if isinstance(t, Var):
        return t
    left, right = expand_term(t.left, available), expand_term(t.right, available)
    if t.op in available:
        return App(t.op, left, right)
    if t.op == "or" and "vee" in available:
        return App("vee", left, App("vee", left, right))
    if t.op == "vee" and "or" in available and ("meet" in available or "minus" in available):
        return expand_term(App("meet", App("or", left, right), App("or", right, left)), available)
    if t.op == "meet" and "minus" in available:
        return App("minus", left, App("minus", left, right))
    raise SignatureError(f"{t.op} cannot be expressed with {sorted(available)}")


def equations(law: Law, available: set[str] | None = None) -> tuple[list[tuple[Term, Term]], tuple[Term, Term]]:
    """Sugar-free ``(premises, conclusion)``, optionally restricted to ``available`` ops."""
    def conv(atom):
        lhs, rhs = atom.equation()
        if available is not None:
            lhs, rhs = expand_term(lhs, available), expand_term(rhs, available)
        return lhs, rhs
    return [conv(a) for a in law.premises], conv(law.conclusion)


# --------------------------------------------------------------- evaluation

def compile_term(t: Term, slots: dict[str, int]):
    """Vectorized evaluator ``f(tables, columns)``; columns[k] holds variable k's values."""
    if isinstance(t, Var):
        k = slots[t.name]
        return lambda tables, cols: cols[k]
    left, right = compile_term(t.left, slots), compile_term(t.right, slots)
    op = t.op
    return lambda tables, cols: tables[op][left(tables, cols), right(tables, cols)]


def compile_law(law: Law, available: set[str] | None = None):
    """Vectorized ``f(tables, cols) -> (premises_hold, lhs, rhs)`` for a law."""
    slots = {v: k for k, v in enumerate(law.variables())}
    prem, concl = equations(law, available)
    prem = [(compile_term(l, slots), compile_term(r, slots)) for l, r in prem]
    cl, cr = compile_term(concl[0], slots), compile_term(concl[1], slots)

    def run(tables, cols):
        ok = None
        for l, r in prem:
            eq = l(tables, cols) == r(tables, cols)
            ok = eq if ok is None else ok & eq
        return ok, cl(tables, cols), cr(tables, cols)
    return run


@dataclass(frozen=True)
class Counterexample:
    law: Law
    assignment: dict[str, str]
    lhs: str
    rhs: str

    def __str__(self):
        vals = ", ".join(f"{k}={v}" for k, v in self.assignment.items())
        return f"{vals}; conclusion sides {self.lhs} != {self.rhs}"

    def as_dict(self) -> dict:
        return {"assignment": dict(self.assignment), "lhs": self.lhs, "rhs": self.rhs}


def _digits(flat, n, k):
    cols = []
    for power in range(k - 1, -1, -1):
        cols.append((flat // n**power) % n)
    return cols


def _tables_for(A: FiniteAlgebra, law: Law):
    return {op: A.op(op) for op in law.ops()}


def _counterexample(A, law, names, cols, hit, lhs, rhs):
    assignment = {v: A.elements[int(c[hit])] for v, c in zip(names, cols)}
    return Counterexample(law, assignment, A.elements[int(lhs[hit])], A.elements[int(rhs[hit])])


def assignment_count(A: FiniteAlgebra, law: Law) -> int:
    return A.n ** len(law.variables())


def counterexamples(A: FiniteAlgebra, law: Law, budget: int | None = None) -> Iterator[Counterexample]:
    """Every failing assignment of ``law`` in lexicographic order.

    Refuses (BudgetError) when the n**k assignments exceed ``budget``.
    """
    budget = default_budget() if budget is None else budget
    names = law.variables()
    n, k = A.n, len(names)
    total = n**k
    if total > budget:
        raise BudgetError(f"{law.name or law.body()}: {n}^{k} = {total} assignments exceed budget {budget}")
    tables = _tables_for(A, law)
    run = compile_law(law)
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        cols = _digits(flat, n, k)
        ok, lhs, rhs = run(tables, cols)
        bad = lhs != rhs
        if ok is not None:
            bad &= ok
        for hit in np.flatnonzero(bad):
            yield _counterexample(A, law, names, cols, int(hit), lhs, rhs)


def check_law(A: FiniteAlgebra, law: Law, budget: int | None = None) -> Counterexample | None:
    """Least counterexample to ``law`` in ``A``, or None if it holds."""
    return next(counterexamples(A, law, budget), None)


def sample_law(A: FiniteAlgebra, law: Law, samples: int = 10**6, seed: int = 0) -> Counterexample | None:
    """Check ``law`` on ``samples`` uniformly random assignments (reproducible by seed)."""
    names = law.variables()
    rng = np.random.default_rng(seed)
    tables = _tables_for(A, law)
    run = compile_law(law)
    left = samples
    while left > 0:
        size = min(left, CHUNK)
        cols = [rng.integers(0, A.n, size=size) for _ in names]
        ok, lhs, rhs = run(tables, cols)
        bad = lhs != rhs
        if ok is not None:
            bad &= ok
        if bad.any():
            hit = int(np.argmax(bad))
            return _counterexample(A, law, names, cols, hit, lhs, rhs)
        left -= size
    return None


def evaluate(A: FiniteAlgebra, t: Term, env: dict[str, str]) -> str:
    """Scalar evaluation by recursion over element names (independent of the vectorized path)."""
    if isinstance(t, Var):
        if t.name not in env:
            raise InputError(f"variable {t.name} is unassigned")
        return env[t.name]
    return A.apply(t.op, evaluate(A, t.left, env), evaluate(A, t.right, env))


def atom_holds(A: FiniteAlgebra, atom: Atom, env: dict[str, str]) -> bool:
    lhs, rhs = atom.equation()
    return evaluate(A, lhs, env) == evaluate(A, rhs, env)


def holds_at(A: FiniteAlgebra, law: Law, env: dict[str, str]) -> bool:
    """Does the law hold for this single assignment?"""
    if all(atom_holds(A, p, env) for p in law.premises):
        return atom_holds(A, law.conclusion, env)
    return True


def confirms(A: FiniteAlgebra, cex: Counterexample) -> bool:
    """Replay a counterexample with the scalar evaluator."""
    return not holds_at(A, cex.law, cex.assignment)


def iter_assignments(A: FiniteAlgebra, law: Law) -> Iterator[dict[str, str]]:
    names = law.variables()
    for combo in itertools.product(A.elements, repeat=len(names)):
        yield dict(zip(names, combo))


def check_law_naive(A: FiniteAlgebra, law: Law) -> dict[str, str] | None:
    """Slow reference checker: first failing assignment in lexicographic order."""
    for env in iter_assignments(A, law):
        if not holds_at(A, law, env):
            return env
    return None


def check_laws(A: FiniteAlgebra, laws: Sequence[Law], budget: int | None = None):
    """``[(law, counterexample or None), ...]`` in the given order."""
    return [(law, check_law(A, law, budget)) for law in laws]
