"""Built-in axiom suites.

Each suite has a signature of declared operations; checking an algebra first
takes its reduct to that signature, so missing operations are derived (for
example ``|`` from ``+`` in the vee suite, ``&`` from ``\\`` in the od suite).
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import FiniteAlgebra
from .errors import InputError
from .lawlang import Counterexample, Law, check_law, parse_law

# name, body, citation
_LRB = [
    ("or-assoc", "a|(b|c) = (a|b)|c", "left regular band: associativity"),
    ("or-idem", "a|a = a", "left regular band: idempotence"),
    ("lrb", "a|b = (a|b)|a", "left regular band: left regularity"),
]

_MEET_SL = [
    ("meet-assoc", "a&(b&c) = (a&b)&c", "semilattice: associativity of meet"),
    ("meet-comm", "a&b = b&a", "semilattice: commutativity of meet"),
    ("meet-idem", "a&a = a", "semilattice: idempotence of meet"),
]

# the o-semilattice order is the meet order: x <= y iff x = x&y
_OSL = [
    ("osl-1", "x = x&(x|y)", "o-semilattice: x <= x|y"),
    ("osl-2", "(x&y)|(y&z) = ((x&y)|(y&z))&y", "o-semilattice: (x&y)|(y&z) <= y"),
    ("osl-3", "x|y = (x|y)&(x|(y&(x|y)))", "o-semilattice: x|y <= x|(y&(x|y))"),
    ("osl-4", "x&z = (x&z)&((x&y)|z)", "o-semilattice: x&z <= (x&y)|z"),
]

_ADO_EXTRA = [
    ("ado-distrib", "(a&d)|((b&d)&(c&d)) = ((a&d)|(b&d))&((a&d)|(c&d))",
     "distributive o-semilattice: distributivity"),
    ("or-assoc", "a|(b|c) = (a|b)|c", "associative o-semilattice"),
]

_ALT_EXTRA = [
    ("meet-absorb", "a&(a|b) = a", "meet agrees with the override order (a <= a|b)"),
    ("or-absorb", "(a&b)|b = b", "meet agrees with the override order (a&b <= b)"),
    ("ext-distrib", "a|(b&c) = (a|b)&(a|c)", "extended distributivity"),
    ("alt-4", "a&c <= (a&b)|c", "alternative ado axiom: a&c <= (a&b)|c"),
]

_VEE = [
    ("vee-comm", "a+b = b+a", "vee-algebra: commutativity"),
    ("vee-idem", "a+a = a", "vee-algebra: idempotence"),
    *_LRB,
    ("vee-absorb", "(a+b)|(a|b) = a|b", "vee-algebra: (a+b)|(a|b) = a|b"),
    ("or-distrib-vee", "a|(b+c) = (a|b)+(a|c)", "vee-algebra: override distributes over vee"),
    ("vee-quasi", "d <~ a, d <~ b, d <~ c, d <~ a+b, d <~ b+c => d <~ a+c",
     "vee-algebra: the defining quasiequation"),
]

_OD_EXTRA = [
    ("od-zero", "(a\\b)&b = (c\\d)&d", "od-algebra: (a\\b)&b is constant"),
    ("od-split", "(a\\b)|(a&b) = a", "od-algebra: (a\\b)|(a&b) = a"),
]

# consequences of the ado axioms, used as a test battery rather than a suite
DERIVED_ADO = [
    ("goodies-2", "a&((a&b)|c) = a&((a&c)|b)", "ado consequence"),
    ("critical", "a <= c, b <= c, d <~ a, d <~ b => d <~ a&b", "ado consequence: common upper bound"),
    ("qe-1", "d <~ a&b, d <~ b&c => d <~ a&c", "ado quasiequation"),
    ("qe-2", "d <~ a, d <~ b, d <~ a+b => d <~ a&b", "ado quasiequation"),
]

DERIVED_VEE = [
    ("bigqi", "d <~ a|i, d <~ b|i, d <~ c|i, d <~ (a+b)|i, d <~ (b+c)|i => d <~ (a+c)|i",
     "vee-algebra consequence: quasiequation relative to i"),
]


@dataclass(frozen=True)
class Suite:
    name: str
    signature: tuple[str, ...]
    laws: tuple[Law, ...]
    description: str

    def equations(self) -> "Suite":
        return Suite(self.name + ":eq", self.signature, tuple(l for l in self.laws if not l.is_quasi),
                     self.description + " (equations only)")

    def law(self, name: str) -> Law:
        for law in self.laws:
            if law.name == name:
                return law
        raise InputError(f"suite {self.name} has no law {name!r}")

    def reduct(self, A: FiniteAlgebra) -> FiniteAlgebra:
        return A.reduct(self.signature)

    def check(self, A: FiniteAlgebra, budget: int | None = None, stop_at_first: bool = False):
        """``[(law, counterexample or None), ...]`` for the reduct of ``A``."""
        B = self.reduct(A)
        results = []
        for law in self.laws:
            cex = check_law(B, law, budget)
            results.append((law, cex))
            if cex is not None and stop_at_first:
                break
        return results

    def first_failure(self, A: FiniteAlgebra, budget: int | None = None) -> Counterexample | None:
        for _, cex in self.check(A, budget, stop_at_first=True):
            if cex is not None:
                return cex
        return None

    def holds(self, A: FiniteAlgebra, budget: int | None = None) -> bool:
        return self.first_failure(A, budget) is None


def _laws(entries) -> tuple[Law, ...]:
    seen = {}
    for name, body, cite in entries:
        if name not in seen:
            seen[name] = parse_law(body, name, cite)
    return tuple(seen.values())


_DEFS = {
    "lrb": (("or",), _LRB, "left regular bands (override alone)"),
    "osl": (("or", "meet"), _MEET_SL + _OSL, "o-semilattices"),
    "ado": (("or", "meet"), _MEET_SL + _OSL + _ADO_EXTRA,
            "associative distributive o-semilattices"),
    "ado-alt": (("or", "meet"), _LRB + _MEET_SL + _ALT_EXTRA,
                "ado-semilattices, axiomatised through the override order"),
    "vee": (("vee",), _VEE, "vee-algebras (restricted union alone)"),
    "od": (("or", "minus"), _LRB + _MEET_SL + _ALT_EXTRA + _OD_EXTRA,
           "override-difference algebras, with a&b := a\\(a\\b)"),
}

SUITE_NAMES = tuple(_DEFS)
_CACHE: dict[str, Suite] = {}


def get_suite(name: str) -> Suite:
    """Built-in suite by name; ``NAME:eq`` selects its equations only."""
    base, _, part = name.partition(":")
    if base not in _DEFS or part not in ("", "eq"):
        raise InputError(f"unknown suite {name!r}; known: {', '.join(SUITE_NAMES)}")
    if base not in _CACHE:
        sig, entries, desc = _DEFS[base]
        _CACHE[base] = Suite(base, sig, _laws(entries), desc)
    suite = _CACHE[base]
    return suite.equations() if part == "eq" else suite


def all_suites() -> list[Suite]:
    return [get_suite(name) for name in SUITE_NAMES]


def derived_laws(which: str = "ado") -> tuple[Law, ...]:
    return _laws(DERIVED_ADO if which == "ado" else DERIVED_VEE)


def find_law(name: str) -> Law:
    """Look a law up by ``NAME`` or ``SUITE.NAME`` among the built-in suites."""
    suite, dot, law = name.rpartition(".")
    if dot and suite in _DEFS:
        return get_suite(suite).law(law)
    for suite in all_suites():
        for law in suite.laws:
            if law.name == name:
                return law
    for law in derived_laws("ado") + derived_laws("vee"):
        if law.name == name:
            return law
    raise InputError(f"no built-in law named {name!r}")
