"""Functional representation through relatively maximal ideals.

For an ideal I (a <~ down-set closed under ``+``), the relation

    a ~ b  iff  a, b in I,  or  a, b, a+b all outside I

is a congruence whenever the algebra satisfies the vee-algebra laws, and the
quotient is flat with I as its bottom.  Taking one point per relatively
maximal ideal, element ``a`` becomes the partial function defined at the
ideals that do not contain it, with value the class of ``a`` there.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .algebra import Congruence, FiniteAlgebra, congruence_violation, is_flat, order_relations, quotient
from .errors import InputError, SignatureError, SizeError
from .lawlang import Counterexample
from .pfun import OPERATIONS, PartialFunction, format_functions, format_literal, parse_functions
from .suites import get_suite

DEFAULT_IDEAL_BOUND = 16

SIGNATURES = {
    "vee": ("vee",),
    "ado": ("or", "meet"),
    "od": ("or", "minus"),
}


# ----------------------------------------------------------------- ideals

@dataclass(frozen=True, order=True)
class Ideal:
    members: frozenset[int]

    def __contains__(self, x):
        return x in self.members

    def __len__(self):
        return len(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def names(self, A: FiniteAlgebra) -> list[str]:
        return [A.elements[k] for k in self.sorted()]

    def format(self, A: FiniteAlgebra) -> str:
        return "{" + ",".join(self.names(A)) + "}"


def _ideal_key(ideal: Ideal):
    return (len(ideal), ideal.sorted())


def _join_table(A: FiniteAlgebra) -> np.ndarray:
    return A.op("vee") if A.has("vee") else A.op("or")


def _downsets(A: FiniteAlgebra) -> list[frozenset[int]]:
    _, lesssim = order_relations(A)
    return [frozenset(np.nonzero(lesssim[:, b])[0].tolist()) for b in range(A.n)]


def ideal_closure(A: FiniteAlgebra, seed: Iterable, _cache=None) -> Ideal:
    """Least ideal containing ``seed`` (element names or indices)."""
    seed = [A.index(s) if isinstance(s, str) else int(s) for s in seed]
    if not seed:
        raise InputError("ideal_closure needs a non-empty seed")
    below = _cache[0] if _cache else _downsets(A)
    join = _cache[1] if _cache else _join_table(A)
    members = set(seed)
    while True:
        grown = set(members)
        for x in members:
            grown |= below[x]
        for x in list(grown):
            for y in list(grown):
                grown.add(int(join[x, y]))
        if grown == members:
            return Ideal(frozenset(members))
        members = grown


def is_ideal(A: FiniteAlgebra, subset: Iterable[int]) -> bool:
    s = set(subset)
    if not s:
        return False
    below = _downsets(A)
    join = _join_table(A)
    return all(below[x] <= s for x in s) and all(int(join[x, y]) in s for x in s for y in s)


def all_ideals(A: FiniteAlgebra, bound: int = DEFAULT_IDEAL_BOUND) -> list[Ideal]:
    """Every ideal, ordered by size and then by member indices.

    Ideals are closed under intersection, and each one is the join of the
    principal ideals of its members, so joins of principal ideals reach all.
    """
    if A.n > bound:
        raise SizeError(f"{A.name} has {A.n} elements; ideal bound is {bound}")
    cache = (_downsets(A), _join_table(A))
    principal = [ideal_closure(A, [x], cache) for x in range(A.n)]
    found = set(principal)
    frontier = list(found)
    while frontier:
        fresh = []
        for I in frontier:
            for P in principal:
                if P.members <= I.members:
                    continue
                J = ideal_closure(A, I.members | P.members, cache)
                if J not in found:
                    found.add(J)
                    fresh.append(J)
        frontier = fresh
    return sorted(found, key=_ideal_key)


def ideals_by_filtering(A: FiniteAlgebra, bound: int = 12) -> list[Ideal]:
    """Brute force over all subsets (cross-check for small carriers)."""
    if A.n > bound:
        raise SizeError(f"subset filtering is limited to {bound} elements")
    out = []
    for mask in range(1, 1 << A.n):
        s = [k for k in range(A.n) if mask >> k & 1]
        if is_ideal(A, s):
            out.append(Ideal(frozenset(s)))
    return sorted(out, key=_ideal_key)


def relatively_maximal_ideals(A: FiniteAlgebra, d="all", bound: int = DEFAULT_IDEAL_BOUND) -> list[Ideal]:
    """Ideals maximal among those not containing ``d``; ``"all"`` takes every d."""
    ideals = all_ideals(A, bound)
    if d == "all":
        targets = range(A.n)
    else:
        targets = [A.index(d) if isinstance(d, str) else int(d)]
    out = set()
    for t in targets:
        excluding = [I for I in ideals if t not in I]
        for I in excluding:
            if not any(I.members < J.members for J in excluding):
                out.add(I)
    return sorted(out, key=_ideal_key)


# ------------------------------------------------------- epsilon and flat

@dataclass(frozen=True)
class EpsilonWitness:
    """Why the relation built from an ideal is not a congruence."""

    kind: str        # "reflexivity", "transitivity" or "compatibility"
    elements: tuple[int, ...]
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


class EpsilonFailure(InputError):
    def __init__(self, witness: EpsilonWitness):
        self.witness = witness
        super().__init__(str(witness))


def epsilon_relation(A: FiniteAlgebra, I: Ideal) -> np.ndarray:
    v = A.op("vee")
    inside = np.zeros(A.n, dtype=bool)
    inside[list(I.members)] = True
    out = ~inside
    rel = out[:, None] & out[None, :] & ~inside[v]
    rel |= inside[:, None] & inside[None, :]
    return rel


def epsilon_congruence(A: FiniteAlgebra, I: Ideal) -> Congruence:
    """Partition of ``epsilon_I``; raises EpsilonFailure with a concrete witness."""
    if not is_ideal(A, I.members):
        raise InputError(f"{I.format(A)} is not an ideal of {A.name}")
    rel = epsilon_relation(A, I)
    e = A.elements
    for a in range(A.n):
        if not rel[a, a]:
            raise EpsilonFailure(EpsilonWitness("reflexivity", (a,), f"{e[a]} is not related to itself"))
    for a in range(A.n):
        for b in range(A.n):
            if not rel[a, b] or a == b:
                continue
            for c in range(A.n):
                if rel[b, c] and not rel[a, c]:
                    raise EpsilonFailure(EpsilonWitness(
                        "transitivity", (a, b, c),
                        f"{e[a]}~{e[b]} and {e[b]}~{e[c]} but not {e[a]}~{e[c]}"))
    labels = [int(np.argmax(rel[a])) for a in range(A.n)]
    cong = Congruence.from_labels(labels)
    bad = congruence_violation(A, cong)
    if bad is not None:
        raise EpsilonFailure(EpsilonWitness("compatibility", (bad.a, bad.a2, bad.b, bad.b2), bad.describe(A)))
    return cong


def flat_quotient(A: FiniteAlgebra, I: Ideal):
    """``(flat algebra, projection)`` for the quotient by ``epsilon_I``.

    The quotient's elements are named ``0`` for the block I and ``c1, c2, ...``
    for the remaining blocks in carrier order.
    """
    cong = epsilon_congruence(A, I)
    bottom = next(k for k, b in enumerate(cong.blocks) if b[0] in I)
    names, count = [], 0
    for k in range(len(cong.blocks)):
        if k == bottom:
            names.append("0")
        else:
            count += 1
            names.append(f"c{count}")
    Q, proj = quotient(A, cong, names=names, name=f"{A.name}-flat")
    if not is_flat(Q):
        raise InputError(f"quotient of {A.name} by {I.format(A)} is not flat")
    return Q, proj


# ---------------------------------------------------------- representation

@dataclass
class Representation:
    name: str
    points: tuple[str, ...]
    values: tuple[str, ...]
    functions: dict[str, PartialFunction]
    ops: tuple[str, ...] = ()

    def __getitem__(self, element: str) -> PartialFunction:
        return self.functions[element]

    def to_text(self) -> str:
        return format_functions(self.points, self.values, self.functions, ("represent", self.name))

    @classmethod
    def from_text(cls, text: str, ops: Sequence[str] = ()) -> "Representation":
        header, points, values, functions = parse_functions(text)
        if header is None or header[0] != "represent":
            raise InputError("representation files start with 'represent NAME'")
        return cls(header[1], points, values, functions, tuple(ops))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path, ops: Sequence[str] = ()) -> "Representation":
        return cls.from_text(Path(path).read_text(encoding="utf-8"), ops)


class NotRepresentable(Exception):
    """The algebra fails a law of the chosen suite; ``counterexample`` certifies it."""

    def __init__(self, suite: str, counterexample: Counterexample):
        self.suite = suite
        self.counterexample = counterexample
        law = counterexample.law
        super().__init__(f"{suite} law {law.name} fails: {counterexample}")


@dataclass(frozen=True)
class Discrepancy:
    kind: str          # "missing", "injectivity" or "operation"
    detail: str
    op: str | None = None
    left: str | None = None
    right: str | None = None

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def _working_algebra(A: FiniteAlgebra, signature: str) -> FiniteAlgebra:
    if signature not in SIGNATURES:
        raise SignatureError(f"unknown signature {signature!r}; expected one of {', '.join(SIGNATURES)}")
    try:
        return A.reduct(SIGNATURES[signature])
    except SignatureError as exc:
        raise SignatureError(f"{A.name} cannot be read in signature {signature}: {exc}") from None


def represent(A: FiniteAlgebra, signature: str = "vee", minimal: bool = False,
              bound: int = DEFAULT_IDEAL_BOUND, budget: int | None = None) -> Representation:
    """Embed ``A`` into partial functions, or raise NotRepresentable.

    Points are the relatively maximal ideals ``I0, I1, ...``; values are
    labelled ``k:j`` (class ``j`` of the ``k``-th ideal's congruence).  With
    ``minimal`` only a greedily chosen separating subset of ideals is kept.
    """
    B = _working_algebra(A, signature)
    cex = get_suite(signature).first_failure(B, budget)
    if cex is not None:
        raise NotRepresentable(signature, cex)
    ideals = relatively_maximal_ideals(B, "all", bound)
    congruences = [epsilon_congruence(B, I) for I in ideals]
    pick = list(range(len(ideals)))
    if minimal:
        pick = _separating_subset(B, ideals, congruences)
    return _assemble(A.name, B, [ideals[k] for k in pick], [congruences[k] for k in pick],
                     SIGNATURES[signature])


def _separating_subset(B, ideals, congruences) -> list[int]:
    pairs = {(a, b) for a in range(B.n) for b in range(a + 1, B.n)}
    chosen = []
    for k, (I, c) in enumerate(zip(ideals, congruences)):
        lab = c.labels()
        split = {(a, b) for a, b in pairs if lab[a] != lab[b]}
        if split:
            chosen.append(k)
            pairs -= split
        if not pairs:
            break
    return chosen


def _assemble(name, B, ideals, congruences, ops) -> Representation:
    points = tuple(f"I{k}" for k in range(len(ideals)))
    values = []
    graphs = [[-1] * len(ideals) for _ in range(B.n)]
    for k, (I, c) in enumerate(zip(ideals, congruences)):
        label_index = {}
        for j, block in enumerate(c.blocks):
            if block[0] in I:
                continue
            label_index[j] = len(values)
            values.append(f"{k}:{j}")
        lab = c.labels()
        for a in range(B.n):
            if a not in I:
                graphs[a][k] = label_index[lab[a]]
    values = tuple(values)
    functions = {B.elements[a]: PartialFunction(points, values, tuple(graphs[a])) for a in range(B.n)}
    return Representation(name, points, values, functions, tuple(ops))


def verify_representation(A: FiniteAlgebra, R: Representation, ops: Sequence[str] | None = None) -> Discrepancy | None:
    """Replay every table entry through the concrete operations; None when all agree."""
    ops = tuple(ops) if ops is not None else (R.ops or tuple(sorted(A.signature)))
    for e in A.elements:
        if e not in R.functions:
            return Discrepancy("missing", f"element {e} has no function")
    seen = {}
    for e in A.elements:
        f = R.functions[e]
        if f in seen:
            return Discrepancy("injectivity", f"{seen[f]} and {e} both map to {format_literal(f)}")
        seen[f] = e
    for op in ops:
        t = A.op(op)
        fn = OPERATIONS[op]
        for i, x in enumerate(A.elements):
            for j, y in enumerate(A.elements):
                expected = R.functions[A.elements[t[i, j]]]
                actual = fn(R.functions[x], R.functions[y])
                if actual != expected:
                    return Discrepancy(
                        "operation",
                        f"{op}({x}, {y}) = {A.elements[t[i, j]]} in the table, maps to "
                        f"{format_literal(expected)} but the functions give {format_literal(actual)}",
                        op, x, y)
    return None


def separating_ideal(A: FiniteAlgebra, a, b, bound: int = DEFAULT_IDEAL_BOUND) -> Ideal:
    """A relatively maximal ideal whose congruence separates ``a <= b`` (a != b).

    Starts from the elements below ``a`` (or below ``a+b`` when ``b <~ a``)
    and grows greedily in carrier order while ``b`` stays outside.
    """
    if A.n > bound:
        raise SizeError(f"{A.name} has {A.n} elements; ideal bound is {bound}")
    a = A.index(a) if isinstance(a, str) else int(a)
    b = A.index(b) if isinstance(b, str) else int(b)
    leq, lesssim = order_relations(A)
    if a == b or not leq[a, b]:
        raise InputError("separating_ideal needs distinct a <= b")
    v = A.op("vee")
    top = a if not lesssim[b, a] else int(v[a, b])
    cache = (_downsets(A), _join_table(A))
    I = ideal_closure(A, cache[0][top], cache)
    if b in I:
        raise InputError(f"{A.elements[b]} lies in the starting ideal; is this a vee-algebra?")
    grown = True
    while grown:
        grown = False
        for x in range(A.n):
            if x in I:
                continue
            J = ideal_closure(A, I.members | {x}, cache)
            if b not in J:
                I, grown = J, True
    lab = epsilon_congruence(A, I).labels()
    if lab[a] == lab[b]:
        raise InputError(f"{I.format(A)} does not separate {A.elements[a]} and {A.elements[b]}")
    return I
