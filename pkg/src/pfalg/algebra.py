"""Finite algebras given by operation tables.

Operations are named ``vee`` (restricted union), ``or`` (override), ``meet``
(intersection) and ``minus`` (difference).  Tables are ``n x n`` numpy arrays
of carrier indices; element names only matter at the I/O boundary.

Operations that are not declared can still be used when they are derivable:

* ``or``   from ``vee``:          a | b = a + (a + b)
* ``vee``  from ``or`` and meet:  a + b = (a | b) & (b | a)
* ``meet`` from ``minus``:        a & b = a \\ (a \\ b)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConsistencyError, FormatError, InputError, SignatureError, SizeError

OPS = ("vee", "or", "meet", "minus")
SYMBOLS = {"vee": "+", "or": "|", "meet": "&", "minus": "\\"}
UNICODE = {"vee": "⋎", "or": "⊔", "meet": "∩", "minus": "\\"}

DEFAULT_CONGRUENCE_BOUND = 8


def _freeze(table, n):
    arr = np.array(table, dtype=np.intp)
    if arr.shape != (n, n):
        raise InputError(f"table must be {n}x{n}, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise InputError("table entry outside the carrier")
    arr.setflags(write=False)
    return arr


class FiniteAlgebra:
    """A named carrier with tables for some of the four operations."""

    def __init__(self, name: str, elements: Sequence[str], tables: Mapping[str, object]):
        self.name = name
        self.elements = tuple(str(e) for e in elements)
        n = len(self.elements)
        if n < 1:
            raise InputError("carrier must be non-empty")
        if len(set(self.elements)) != n:
            raise InputError("duplicate element names")
        unknown = set(tables) - set(OPS)
        if unknown:
            raise SignatureError(f"unknown operations {sorted(unknown)}")
        self._tables = {op: _freeze(tables[op], n) for op in OPS if op in tables}
        self._derived: dict[str, np.ndarray] = {}
        self._index = {e: k for k, e in enumerate(self.elements)}

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def signature(self) -> frozenset[str]:
        return frozenset(self._tables)

    @property
    def tables(self) -> dict[str, np.ndarray]:
        return dict(self._tables)

    def index(self, element: str) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise InputError(f"{element!r} is not an element of {self.name}") from None

    def has(self, op: str) -> bool:
        try:
            self.op(op)
        except SignatureError:
            return False
        return True

    def op(self, op: str) -> np.ndarray:
        """Table for ``op``, declared or derived."""
        if op in self._tables:
            return self._tables[op]
        if op in self._derived:
            return self._derived[op]
        rows = np.arange(self.n)[:, None]
        if op == "or" and "vee" in self._tables:
            v = self._tables["vee"]
            table = v[rows, v]
        elif op == "vee" and "or" in self._tables and self._meet_available():
            u, m = self._tables["or"], self.op("meet")
            table = m[u, u.T]
        elif op == "meet" and "minus" in self._tables:
            d = self._tables["minus"]
            table = d[rows, d]
        elif op in OPS:
            raise SignatureError(f"{op} is neither declared nor derivable in {self.name}")
        else:
            raise SignatureError(f"unknown operation {op!r}")
        table = np.ascontiguousarray(table)
        table.setflags(write=False)
        self._derived[op] = table
        return table

    def _meet_available(self):
        return "meet" in self._tables or "minus" in self._tables

    def apply(self, op: str, a: str, b: str) -> str:
        return self.elements[self.op(op)[self.index(a), self.index(b)]]

    def reduct(self, ops: Iterable[str], name: str | None = None) -> "FiniteAlgebra":
        """Algebra over the same carrier with exactly ``ops`` (derived where needed)."""
        return FiniteAlgebra(name or self.name, self.elements, {op: self.op(op) for op in ops})

    def with_tables(self, tables: Mapping[str, object], name: str | None = None) -> "FiniteAlgebra":
        merged = dict(self._tables)
        merged.update(tables)
        return FiniteAlgebra(name or self.name, self.elements, merged)

    def renamed(self, elements: Sequence[str], name: str | None = None) -> "FiniteAlgebra":
        return FiniteAlgebra(name or self.name, elements, self._tables)

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (self.elements == other.elements and self.signature == other.signature
                and all(np.array_equal(self._tables[op], other._tables[op]) for op in self._tables))

    __hash__ = None

    def key(self) -> tuple:
        """Hashable identity of the labelled tables (names ignored)."""
        return (self.n,) + tuple((op, self._tables[op].tobytes()) for op in OPS if op in self._tables)

    def __repr__(self):
        return f"FiniteAlgebra({self.name!r}, n={self.n}, ops={sorted(self.signature)})"

    # ------------------------------------------------------------- text form

    def to_text(self) -> str:
        lines = [f"algebra {self.name}", "elements " + " ".join(self.elements)]
        for op in OPS:
            if op in self._tables:
                lines.append(f"op {op}")
                for row in self._tables[op]:
                    lines.append(" ".join(self.elements[k] for k in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FiniteAlgebra":
        return parse_algebra(text)

    @classmethod
    def load(cls, path) -> "FiniteAlgebra":
        return parse_algebra(Path(path).read_text(encoding="utf-8"))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


def parse_algebra(text: str) -> FiniteAlgebra:
    name = None
    elements = None
    tables: dict[str, list[list[str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        head = tokens[0]
        if head == "algebra" and name is None and elements is None:
            if len(tokens) != 2:
                raise FormatError("expected 'algebra NAME'", lineno)
            name = tokens[1]
        elif head == "elements" and elements is None:
            elements = tokens[1:]
            if not elements:
                raise FormatError("empty carrier", lineno)
            if len(set(elements)) != len(elements):
                raise FormatError("duplicate element names", lineno)
        elif head == "op" and len(tokens) == 2:
            if elements is None:
                raise FormatError("elements must precede op tables", lineno)
            if current is not None and len(tables[current]) != len(elements):
                raise FormatError(f"table {current} has {len(tables[current])} rows", lineno)
            op = tokens[1]
            if op not in OPS:
                raise FormatError(f"unknown op {op!r}; expected one of {', '.join(OPS)}", lineno)
            if op in tables:
                raise FormatError(f"op {op} declared twice", lineno)
            tables[op] = []
            current = op
        else:
            if current is None:
                raise FormatError(f"unexpected line {raw.strip()!r}", lineno)
            if len(tables[current]) == len(elements):
                raise FormatError(f"too many rows for op {current}", lineno)
            if len(tokens) != len(elements):
                raise FormatError(f"row has {len(tokens)} entries, expected {len(elements)}", lineno)
            for t in tokens:
                if t not in elements:
                    raise FormatError(f"{t!r} is not an element", lineno)
            tables[current].append(tokens)
    if name is None:
        raise FormatError("missing 'algebra NAME' line")
    if elements is None:
        raise FormatError("missing 'elements' line")
    if current is not None and len(tables[current]) != len(elements):
        raise FormatError(f"table {current} has {len(tables[current])} rows, expected {len(elements)}")
    if not tables:
        raise FormatError("no op tables")
    index = {e: k for k, e in enumerate(elements)}
    return FiniteAlgebra(name, elements, {op: [[index[t] for t in row] for row in rows]
                                          for op, rows in tables.items()})


# ------------------------------------------------------------ derived things

def derived_override(A: FiniteAlgebra) -> FiniteAlgebra:
    """Add the override table a | b = a + (a + b) to an algebra with ``vee``."""
    if "vee" not in A.signature:
        raise SignatureError(f"{A.name} has no vee table")
    v = A.op("vee")
    derived = v[np.arange(A.n)[:, None], v]
    if "or" in A.signature:
        bad = np.argwhere(A.op("or") != derived)
        if len(bad):
            i, j = bad[0]
            raise ConsistencyError(
                f"declared {A.elements[i]} | {A.elements[j]} = {A.apply('or', A.elements[i], A.elements[j])}"
                f" but {A.elements[i]} + ({A.elements[i]} + {A.elements[j]}) = {A.elements[derived[i, j]]}")
        return A
    return A.with_tables({"or": derived})


def order_relations(A: FiniteAlgebra) -> tuple[np.ndarray, np.ndarray]:
    """Boolean matrices ``(leq, lesssim)``: a <= b iff a|b = b, a <~ b iff b|a = b."""
    u = A.op("or")
    cols = np.arange(A.n)[None, :]
    leq = u == cols
    lesssim = u.T == cols
    return leq, lesssim


def is_flat(A: FiniteAlgebra) -> bool:
    """True when some element 0 has a + 0 = a and a + b = 0 for distinct non-zero a, b."""
    v = A.op("vee")
    n = A.n
    if any(v[a, a] != a for a in range(n)):
        return False
    for z in range(n):
        if all(v[a, z] == a and v[z, a] == a for a in range(n)):
            if all(v[a, b] == z for a in range(n) for b in range(n) if a != b and z not in (a, b)):
                return True
    return False


def flat_algebra(n: int, ops: Iterable[str] = ("vee",), names: Sequence[str] | None = None) -> FiniteAlgebra:
    """The flat algebra with bottom element 0 and ``n - 1`` maximal elements."""
    names = list(names) if names is not None else [str(k) for k in range(n)]
    vee = [[a if a == b or b == 0 else b if a == 0 else 0 for b in range(n)] for a in range(n)]
    over = [[b if a == 0 else a for b in range(n)] for a in range(n)]
    meet = [[a if a == b else 0 for b in range(n)] for a in range(n)]
    minus = [[0 if a == b else a for b in range(n)] for a in range(n)]
    every = {"vee": vee, "or": over, "meet": meet, "minus": minus}
    return FiniteAlgebra(f"flat{n}", names, {op: every[op] for op in ops})


# -------------------------------------------------------------- congruences

@dataclass(frozen=True)
class Congruence:
    """A partition of the carrier indices, blocks sorted by their least member."""

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Congruence":
        blocks = [tuple(sorted(set(b))) for b in blocks]
        seen: list[int] = []
        for b in blocks:
            if not b:
                raise InputError("empty block")
            seen.extend(b)
        if len(seen) != len(set(seen)):
            raise InputError("blocks overlap")
        if sorted(seen) != list(range(n)):
            raise InputError("blocks do not cover the carrier")
        return cls(tuple(sorted(blocks)))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Congruence":
        groups: dict[int, list[int]] = {}
        for k, lab in enumerate(labels):
            groups.setdefault(lab, []).append(k)
        return cls(tuple(sorted(tuple(g) for g in groups.values())))

    @classmethod
    def from_names(cls, A: FiniteAlgebra, blocks: Iterable[Iterable[str]]) -> "Congruence":
        return cls.from_blocks(A.n, [[A.index(e) for e in b] for b in blocks])

    @classmethod
    def diagonal(cls, n: int) -> "Congruence":
        return cls(tuple((k,) for k in range(n)))

    @classmethod
    def full(cls, n: int) -> "Congruence":
        return cls((tuple(range(n)),))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def labels(self) -> list[int]:
        lab = [0] * self.n
        for k, b in enumerate(self.blocks):
            for e in b:
                lab[e] = k
        return lab

    def names(self, A: FiniteAlgebra) -> list[list[str]]:
        return [[A.elements[e] for e in b] for b in self.blocks]

    def meet(self, other: "Congruence") -> "Congruence":
        a, b = self.labels(), other.labels()
        return Congruence.from_labels([(x, y) for x, y in zip(a, b)])

    def refines(self, other: "Congruence") -> bool:
        lab = other.labels()
        return all(len({lab[e] for e in b}) == 1 for b in self.blocks)

    def format(self, A: FiniteAlgebra) -> str:
        return " ".join("{" + ",".join(b) + "}" for b in self.names(A))


@dataclass(frozen=True)
class CongruenceViolation:
    """op(a, b) and op(a2, b2) land in different blocks although a~a2 and b~b2."""

    op: str
    a: int
    a2: int
    b: int
    b2: int

    def describe(self, A: FiniteAlgebra) -> str:
        e = A.elements
        t = A.op(self.op)
        s = SYMBOLS[self.op]
        return (f"{e[self.a]}~{e[self.a2]} and {e[self.b]}~{e[self.b2]} but "
                f"{e[self.a]}{s}{e[self.b]}={e[t[self.a, self.b]]} is not related to "
                f"{e[self.a2]}{s}{e[self.b2]}={e[t[self.a2, self.b2]]}")


def _as_congruence(A, partition) -> Congruence:
    if isinstance(partition, Congruence):
        if partition.n != A.n:
            raise InputError("partition size does not match the carrier")
        return Congruence.from_blocks(A.n, partition.blocks)
    blocks = list(partition)
    if blocks and all(isinstance(e, str) for b in blocks for e in b):
        return Congruence.from_names(A, blocks)
    return Congruence.from_blocks(A.n, blocks)


def congruence_violation(A: FiniteAlgebra, partition) -> CongruenceViolation | None:
    """First compatibility failure of ``partition`` with a declared table, or None.

    Substituting one related argument at a time is enough: compatibility in
    each argument separately implies compatibility in both.
    """
    c = _as_congruence(A, partition)
    lab = np.array(c.labels())
    for op in OPS:
        if op not in A.signature:
            continue
        t = A.op(op)
        cls = lab[t]
        for block in c.blocks:
            rep = block[0]
            for x in block[1:]:
                rows = np.nonzero(cls[rep] != cls[x])[0]
                if len(rows):
                    b = int(rows[0])
                    return CongruenceViolation(op, rep, x, b, b)
                cols = np.nonzero(cls[:, rep] != cls[:, x])[0]
                if len(cols):
                    a = int(cols[0])
                    return CongruenceViolation(op, a, a, rep, x)
    return None


def is_congruence(A: FiniteAlgebra, partition) -> bool:
    return congruence_violation(A, partition) is None


def quotient(A: FiniteAlgebra, partition, names: Sequence[str] | None = None,
             name: str | None = None) -> tuple[FiniteAlgebra, list[int]]:
    """Quotient algebra and the projection (element index -> block index).

    Singleton blocks keep their element's name, larger blocks are named
    ``{x,y,...}`` unless ``names`` is given.
    """
    c = _as_congruence(A, partition)
    bad = congruence_violation(A, c)
    if bad is not None:
        raise InputError(f"not a congruence: {bad.describe(A)}")
    lab = c.labels()
    if names is None:
        names = [A.elements[b[0]] if len(b) == 1 else "{" + ",".join(A.elements[e] for e in b) + "}"
                 for b in c.blocks]
    tables = {}
    for op in A.signature:
        t = A.op(op)
        tables[op] = [[lab[t[bi[0], bj[0]]] for bj in c.blocks] for bi in c.blocks]
    return FiniteAlgebra(name or f"{A.name}-quotient", names, tables), lab


def _generated(A: FiniteAlgebra, pairs, ops) -> list[int]:
    """Labels of the least congruence identifying every pair in ``pairs``."""
    n = A.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending = list(pairs)
    tables = [A.op(op) for op in ops]
    while pending:
        x, y = pending.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        parent[max(rx, ry)] = min(rx, ry)
        for t in tables:
            for z in range(n):
                pending.append((int(t[x, z]), int(t[y, z])))
                pending.append((int(t[z, x]), int(t[z, y])))
    return [find(x) for x in range(n)]


def _canonical_order(congruences: Iterable[Congruence]) -> list[Congruence]:
    return sorted(set(congruences), key=lambda c: (-len(c.blocks), c.labels()))


def enumerate_congruences(A: FiniteAlgebra, bound: int = DEFAULT_CONGRUENCE_BOUND) -> list[Congruence]:
    """All congruences, finest first.

    Principal congruences are generated by union-find closure, then closed
    under joins.  Ties in the number of blocks are broken by the label vector.
    """
    if A.n > bound:
        raise SizeError(f"{A.name} has {A.n} elements; congruence bound is {bound}")
    ops = sorted(A.signature)
    principal = {}
    for a, b in itertools.combinations(range(A.n), 2):
        c = Congruence.from_labels(_generated(A, [(a, b)], ops))
        principal[c] = None
    found = {Congruence.diagonal(A.n)}
    frontier = list(principal)
    found.update(frontier)
    plist = list(principal)
    while frontier:
        fresh = []
        for c in frontier:
            for p in plist:
                pairs = [(b[0], e) for blk in (c.blocks, p.blocks) for b in blk for e in b[1:]]
                j = Congruence.from_labels(_generated(A, pairs, ops))
                if j not in found:
                    found.add(j)
                    fresh.append(j)
        frontier = fresh
    return _canonical_order(found)


def _set_partitions(n):
    """Restricted growth strings of length n."""
    if n == 0:
        yield []
        return

    def rec(prefix, m):
        if len(prefix) == n:
            yield list(prefix)
            return
        for v in range(m + 2):
            prefix.append(v)
            yield from rec(prefix, max(m, v))
            prefix.pop()

    yield from rec([0], 0)


def congruences_by_filtering(A: FiniteAlgebra, bound: int = 6) -> list[Congruence]:
    """Brute force: test every partition of the carrier (cross-check for small n)."""
    if A.n > bound:
        raise SizeError(f"partition filtering is limited to {bound} elements")
    found = [Congruence.from_labels(lab) for lab in _set_partitions(A.n)]
    return _canonical_order(c for c in found if is_congruence(A, c))


# ------------------------------------------------------------- isomorphism

def _profiles(A: FiniteAlgebra, ops) -> list[tuple]:
    n = A.n
    profile = [[] for _ in range(n)]
    for op in ops:
        t = A.op(op)
        counts = np.bincount(t.ravel(), minlength=n)
        for a in range(n):
            profile[a].append((t[a, a] == a, int(counts[a]),
                               len(set(t[a].tolist())), len(set(t[:, a].tolist()))))
    if A.has("or"):
        leq, _ = order_relations(A)
        for a in range(n):
            profile[a].append((int(leq[a].sum()), int(leq[:, a].sum())))
    return [tuple(p) for p in profile]


def invariant_key(A: FiniteAlgebra) -> tuple:
    """Isomorphism-invariant summary; equal keys are necessary for isomorphism."""
    return (A.n, tuple(sorted(A.signature)), tuple(sorted(_profiles(A, sorted(A.signature)))))


def find_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra) -> list[int] | None:
    """A bijection ``f`` (as a list) with f(op_A(x, y)) = op_B(f x, f y), or None."""
    if A.signature != B.signature:
        raise SignatureError(f"signatures differ: {sorted(A.signature)} vs {sorted(B.signature)}")
    if A.n != B.n:
        return None
    ops = sorted(A.signature)
    pa, pb = _profiles(A, ops), _profiles(B, ops)
    if sorted(pa) != sorted(pb):
        return None
    n = A.n
    ta = [A.op(op) for op in ops]
    tb = [B.op(op) for op in ops]
    candidates = [[y for y in range(n) if pb[y] == pa[x]] for x in range(n)]
    order = sorted(range(n), key=lambda x: (len(candidates[x]), x))

    def extend(f, used, x, y):
        """Assign x -> y and propagate forced images; None on conflict."""
        f = dict(f)
        used = set(used)
        queue = [(x, y)]
        while queue:
            x, y = queue.pop()
            if x in f:
                if f[x] != y:
                    return None
                continue
            if y in used or pa[x] != pb[y]:
                return None
            f[x] = y
            used.add(y)
            for s, t in zip(ta, tb):
                for z, w in list(f.items()):
                    queue.append((int(s[x, z]), int(t[y, w])))
                    queue.append((int(s[z, x]), int(t[w, y])))
        return f, used

    def search(f, used):
        if len(f) == n:
            return f
        x = next(e for e in order if e not in f)
        for y in candidates[x]:
            if y in used:
                continue
            step = extend(f, used, x, y)
            if step is not None:
                result = search(*step)
                if result is not None:
                    return result
        return None

    found = search({}, set())
    if found is None:
        return None
    return [found[x] for x in range(n)]


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, f: Sequence[int], ops=None) -> bool:
    ops = ops if ops is not None else sorted(A.signature & B.signature)
    f = np.asarray(f)
    return all(np.array_equal(f[A.op(op)], B.op(op)[f[:, None], f[None, :]]) for op in ops)
