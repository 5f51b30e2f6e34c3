"""Finite partial functions and the four operations on them.

A partial function lives in ``Par(X, Y)`` for explicit finite universes ``X``
(points) and ``Y`` (values).  The graph is stored densely: one slot per point
holding a value index, or ``-1`` where the function is undefined.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import FormatError, InputError, UniverseError

UNDEFINED = -1


@dataclass(frozen=True, eq=False)
class PartialFunction:
    points: tuple[str, ...]
    values: tuple[str, ...]
    graph: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise UniverseError(f"duplicate point names in {self.points}")
        if len(set(self.values)) != len(self.values):
            raise UniverseError(f"duplicate value names in {self.values}")
        if len(self.graph) != len(self.points):
            raise UniverseError("graph length must equal the number of points")
        for v in self.graph:
            if not (v == UNDEFINED or 0 <= v < len(self.values)):
                raise UniverseError(f"value index {v} outside the value universe")

    @classmethod
    def from_mapping(cls, points: Sequence[str], values: Sequence[str],
                     mapping: Mapping[str, str]) -> "PartialFunction":
        points, values = tuple(points), tuple(values)
        pindex = {p: k for k, p in enumerate(points)}
        vindex = {v: k for k, v in enumerate(values)}
        graph = [UNDEFINED] * len(points)
        for p, v in mapping.items():
            if p not in pindex:
                raise UniverseError(f"point {p!r} is not in the point universe")
            if v not in vindex:
                raise UniverseError(f"value {v!r} is not in the value universe")
            graph[pindex[p]] = vindex[v]
        return cls(points, values, tuple(graph))

    @classmethod
    def empty(cls, points: Sequence[str], values: Sequence[str]) -> "PartialFunction":
        return cls(tuple(points), tuple(values), (UNDEFINED,) * len(points))

    @property
    def mapping(self) -> dict[str, str]:
        return {p: self.values[v] for p, v in zip(self.points, self.graph) if v != UNDEFINED}

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(p for p, v in zip(self.points, self.graph) if v != UNDEFINED)

    def pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.mapping.items())

    def __call__(self, point: str) -> str | None:
        return self.mapping.get(point)

    def same_universes(self, other: "PartialFunction") -> bool:
        return set(self.points) == set(other.points) and set(self.values) == set(other.values)

    def aligned(self, points: tuple[str, ...], values: tuple[str, ...]) -> "PartialFunction":
        """Return the same function re-indexed over the given universe orderings."""
        if self.points == points and self.values == values:
            return self
        if set(self.points) != set(points) or set(self.values) != set(values):
            raise UniverseError("partial functions over different universes")
        return PartialFunction.from_mapping(points, values, self.mapping)

    def __eq__(self, other):
        if not isinstance(other, PartialFunction):
            return NotImplemented
        return self.same_universes(other) and self.pairs() == other.pairs()

    def __hash__(self):
        return hash((frozenset(self.points), frozenset(self.values), self.pairs()))

    def __len__(self):
        return len(self.domain)

    def __repr__(self):
        return f"PartialFunction({format_literal(self)})"


def _align(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    if f.points == g.points and f.values == g.values:
        return g
    if not f.same_universes(g):
        raise UniverseError(
            f"universe mismatch: points {sorted(f.points)} / {sorted(g.points)}, "
            f"values {sorted(f.values)} / {sorted(g.values)}")
    return g.aligned(f.points, f.values)


def _combine(f, g, rule):
    g = _align(f, g)
    return PartialFunction(f.points, f.values, tuple(rule(a, b) for a, b in zip(f.graph, g.graph)))


def _override(a, b):
    return a if a != UNDEFINED else b


def _restricted_union(a, b):
    if a == UNDEFINED:
        return b
    if b == UNDEFINED or a == b:
        return a
    return UNDEFINED


def _intersect(a, b):
    return a if a == b else UNDEFINED


def _difference(a, b):
    return a if a != b else UNDEFINED


def override(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    """``f`` where defined, ``g`` elsewhere."""
    return _combine(f, g, _override)


def restricted_union(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    """The union of the graphs, dropping every point where ``f`` and ``g`` conflict."""
    return _combine(f, g, _restricted_union)


def intersect(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    return _combine(f, g, _intersect)


def difference(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    return _combine(f, g, _difference)


# keyed by the canonical operation names used in algebra files
OPERATIONS = {
    "vee": restricted_union,
    "or": override,
    "meet": intersect,
    "minus": difference,
}

_RULES = {
    "vee": _restricted_union,
    "or": _override,
    "meet": _intersect,
    "minus": _difference,
}


def all_partial_functions(points: Sequence[str], values: Sequence[str]) -> list[PartialFunction]:
    """Every member of Par(points, values), in a fixed order starting with the empty function."""
    points, values = tuple(points), tuple(values)
    choices = [UNDEFINED] + list(range(len(values)))
    return [PartialFunction(points, values, g)
            for g in itertools.product(choices, repeat=len(points))]


def closure(generators: Sequence[PartialFunction], ops: Iterable[str],
            names: Sequence[str] | None = None, name: str = "closure", with_empty: bool = False):
    """Close ``generators`` under ``ops`` and read off the operation tables.

    The result is the least closed superset; ``with_empty`` also adds the
    empty function (named ``0`` unless it is a named generator).

    Returns ``(algebra, elements)`` where ``elements[k]`` is the partial
    function behind carrier element ``k``.  Generators keep the given names;
    elements discovered by the closure are named by their literal, e.g.
    ``{1:0,2:0}``.  Duplicate generators (equal graphs) are merged.
    """
    from .algebra import OPS, FiniteAlgebra

    ops = [op for op in OPS if op in set(ops)]
    if not ops:
        raise InputError("closure needs at least one operation")
    if not generators:
        raise InputError("closure needs at least one generator")
    if names is not None and len(names) != len(generators):
        raise InputError("one name per generator is required")
    first = generators[0]
    points, values = first.points, first.values

    elements: list[tuple[int, ...]] = []
    labels: list[str] = []
    index: dict[tuple[int, ...], int] = {}

    def add(graph, label):
        if graph not in index:
            index[graph] = len(elements)
            elements.append(graph)
            labels.append(label)

    for k, gen in enumerate(generators):
        gen = gen.aligned(points, values) if gen is not first else gen
        add(gen.graph, names[k] if names is not None else None)
    if with_empty:
        add((UNDEFINED,) * len(points), "0" if names is None or "0" not in names else None)

    rules = [_RULES[op] for op in ops]
    done = 0
    while done < len(elements):
        size = len(elements)
        # every pair with at least one member in the new range [done, size)
        for i in range(size):
            for j in range(done if i < done else 0, size):
                for rule in rules:
                    add(tuple(rule(a, b) for a, b in zip(elements[i], elements[j])), None)
        done = size

    functions = [PartialFunction(points, values, g) for g in elements]
    taken = {lab for lab in labels if lab is not None}
    final_names = []
    for lab, f in zip(labels, functions):
        if lab is None:
            lab = format_literal(f, compact=True)
            while lab in taken:
                lab += "'"
            taken.add(lab)
        final_names.append(lab)
    tables = {}
    for op, rule in zip(ops, rules):
        tables[op] = [[index[tuple(rule(a, b) for a, b in zip(x, y))] for y in elements]
                      for x in elements]
    return FiniteAlgebra(name, final_names, tables), functions


def algebra_of_functions(functions: Sequence[PartialFunction], ops: Iterable[str],
                         names: Sequence[str], name: str = "functions"):
    """Tables of an already-closed family of functions; raises if it is not closed."""
    from .algebra import OPS, FiniteAlgebra

    index = {f: k for k, f in enumerate(functions)}
    if len(index) != len(functions):
        raise InputError("functions must be pairwise distinct")
    tables = {}
    for op in (o for o in OPS if o in set(ops)):
        fn = OPERATIONS[op]
        rows = []
        for f in functions:
            row = []
            for g in functions:
                h = fn(f, g)
                if h not in index:
                    raise InputError(f"family is not closed under {op}: {format_literal(h)}")
                row.append(index[h])
            rows.append(row)
        tables[op] = rows
    return FiniteAlgebra(name, list(names), tables)


# ---------------------------------------------------------------- text form

def format_literal(f: PartialFunction, compact: bool = False) -> str:
    items = [f"{p}:{f.values[v]}" for p, v in zip(f.points, f.graph) if v != UNDEFINED]
    if compact:
        return "{" + ",".join(items) + "}"
    return "{ " + ", ".join(items) + " }" if items else "{}"


_ASSIGN = re.compile(r"^(\S+)\s*=\s*\{(.*)\}\s*$")


def parse_literal(body: str, points, values, line=None) -> PartialFunction:
    """Parse the inside of ``{ p:v, ... }`` (without braces)."""
    mapping = {}
    body = body.strip()
    if body:
        for item in body.split(","):
            item = item.strip()
            p, sep, v = item.partition(":")
            if not sep or not p or not v:
                raise FormatError(f"bad pair {item!r}, expected point:value", line)
            p, v = p.strip(), v.strip()
            if p in mapping:
                raise FormatError(f"point {p!r} given twice", line)
            mapping[p] = v
    try:
        return PartialFunction.from_mapping(points, values, mapping)
    except UniverseError as exc:
        raise FormatError(str(exc), line) from None


def parse_functions(text: str, points=None, values=None):
    """Parse a partial-function file.

    Returns ``(header, points, values, functions)`` where ``functions`` maps
    names to :class:`PartialFunction` in file order and ``header`` is the
    ``(keyword, name)`` of an optional leading line such as ``represent S``.
    Universes given as arguments must agree with any declared in the file.
    """
    header = None
    functions: dict[str, PartialFunction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head in ("points", "values"):
            names = tuple(rest.split())
            if functions:
                raise FormatError(f"{head} must be declared before any function", lineno)
            declared = points if head == "points" else values
            if declared is not None and set(declared) != set(names):
                raise FormatError(f"{head} {names} disagree with {tuple(declared)}", lineno)
            if head == "points":
                points = names
            else:
                values = names
            continue
        m = _ASSIGN.match(line)
        if m:
            if points is None or values is None:
                raise FormatError("points and values must be declared first", lineno)
            name = m.group(1)
            if name in functions:
                raise FormatError(f"function {name!r} defined twice", lineno)
            functions[name] = parse_literal(m.group(2), points, values, lineno)
            continue
        if header is None and not functions and len(line.split()) == 2:
            header = tuple(line.split())
            continue
        raise FormatError(f"cannot parse {raw.strip()!r}", lineno)
    if points is None or values is None:
        raise FormatError("missing points/values declaration")
    return header, tuple(points), tuple(values), functions


def format_functions(points, values, functions: Mapping[str, PartialFunction],
                     header: tuple[str, str] | None = None) -> str:
    lines = []
    if header:
        lines.append(" ".join(header))
    lines.append(" ".join(("points",) + tuple(points)))
    lines.append(" ".join(("values",) + tuple(values)))
    for name, f in functions.items():
        lines.append(f"{name} = {format_literal(f.aligned(tuple(points), tuple(values)))}")
    return "\n".join(lines) + "\n"
