"""Bounded finite-model search.

Tables are filled one cell at a time by depth-first search.  Unfilled cells
hold the sentinel value ``n`` and every table carries an extra row and column
of sentinels, so a term evaluates to ``n`` exactly when it touches an unknown
cell.  After each assignment the laws mentioning the assigned operation are
evaluated over all variable assignments at once; a law is violated as soon as
some assignment has fully known premises that hold and a fully known
conclusion that fails.

Cells are visited by increasing ``max(row, col)``, so all laws get checked on
small sub-squares early.  Idempotent diagonals, commutative mirrors and the
``has-bottom`` cells of element 0 are fixed before the search starts.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .algebra import OPS, FiniteAlgebra, find_isomorphism, invariant_key
from .errors import BudgetError, FormatError, InputError, SignatureError
from .lawlang import Law, check_law, compile_term, equations, load_laws, parse_law, term_ops, term_size
from .suites import find_law, get_suite

DEFAULT_SEARCH_BUDGET = 10**9
CONSTRAINTS = ("commutative", "idempotent", "has-bottom")


@dataclass(frozen=True)
class SearchSpec:
    size: int
    ops: tuple[str, ...]
    commutative: frozenset[str] = frozenset()
    idempotent: frozenset[str] = frozenset()
    has_bottom: frozenset[str] = frozenset()
    must_hold: tuple[Law, ...] = ()
    must_fail: tuple[Law, ...] = ()
    limit: int | None = None
    dedup: bool = False
    budget: int = DEFAULT_SEARCH_BUDGET

    def __post_init__(self):
        if self.size < 1:
            raise InputError("carrier size must be at least 1")
        if not self.ops or len(set(self.ops)) != len(self.ops) or set(self.ops) - set(OPS):
            raise InputError(f"ops must be distinct names from {', '.join(OPS)}")
        for kind in ("commutative", "idempotent", "has_bottom"):
            extra = getattr(self, kind) - set(self.ops)
            if extra:
                raise InputError(f"inconsistent constraints: {kind} names ops {sorted(extra)} not searched")
        if self.limit is not None and self.limit < 1:
            raise InputError("limit must be positive")
        for law in self.must_hold + self.must_fail:
            try:
                equations(law, set(self.ops))
            except SignatureError as exc:
                raise InputError(f"law {law.name or law.body()} cannot be checked: {exc}") from None
        _Search(self, check_budget=False)

    def raw_count(self) -> int:
        return self.size ** len(_Search(self, check_budget=False).free)


class _CompiledLaw:
    def __init__(self, law: Law, ops: set[str], n: int):
        self.law = law
        names = law.variables()
        slots = {v: k for k, v in enumerate(names)}
        prem, concl = equations(law, ops)
        self.ops = set()
        for l, r in prem + [concl]:
            self.ops |= term_ops(l) | term_ops(r)
        self.prem = [(compile_term(l, slots), compile_term(r, slots)) for l, r in prem]
        self.concl = (compile_term(concl[0], slots), compile_term(concl[1], slots))
        k = len(names)
        self.cols = [c.ravel() for c in np.indices((n,) * k)] if k else []
        self.cost = (n**k) * (1 + sum(term_size(t) for pair in prem + [concl] for t in pair))
        self.n = n

    def violated(self, tables) -> bool:
        n, cols = self.n, self.cols
        ok = None
        for l, r in self.prem:
            lv, rv = l(tables, cols), r(tables, cols)
            eq = (lv == rv) & (lv < n)
            ok = eq if ok is None else ok & eq
            if not ok.any():
                return False
        lv, rv = self.concl[0](tables, cols), self.concl[1](tables, cols)
        bad = (lv != rv) & (lv < n) & (rv < n)
        if ok is not None:
            bad &= ok
        return bool(bad.any())


class _Search:
    def __init__(self, spec: SearchSpec, check_budget: bool = True):
        self.spec = spec
        n = self.n = spec.size
        self.ops = list(spec.ops)
        sentinel = n
        self.tables = {op: np.full((n + 1, n + 1), sentinel, dtype=np.intp) for op in self.ops}
        fixed: dict[tuple[str, int, int], int] = {}

        def fix(op, i, j, v):
            key = (op, i, j)
            if fixed.get(key, v) != v:
                raise InputError(f"inconsistent constraints: {op} cell ({i},{j}) forced to two values")
            fixed[key] = v

        for op in spec.idempotent:
            for a in range(n):
                fix(op, a, a, a)
        for op in spec.has_bottom:
            for a in range(n):
                if op in ("vee", "or"):
                    fix(op, 0, a, a)
                    fix(op, a, 0, a)
                elif op == "meet":
                    fix(op, 0, a, 0)
                    fix(op, a, 0, 0)
                else:
                    fix(op, a, 0, a)
                    fix(op, 0, a, 0)
        for op in spec.commutative:
            for (o, i, j), v in list(fixed.items()):
                if o == op:
                    fix(op, j, i, v)
        for (op, i, j), v in fixed.items():
            self.tables[op][i, j] = v

        free = []
        for oi, op in enumerate(self.ops):
            comm = op in spec.commutative
            for i in range(n):
                for j in range(n):
                    if (op, i, j) in fixed or (comm and i > j):
                        continue
                    free.append((max(i, j), oi, i, j))
        free.sort()
        self.free = [(self.ops[oi], i, j, op_comm) for _, oi, i, j in free
                     for op_comm in [self.ops[oi] in spec.commutative]]
        if check_budget:
            raw = n ** len(self.free)
            if raw > spec.budget:
                raise BudgetError(f"{n}^{len(self.free)} = {raw} candidate tables exceed budget {spec.budget}")

        opset = set(self.ops)
        laws = [_CompiledLaw(law, opset, n) for law in spec.must_hold]
        laws.sort(key=lambda c: c.cost)
        self.laws = laws
        self.by_op = {op: [c for c in laws if op in c.ops] for op in self.ops}

    def consistent(self, op=None) -> bool:
        laws = self.laws if op is None else self.by_op[op]
        return not any(c.violated(self.tables) for c in laws)

    def _set(self, cell, v):
        op, i, j, comm = cell
        t = self.tables[op]
        t[i, j] = v
        if comm:
            t[j, i] = v

    def prefixes(self, depth: int) -> list[tuple[int, ...]]:
        """Consistent value tuples for the first ``depth`` free cells, in search order."""
        out = []
        if not self.consistent():
            return out
        depth = min(depth, len(self.free))

        def rec(d, acc):
            if d == depth:
                out.append(tuple(acc))
                return
            cell = self.free[d]
            for v in range(self.n):
                self._set(cell, v)
                if self.consistent(cell[0]):
                    acc.append(v)
                    rec(d + 1, acc)
                    acc.pop()
            self._set(cell, self.n)

        rec(0, [])
        return out

    def run(self, prefix: Sequence[int] = ()) -> Iterator[dict[str, np.ndarray]]:
        """Complete tables satisfying ``must_hold``, in lexicographic cell order."""
        for cell, v in zip(self.free, prefix):
            self._set(cell, v)
        if not self.consistent():
            return
        yield from self._dfs(len(prefix))

    def _dfs(self, d):
        if d == len(self.free):
            yield {op: self.tables[op][: self.n, : self.n].copy() for op in self.ops}
            return
        cell = self.free[d]
        for v in range(self.n):
            self._set(cell, v)
            if self.consistent(cell[0]):
                yield from self._dfs(d + 1)
        self._set(cell, self.n)


def _fails_all(A: FiniteAlgebra, laws) -> bool:
    return all(check_law(A, law) is not None for law in laws)


def _models(spec: SearchSpec, prefix=()) -> Iterator[FiniteAlgebra]:
    names = [str(k) for k in range(spec.size)]
    for tables in _Search(spec).run(prefix):
        A = FiniteAlgebra("model", names, tables)
        if _fails_all(A, spec.must_fail):
            yield A


def _worker(args):
    spec, prefix = args
    limit = spec.limit if not spec.dedup else None
    out = []
    for A in _models(spec, prefix):
        out.append({op: A.op(op).tolist() for op in A.signature})
        if limit is not None and len(out) >= limit:
            break
    return out


class _Deduper:
    """Keeps the first model of each isomorphism class (invariants cached)."""

    def __init__(self):
        self.classes: dict[tuple, list[FiniteAlgebra]] = {}

    def add(self, A: FiniteAlgebra) -> bool:
        key = invariant_key(A)
        bucket = self.classes.setdefault(key, [])
        for B in bucket:
            if find_isomorphism(A, B) is not None:
                return False
        bucket.append(A)
        return True


def find_models(spec: SearchSpec, jobs: int = 1) -> list[FiniteAlgebra]:
    """Models of ``spec`` in deterministic order, independent of ``jobs``."""
    search = _Search(spec)
    if jobs > 1 and search.free:
        depth = 1
        while depth < len(search.free) and spec.size ** depth < 4 * jobs:
            depth += 1
        prefixes = search.prefixes(depth)
        names = [str(k) for k in range(spec.size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_worker, [(spec, p) for p in prefixes]))
        stream = (FiniteAlgebra("model", names, t) for chunk in chunks for t in chunk)
    else:
        stream = _models(spec)
    out = []
    dedup = _Deduper() if spec.dedup else None
    for A in stream:
        if dedup is not None and not dedup.add(A):
            continue
        out.append(A.renamed(A.elements, name=f"model{len(out) + 1}"))
        if spec.limit is not None and len(out) >= spec.limit:
            break
    return out


# -------------------------------------------------------------- spec files

def resolve_laws(token: str, base: Path | None = None) -> list[Law]:
    """Laws named by ``token``: a suite (``vee``, ``vee:eq``), a law file, a
    built-in law name (``vee-quasi`` or ``vee.vee-quasi``) or an inline law."""
    try:
        return list(get_suite(token).laws)
    except InputError:
        pass
    path = Path(token) if base is None or Path(token).is_absolute() else base / token
    if path.is_file():
        return load_laws(path)
    if any(sym in token for sym in ("=", "<~")):
        return [parse_law(token, name=token)]
    return [find_law(token)]


def _split_constraints(tokens, ops):
    out = {"commutative": set(), "idempotent": set(), "has-bottom": set()}
    for tok in tokens:
        kind, _, which = tok.partition(":")
        if kind not in out:
            raise InputError(f"unknown constraint {kind!r}; expected one of {', '.join(CONSTRAINTS)}")
        out[kind] |= set(which.split(",")) if which else set(ops)
    return out


def build_spec(size: int, ops: Sequence[str], constraints: Sequence[str] = (), hold: Sequence[str] = (),
               fail: Sequence[str] = (), limit: int | None = None, dedup: bool = False,
               budget: int = DEFAULT_SEARCH_BUDGET, base: Path | None = None) -> SearchSpec:
    ops = tuple(op for o in ops for op in o.split(",") if op)
    cons = _split_constraints(constraints, ops)
    must_hold = tuple(l for tok in hold for l in resolve_laws(tok, base))
    must_fail = tuple(l for tok in fail for l in resolve_laws(tok, base))
    return SearchSpec(size, ops, frozenset(cons["commutative"]), frozenset(cons["idempotent"]),
                      frozenset(cons["has-bottom"]), must_hold, must_fail, limit, dedup, budget)


_TRUE = {"yes", "true", "on", "1"}
_FALSE = {"no", "false", "off", "0"}


def parse_spec(text: str, base: Path | None = None) -> SearchSpec:
    """Spec file: ``key: value`` lines with keys size, ops, constraints, hold,
    fail, limit, dedup and budget.  ``hold`` and ``fail`` may repeat."""
    fields: dict[str, list[str]] = {"constraints": [], "hold": [], "fail": [], "ops": []}
    scalars = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep or " " in key.strip():
            key, _, value = line.partition(" ")
        key, value = key.strip(), value.strip()
        if key in ("hold", "fail"):
            # one law or name per line keeps inline laws with spaces intact
            toks = [value] if any(s in value for s in ("=", "<~")) else value.split()
            fields[key].extend(toks)
        elif key in ("constraints", "ops"):
            fields[key].extend(value.replace(",", " ").split() if key == "ops" else value.split())
        elif key in ("size", "limit", "budget"):
            try:
                scalars[key] = int(value)
            except ValueError:
                raise FormatError(f"{key} must be an integer", lineno) from None
        elif key == "dedup":
            if value.lower() not in _TRUE | _FALSE:
                raise FormatError("dedup must be yes or no", lineno)
            scalars[key] = value.lower() in _TRUE
        else:
            raise FormatError(f"unknown key {key!r}", lineno)
    if "size" not in scalars or not fields["ops"]:
        raise FormatError("spec needs at least 'size' and 'ops'")
    return build_spec(scalars["size"], fields["ops"], fields["constraints"], fields["hold"], fields["fail"],
                      scalars.get("limit"), scalars.get("dedup", False),
                      scalars.get("budget", DEFAULT_SEARCH_BUDGET), base)


def load_spec(path) -> SearchSpec:
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), path.parent)


def search_all(spec: SearchSpec, sizes: Sequence[int], jobs: int = 1) -> dict[int, list[FiniteAlgebra]]:
    return {n: find_models(replace(spec, size=n), jobs) for n in sizes}


def default_jobs() -> int:
    return max(1, (os.cpu_count() or 1) // 2)
