"""Command-line front end.

Exit codes: 0 when every check passes or the artifact is produced, 1 for a
law failure or a non-representability certificate, 2 for usage and input
errors (including budget refusals).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .algebra import (DEFAULT_CONGRUENCE_BOUND, FiniteAlgebra, enumerate_congruences, quotient)
from .errors import PfalgError
from .lawlang import Counterexample, counterexamples, holds_at, load_laws
from .pfun import closure, parse_functions
from .rep import (DEFAULT_IDEAL_BOUND, SIGNATURES, NotRepresentable, all_ideals, relatively_maximal_ideals,
                  represent, verify_representation)
from .search import DEFAULT_SEARCH_BUDGET, build_spec, find_models, load_spec
from .suites import all_suites, get_suite

PASS, FAIL, ERROR = 0, 1, 2


class UsageError(PfalgError):
    pass


def data_path(name: str) -> Path | None:
    """Path of a bundled data file, accepting the name with or without ``.alg``."""
    root = resources.files("pfalg") / "data"
    for candidate in (name, name + ".alg"):
        p = root / candidate
        if p.is_file():
            return Path(str(p))
    return None


def load_algebra(spec: str) -> FiniteAlgebra:
    """Load from a path, falling back to the bundled examples."""
    p = Path(spec)
    if not p.is_file():
        bundled = data_path(spec)
        if bundled is None:
            raise UsageError(f"no such algebra file: {spec}")
        p = bundled
    return FiniteAlgebra.load(p)


def _emit(args, text: str, payload) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif text:
        print(text)


def _cex_payload(cex: Counterexample) -> dict:
    return {"law": cex.law.name, "citation": cex.law.citation, **cex.as_dict()}


def _size(A: FiniteAlgebra) -> str:
    return f"{A.n} element" + ("" if A.n == 1 else "s")


def _parse_assignment(text: str) -> dict[str, str]:
    env = {}
    for item in text.split(","):
        var, sep, val = item.partition("=")
        if not sep or not var.strip() or not val.strip():
            raise UsageError(f"bad assignment {item!r}; expected var=element")
        env[var.strip()] = val.strip()
    return env


# ------------------------------------------------------------------ check

def cmd_check(args) -> int:
    A = load_algebra(args.algebra)
    if args.suite:
        suite = get_suite(args.suite)
        B, laws = suite.reduct(A), list(suite.laws)
        title = f"suite {suite.name}"
    else:
        B, laws = A, load_laws(args.laws)
        title = f"laws from {args.laws}"
    if args.law:
        wanted = set(args.law)
        missing = wanted - {l.name for l in laws}
        if missing:
            raise UsageError(f"no law named {', '.join(sorted(missing))} in {title}")
        laws = [l for l in laws if l.name in wanted]

    if args.at:
        env = _parse_assignment(args.at)
        for v in env.values():
            B.index(v)
        rows, lines, failed = [], [], False
        for law in laws:
            if set(law.variables()) - set(env):
                raise UsageError(f"{law.name} needs values for {', '.join(law.variables())}")
            ok = holds_at(B, law, {v: env[v] for v in law.variables()})
            failed |= not ok
            rows.append({"law": law.name, "citation": law.citation, "verdict": "pass" if ok else "fail"})
            lines.append(f"{'pass' if ok else 'FAIL'}  {law.name}")
        head = f"{A.name} ({_size(A)}), {title}, at {args.at}"
        _emit(args, "\n".join([head] + lines),
              {"algebra": A.name, "assignment": env, "results": rows, "verdict": "fail" if failed else "pass"})
        return FAIL if failed else PASS

    rows, lines, failed = [], [f"{A.name} ({_size(A)}), {title}"], False
    for law in laws:
        found = counterexamples(B, law, args.budget)
        first = next(found, None)
        row = {"law": law.name, "citation": law.citation, "verdict": "pass" if first is None else "fail"}
        if first is None:
            lines.append(f"pass  {law.name}")
        else:
            failed = True
            cexs = [first] + (list(found) if args.all_counterexamples else [])
            row["counterexample"] = first.as_dict()
            if args.all_counterexamples:
                row["counterexamples"] = [c.as_dict() for c in cexs]
            lines.append(f"FAIL  {law.name}: {first}")
            for c in cexs[1:]:
                lines.append(f"      also {c}")
        rows.append(row)
    verdict = "fail" if failed else "pass"
    lines.append(f"verdict: {verdict}")
    _emit(args, "\n".join(lines), {"algebra": A.name, "results": rows, "verdict": verdict})
    return FAIL if failed else PASS


# -------------------------------------------------------------- represent

def cmd_represent(args) -> int:
    A = load_algebra(args.algebra)
    try:
        R = represent(A, args.signature, minimal=args.minimal, bound=args.bound, budget=args.budget)
    except NotRepresentable as exc:
        cex = exc.counterexample
        _emit(args, f"{A.name} is not representable: suite {exc.suite}, law {cex.law.name} fails at {cex}",
              {"algebra": A.name, "verdict": "not-representable", "suite": exc.suite,
               "certificate": _cex_payload(cex)})
        return FAIL
    payload = {"algebra": A.name, "verdict": "represented", "points": list(R.points),
               "values": list(R.values)}
    lines = []
    if args.out:
        R.save(args.out)
        lines.append(f"wrote {args.out}")
    else:
        lines.append(R.to_text().rstrip("\n"))
    if args.verify:
        bad = verify_representation(A, R, SIGNATURES[args.signature])
        payload["verified"] = bad is None
        if bad is not None:
            payload["discrepancy"] = str(bad)
            lines.append(f"verification FAILED: {bad}")
            _emit(args, "\n".join(lines), payload)
            return FAIL
        lines.append(f"verified: injective and preserves {', '.join(SIGNATURES[args.signature])}")
    payload["functions"] = {e: f.mapping for e, f in R.functions.items()}
    _emit(args, "\n".join(lines), payload)
    return PASS


# ----------------------------------------------------------------- search

def cmd_search(args) -> int:
    if args.spec:
        spec = load_spec(args.spec)
        if args.limit is not None or args.dedup:
            from dataclasses import replace
            spec = replace(spec, limit=args.limit if args.limit is not None else spec.limit,
                           dedup=spec.dedup or args.dedup)
    else:
        if args.size is None or not args.ops:
            raise UsageError("search needs --spec or both --size and --ops")
        spec = build_spec(args.size, args.ops, args.constraints, args.hold, args.fail, args.limit,
                          args.dedup, args.budget)
    models = find_models(spec, args.jobs)
    lines = [f"{len(models)} model(s) of size {spec.size}"]
    for A in models:
        lines.append(A.to_text().rstrip("\n"))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for A in models:
            A.save(out / f"{A.name}.alg")
    _emit(args, "\n".join(lines), {"size": spec.size, "count": len(models),
                                   "models": [{"name": A.name, "elements": list(A.elements),
                                               "tables": {op: A.op(op).tolist() for op in sorted(A.signature)}}
                                              for A in models]})
    return PASS


# ---------------------------------------------------------------- closure

def cmd_closure(args) -> int:
    text = Path(args.generators).read_text(encoding="utf-8")
    _, points, values, gens = parse_functions(text, args.points, args.values)
    if not gens:
        raise UsageError("generator file defines no functions")
    ops = [op for o in args.ops for op in o.split(",") if op]
    A, functions = closure(list(gens.values()), ops, names=list(gens), name=args.name,
                           with_empty=args.with_empty)
    lines = [f"closure of {len(gens)} generator(s) under {', '.join(ops)}: {A.n} elements"]
    lines += [f"{e} = {f.mapping}" for e, f in zip(A.elements, functions)]
    if args.emit_algebra:
        A.save(args.emit_algebra)
        lines.append(f"wrote {args.emit_algebra}")
    else:
        lines.append(A.to_text().rstrip("\n"))
    _emit(args, "\n".join(lines), {"size": A.n, "elements": list(A.elements),
                                   "functions": {e: f.mapping for e, f in zip(A.elements, functions)},
                                   "tables": {op: A.op(op).tolist() for op in sorted(A.signature)}})
    return PASS


# ------------------------------------------------------ congruences etc.

def cmd_congruences(args) -> int:
    A = load_algebra(args.algebra)
    found = enumerate_congruences(A, args.bound)
    lines = [f"{A.name}: {len(found)} congruence(s)"] + [c.format(A) for c in found]
    _emit(args, "\n".join(lines), {"algebra": A.name, "count": len(found),
                                   "congruences": [c.names(A) for c in found]})
    return PASS


def cmd_ideals(args) -> int:
    A = load_algebra(args.algebra)
    if args.relmax:
        found = relatively_maximal_ideals(A, args.exclude if args.exclude else "all", args.bound)
        kind = "relatively maximal ideal(s)"
    else:
        found = all_ideals(A, args.bound)
        if args.exclude:
            d = A.index(args.exclude)
            found = [I for I in found if d not in I]
        kind = "ideal(s)"
    if args.exclude:
        kind += f" excluding {args.exclude}"
    lines = [f"{A.name}: {len(found)} {kind}"] + [I.format(A) for I in found]
    _emit(args, "\n".join(lines), {"algebra": A.name, "count": len(found),
                                   "ideals": [I.names(A) for I in found]})
    return PASS


def parse_blocks(A: FiniteAlgebra, text: str) -> list[list[str]]:
    """``0;i;1_b;1_a,p_a,1`` style blocks; unmentioned elements become singletons."""
    blocks = [[e.strip() for e in part.split(",") if e.strip()] for part in text.split(";")]
    blocks = [b for b in blocks if b]
    seen = [e for b in blocks for e in b]
    for e in seen:
        A.index(e)
    if len(seen) != len(set(seen)):
        raise UsageError("an element appears in two blocks")
    return blocks + [[e] for e in A.elements if e not in set(seen)]


def cmd_quotient(args) -> int:
    A = load_algebra(args.algebra)
    blocks = parse_blocks(A, args.blocks)
    Q, labels = quotient(A, blocks, name=args.name)
    if args.out:
        Q.save(args.out)
    text = Q.to_text().rstrip("\n") if not args.out else f"wrote {args.out}"
    _emit(args, text, {"algebra": A.name, "quotient": Q.name, "elements": list(Q.elements),
                       "projection": {A.elements[a]: Q.elements[labels[a]] for a in range(A.n)},
                       "tables": {op: Q.op(op).tolist() for op in sorted(Q.signature)}})
    return PASS


def cmd_suites(args) -> int:
    lines, payload = [], []
    for s in all_suites():
        lines.append(f"{s.name}  [{', '.join(s.signature)}]  {s.description}")
        for law in s.laws:
            lines.append(f"    {law.name:16} {law.body():60} {law.citation}")
        payload.append({"name": s.name, "signature": list(s.signature), "description": s.description,
                        "laws": [{"name": l.name, "law": l.body(), "citation": l.citation} for l in s.laws]})
    _emit(args, "\n".join(lines), payload)
    return PASS


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")

    p = argparse.ArgumentParser(prog="pfalg", description="Algebras of partial functions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check an algebra against a suite or law file")
    c.add_argument("--algebra", required=True)
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--suite")
    g.add_argument("--laws")
    c.add_argument("--law", action="append", help="restrict to this law (repeatable)")
    c.add_argument("--at", help="evaluate at one assignment, e.g. d=1_b,a=1_b,b=1,c=i")
    c.add_argument("--all-counterexamples", action="store_true")
    c.add_argument("--budget", type=int, help="max assignments per law (default 10^8 or $OVERRIDE_ALG_BUDGET)")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("represent", parents=[common], help="embed into partial functions")
    r.add_argument("--algebra", required=True)
    r.add_argument("--signature", choices=sorted(SIGNATURES), default="vee")
    r.add_argument("--out")
    r.add_argument("--verify", action="store_true")
    r.add_argument("--minimal", action="store_true")
    r.add_argument("--bound", type=int, default=DEFAULT_IDEAL_BOUND)
    r.add_argument("--budget", type=int)
    r.set_defaults(func=cmd_represent)

    s = sub.add_parser("search", parents=[common], help="finite model search")
    s.add_argument("--spec")
    s.add_argument("--size", type=int)
    s.add_argument("--ops", nargs="+", default=[])
    s.add_argument("--constraints", nargs="*", default=[],
                   help="commutative, idempotent, has-bottom; optionally KIND:op,op")
    s.add_argument("--hold", nargs="*", default=[], help="suites, law files, law names or inline laws")
    s.add_argument("--fail", nargs="*", default=[])
    s.add_argument("--limit", type=int)
    s.add_argument("--dedup", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET, help="max raw candidate tables")
    s.add_argument("--out", help="directory for the models as .alg files")
    s.set_defaults(func=cmd_search)

    cl = sub.add_parser("closure", parents=[common], help="close partial functions under operations")
    cl.add_argument("--points", nargs="+")
    cl.add_argument("--values", nargs="+")
    cl.add_argument("--generators", required=True)
    cl.add_argument("--ops", nargs="+", required=True)
    cl.add_argument("--name", default="closure")
    cl.add_argument("--with-empty", action="store_true", help="add the empty function to the generators")
    cl.add_argument("--emit-algebra")
    cl.set_defaults(func=cmd_closure)

    cg = sub.add_parser("congruences", parents=[common], help="list all congruences")
    cg.add_argument("--algebra", required=True)
    cg.add_argument("--bound", type=int, default=DEFAULT_CONGRUENCE_BOUND)
    cg.set_defaults(func=cmd_congruences)

    i = sub.add_parser("ideals", parents=[common], help="list ideals")
    i.add_argument("--algebra", required=True)
    i.add_argument("--exclude")
    i.add_argument("--relmax", action="store_true")
    i.add_argument("--bound", type=int, default=DEFAULT_IDEAL_BOUND)
    i.set_defaults(func=cmd_ideals)

    q = sub.add_parser("quotient", parents=[common], help="quotient by a congruence")
    q.add_argument("--algebra", required=True)
    q.add_argument("--blocks", required=True, help="blocks separated by ';', elements by ','")
    q.add_argument("--name")
    q.add_argument("--out")
    q.set_defaults(func=cmd_quotient)

    su = sub.add_parser("suites", parents=[common], help="list built-in suites")
    su.set_defaults(func=cmd_suites)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except (PfalgError, OSError) as exc:
        print(f"pfalg {args.command}: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
