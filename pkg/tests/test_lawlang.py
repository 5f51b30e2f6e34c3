import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfalg.algebra import FiniteAlgebra
from pfalg.errors import BudgetError, LawSyntaxError, SignatureError
from pfalg.lawlang import (BUDGET_ENV, DEFAULT_BUDGET, App, Var, check_law, check_law_naive, confirms,
                           counterexamples, default_budget, equations, expand_term, holds_at, parse_law,
                           parse_law_file, parse_term, sample_law)
from pfalg.suites import find_law

QUASI = "d <~ a, d <~ b, d <~ c, d <~ a+b, d <~ b+c => d <~ a+c"


def test_parse_extended_distributivity():
    law = parse_law("a|(b&c) = (a|b)&(a|c)")
    assert not law.is_quasi
    assert law.conclusion.lhs == App("or", Var("a"), App("meet", Var("b"), Var("c")))
    assert law.conclusion.rhs == App("meet", App("or", Var("a"), Var("b")), App("or", Var("a"), Var("c")))
    assert law.variables() == ["a", "b", "c"]


def test_parse_quasiequation():
    law = parse_law(QUASI)
    assert law.is_quasi and len(law.premises) == 5
    assert all(p.rel == "<~" for p in law.atoms())
    assert law.conclusion.rhs == App("vee", Var("a"), Var("c"))
    assert law.variables() == ["d", "a", "b", "c"]
    assert parse_law(law.body()) == law


def test_single_precedence_left_associative():
    assert parse_term("a|b&c") == App("meet", App("or", Var("a"), Var("b")), Var("c"))
    assert parse_term("a\\b+c") == App("vee", App("minus", Var("a"), Var("b")), Var("c"))


def test_trivial_law_holds_everywhere():
    law = parse_law("x = x")
    A = FiniteAlgebra("t", "abc", {"or": [[0, 0, 0]] * 3})
    assert check_law(A, law) is None


@pytest.mark.parametrize("text,col,fragment", [
    ("a * b = c", 3, "unknown operator symbol"),
    ("a | b = ", 9, "expected a variable"),
    ("a = b =>", 9, "empty conclusion"),
    ("a = b, c = d", 13, "premises must be followed"),
    ("(a | b = c", 8, "expected ')'"),
    ("", 1, "empty law"),
    ("a b = c", 3, "expected '='"),
])
def test_syntax_errors_carry_position(text, col, fragment):
    with pytest.raises(LawSyntaxError) as err:
        parse_law(text)
    assert err.value.line == 1
    assert err.value.column == col
    assert fragment in str(err.value)


def test_law_file_positions():
    text = "# header\nok : a|a = a\n\nbad : a | (b ? c) = a\n"
    with pytest.raises(LawSyntaxError) as err:
        parse_law_file(text)
    assert (err.value.line, err.value.column) == (4, 14)
    laws = parse_law_file("one : a = a  # comment\ntwo: a|b = b|a\n")
    assert [l.name for l in laws] == ["one", "two"]
    with pytest.raises(LawSyntaxError):
        parse_law_file("x : a = a\nx : b = b\n")
    with pytest.raises(LawSyntaxError):
        parse_law_file("no name here\n")


def test_sugar_expansion():
    le = parse_law("a <= b")
    assert le.conclusion.equation() == (App("or", Var("a"), Var("b")), Var("b"))
    sim = parse_law("a <~ b")
    assert sim.conclusion.equation() == (App("or", Var("b"), Var("a")), Var("b"))


def test_derived_symbols_expand():
    t = parse_term("a|b")
    assert expand_term(t, {"vee"}) == App("vee", Var("a"), App("vee", Var("a"), Var("b")))
    assert expand_term(parse_term("a&b"), {"minus"}) == parse_term("a\\(a\\b)")
    assert expand_term(parse_term("a+b"), {"or", "meet"}) == parse_term("(a|b)&(b|a)")
    with pytest.raises(SignatureError):
        expand_term(parse_term("a\\b"), {"vee"})
    prem, concl = equations(parse_law("a <= b => b = a"), {"vee"})
    assert "or" not in str(prem)


def test_missing_operation_is_signature_error():
    A = FiniteAlgebra("t", "ab", {"vee": [[0, 1], [1, 1]]})
    with pytest.raises(SignatureError):
        check_law(A, parse_law("a\\b = a"))


def test_quotient_counterexamples(Q, S):
    law = find_law("vee-quasi")
    cex = check_law(Q, law)
    assert cex is not None and confirms(Q, cex)
    assert cex.assignment == {"d": "i", "a": "i", "b": "1", "c": "1_b"}
    assert (cex.lhs, cex.rhs) == ("i", "0")
    every = [c.assignment for c in counterexamples(Q, law)]
    witness = {"d": "1_b", "a": "1_b", "b": "1", "c": "i"}
    assert witness in every and len(every) == 4
    assert not holds_at(Q, law, witness)
    assert check_law(S.reduct(["vee"]), law) is None


def test_least_counterexample_is_lexicographic():
    # a|b = a fails first at a=0, b=1 in a two-element join
    A = FiniteAlgebra("j", ["0", "1"], {"or": [[0, 1], [1, 1]]})
    cex = check_law(A, parse_law("a|b = a"))
    assert cex.assignment == {"a": "0", "b": "1"}
    assert check_law_naive(A, parse_law("a|b = a")) == {"a": "0", "b": "1"}


def test_budget_refusal(monkeypatch):
    A = FiniteAlgebra("t", "abc", {"or": [[0, 1, 2]] * 3})
    law = parse_law("a|(b|(c|d)) = a")
    with pytest.raises(BudgetError):
        check_law(A, law, budget=80)
    assert check_law(A, law, budget=81) is not None
    assert default_budget() == DEFAULT_BUDGET
    monkeypatch.setenv(BUDGET_ENV, "10")
    assert default_budget() == 10
    with pytest.raises(BudgetError):
        check_law(A, law)


def test_sampling_finds_common_failures():
    A = FiniteAlgebra("t", "abc", {"or": [[0, 1, 2]] * 3})
    assert sample_law(A, parse_law("a|b = a"), samples=1000) is not None
    assert sample_law(A, parse_law("a|b = b"), samples=1000) is None


def test_chunking_does_not_change_result(monkeypatch):
    import pfalg.lawlang as ll
    A = FiniteAlgebra("t", "abcd", {"or": [[0, 0, 0, 0], [1, 1, 1, 1], [2, 2, 2, 2], [3, 3, 3, 2]]})
    law = parse_law("a|(b|c) = (a|b)|c")
    whole = check_law(A, law)
    monkeypatch.setattr(ll, "CHUNK", 7)
    assert check_law(A, law) == whole
    assert len(list(counterexamples(A, law))) == len(list(ll.counterexamples(A, law)))


# random laws against a scalar reference evaluator

SYMS = ["|", "+", "&", "\\"]


@st.composite
def terms(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from("abc"))
    return f"({draw(terms(depth - 1))}{draw(st.sampled_from(SYMS))}{draw(terms(depth - 1))})"


@st.composite
def laws(draw):
    atoms = [f"{draw(terms())} {draw(st.sampled_from(['=', '<=', '<~']))} {draw(terms())}"
             for _ in range(draw(st.integers(1, 3)))]
    return parse_law(", ".join(atoms[:-1]) + " => " + atoms[-1] if len(atoms) > 1 else atoms[0])


@st.composite
def algebras(draw):
    n = draw(st.integers(1, 4))
    cell = st.integers(0, n - 1)
    table = st.lists(st.lists(cell, min_size=n, max_size=n), min_size=n, max_size=n)
    return FiniteAlgebra("r", [f"e{k}" for k in range(n)], {op: draw(table) for op in ("vee", "or", "meet", "minus")})


@settings(max_examples=200, deadline=None)
@given(algebras(), laws())
def test_vectorized_matches_naive(A, law):
    cex = check_law(A, law)
    naive = check_law_naive(A, law)
    if naive is None:
        assert cex is None
    else:
        assert cex is not None and cex.assignment == naive and confirms(A, cex)


@settings(max_examples=100, deadline=None)
@given(algebras(), terms(), terms())
def test_sugar_equals_verbatim(A, s, t):
    assert (check_law(A, parse_law(f"{s} <= {t}")) is None) == (check_law(A, parse_law(f"({s})|({t}) = {t}")) is None)
    assert (check_law(A, parse_law(f"{s} <~ {t}")) is None) == (check_law(A, parse_law(f"({t})|({s}) = {t}")) is None)
