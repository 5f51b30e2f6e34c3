import itertools

import numpy as np
import pytest

from pfalg.algebra import FiniteAlgebra, find_isomorphism
from pfalg.errors import BudgetError, FormatError, InputError
from pfalg.lawlang import check_law, parse_law
from pfalg.search import SearchSpec, build_spec, find_models, parse_spec, resolve_laws
from pfalg.suites import find_law, get_suite


def separation(n, dedup=True):
    return build_spec(n, ["vee"], ["commutative", "idempotent"], ["vee:eq"], ["vee-quasi"], dedup=dedup)


def brute_force(n, ops_constraints, laws):
    """All commutative idempotent vee tables satisfying ``laws``, by plain enumeration."""
    cells = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for values in itertools.product(range(n), repeat=len(cells)):
        t = np.diag(np.arange(n))
        for (i, j), v in zip(cells, values):
            t[i, j] = t[j, i] = v
        A = FiniteAlgebra("b", [str(k) for k in range(n)], {"vee": t})
        if all(check_law(A, law) is None for law in laws):
            out.append(A)
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_search_matches_brute_force(n):
    laws = get_suite("vee").laws
    spec = build_spec(n, ["vee"], ["commutative", "idempotent"], ["vee"])
    found = find_models(spec)
    expected = brute_force(n, None, laws)
    assert sorted(A.op("vee").tolist() for A in found) == sorted(A.op("vee").tolist() for A in expected)
    assert len(found) == len(expected)


def test_separation_at_four_contains_quotient(Q):
    found = find_models(separation(4))
    assert len(found) >= 1
    target = Q.reduct(["vee"])
    assert any(find_isomorphism(A, target) is not None for A in found)
    for A in found:
        assert get_suite("vee:eq").holds(A)
        assert check_law(A, find_law("vee-quasi")) is not None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_separation_below_four_is_empty(n):
    # recorded outcome: no vee-equational algebra of size <= 3 fails the quasiequation
    for jobs in (1, 2, 3):
        assert find_models(separation(n), jobs) == []
    assert find_models(separation(n, dedup=False)) == []


def test_jobs_do_not_change_results():
    spec = build_spec(4, ["vee"], ["commutative", "idempotent"], ["vee:eq"])
    one = find_models(spec)
    for jobs in (2, 4):
        many = find_models(spec, jobs)
        assert [A.op("vee").tolist() for A in many] == [A.op("vee").tolist() for A in one]
        assert [A.name for A in many] == [A.name for A in one]


def test_reflexive_must_fail_is_empty():
    spec = build_spec(1, ["or"], [], [], [parse_law("x = x", name="refl").body()])
    assert find_models(spec) == []


def test_band_that_is_not_commutative():
    spec = build_spec(3, ["or"], [], ["lrb"], ["a|b = b|a"])
    found = find_models(spec)
    assert found
    # a left-zero pair with an identity adjoined is among the results
    target = FiniteAlgebra("lz", ["1", "e", "f"], {"or": [[0, 1, 2], [1, 1, 1], [2, 2, 2]]})
    assert any(find_isomorphism(A, target) is not None for A in found)
    for A in found:
        assert get_suite("lrb").holds(A)
        assert check_law(A, parse_law("a|b = b|a")) is not None


def test_dedup_and_limit():
    spec = build_spec(3, ["vee"], ["commutative", "idempotent"], ["vee"])
    every = find_models(spec)
    reps = find_models(build_spec(3, ["vee"], ["commutative", "idempotent"], ["vee"], dedup=True))
    assert len(reps) < len(every)
    for A, B in itertools.combinations(reps, 2):
        assert find_isomorphism(A, B) is None
    for A in every:
        assert any(find_isomorphism(A, B) is not None for B in reps)
    first = find_models(build_spec(3, ["vee"], ["commutative", "idempotent"], ["vee"], limit=2))
    assert [A.op("vee").tolist() for A in first] == [A.op("vee").tolist() for A in every[:2]]
    assert [A.name for A in first] == ["model1", "model2"]


def test_has_bottom_constraint():
    spec = build_spec(3, ["vee"], ["commutative", "idempotent", "has-bottom"], ["vee"])
    found = find_models(spec)
    assert found
    for A in found:
        assert all(A.op("vee")[0, a] == a for a in range(3))


def test_budget_and_inconsistent_constraints():
    with pytest.raises(BudgetError):
        find_models(build_spec(4, ["vee"], [], ["vee:eq"]))
    with pytest.raises(InputError):
        build_spec(3, ["minus"], ["commutative", "has-bottom"])
    with pytest.raises(InputError):
        build_spec(3, ["vee"], ["commutative:meet"])
    with pytest.raises(InputError):
        build_spec(3, ["vee"], ["associative"])
    with pytest.raises(InputError):
        build_spec(3, ["vee"], [], ["a\\b = a"])
    with pytest.raises(InputError):
        SearchSpec(0, ("vee",))
    with pytest.raises(InputError):
        SearchSpec(2, ("join",))


def test_raw_count():
    assert separation(4).raw_count() == 4**6
    assert build_spec(3, ["or"], ["idempotent"]).raw_count() == 3**6


def test_spec_file(tmp_path):
    (tmp_path / "extra.laws").write_text("comm : a+b = b+a\n")
    text = """# separation
size: 4
ops vee
constraints: commutative idempotent
hold: vee:eq
hold: extra.laws
fail: vee-quasi
dedup: yes
limit 3
"""
    spec = parse_spec(text, tmp_path)
    assert spec.size == 4 and spec.ops == ("vee",) and spec.dedup and spec.limit == 3
    assert [l.name for l in spec.must_hold][-1] == "comm"
    assert [l.name for l in spec.must_fail] == ["vee-quasi"]
    assert len(find_models(spec)) == 1
    with pytest.raises(FormatError) as err:
        parse_spec("size 4\nops vee\nfoo: bar\n")
    assert err.value.line == 3
    with pytest.raises(FormatError):
        parse_spec("ops vee\n")
    with pytest.raises(FormatError):
        parse_spec("size four\nops vee\n")


def test_resolve_laws():
    assert len(resolve_laws("vee")) == 8
    assert len(resolve_laws("vee:eq")) == 7
    assert resolve_laws("vee.vee-quasi")[0].name == "vee-quasi"
    assert resolve_laws("a|b = b")[0].body() == "a|b = b"
    with pytest.raises(InputError):
        resolve_laws("no-such-law")


def test_soundness_of_returned_models():
    spec = build_spec(3, ["or", "meet"], ["idempotent", "commutative:meet"], ["ado"], ["a|b = b|a"],
                      budget=10**12)
    found = find_models(spec)
    assert found
    for A in found:
        assert get_suite("ado").holds(A)
        assert check_law(A, parse_law("a|b = b|a")) is not None
