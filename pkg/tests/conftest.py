import functools

import pytest

from pfalg.algebra import FiniteAlgebra
from pfalg.cli import data_path


def bundled(name: str) -> FiniteAlgebra:
    return FiniteAlgebra.load(data_path(name))


@pytest.fixture(scope="session")
def S():
    return bundled("theorem-proper-S")


@pytest.fixture(scope="session")
def Q():
    return bundled("theorem-proper-quotient")


@pytest.fixture(scope="session")
def one():
    return bundled("one-element")


@functools.cache
def models(n, ops, constraints=(), hold=(), fail=(), dedup=False, budget=10**9):
    from pfalg.search import build_spec, find_models
    return tuple(find_models(build_spec(n, list(ops), list(constraints), list(hold), list(fail),
                                        dedup=dedup, budget=budget)))


def vee_models(n, dedup=False):
    return models(n, ("vee",), ("commutative", "idempotent"), ("vee",), dedup=dedup)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
