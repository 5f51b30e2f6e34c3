"""Finite algebras of partial functions: law checking, representation and model search."""

__version__ = "0.1.0"

from .algebra import (Congruence, FiniteAlgebra, enumerate_congruences, find_isomorphism, flat_algebra,
                      is_congruence, quotient)
from .errors import BudgetError, FormatError, InputError, PfalgError
from .lawlang import Law, check_law, parse_law
from .pfun import PartialFunction, closure
from .rep import NotRepresentable, represent, verify_representation
from .search import SearchSpec, find_models
from .suites import get_suite

__all__ = [
    "BudgetError", "Congruence", "FiniteAlgebra", "FormatError", "InputError", "Law", "NotRepresentable",
    "PartialFunction", "PfalgError", "SearchSpec", "check_law", "closure", "enumerate_congruences",
    "find_isomorphism", "find_models", "flat_algebra", "get_suite", "is_congruence", "parse_law",
    "quotient", "represent", "verify_representation",
]
