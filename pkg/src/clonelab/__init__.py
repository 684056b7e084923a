"""Clone enumeration and term complexity toolkit for finite algebras."""

__version__ = "0.1.0"

from .algebra import FiniteAlgebra, OperationSymbol, OpTable, parse_algebra, with_constants
from .clone import (
    CloneTable,
    assign_min_lengths,
    clone_equality,
    close_by_height,
    complexity_sequences,
    verify_general_bounds,
)
from .errors import (
    AlgebraFormatError,
    BasisError,
    BudgetExceededError,
    ClonelabError,
    EvaluationError,
    InputError,
    MalcevUnavailableError,
    MathInvariantError,
    MismatchError,
    SubstitutionError,
    TermSyntaxError,
)
from .malcev import (
    build_cube_term,
    check_supernilpotent,
    commutator_growth_demo,
    decompose_generators,
    find_malcev_term,
    malcev_chain,
    require_malcev,
    rewrite_log_height,
)
from .primal import build_sigma, primality_probe, synthesize_term, validate_basis
from .terms import App, Var, evaluate, induced_table, parse_term, print_term, substitute, term_metrics

__all__ = [
    "AlgebraFormatError",
    "App",
    "BasisError",
    "BudgetExceededError",
    "CloneTable",
    "ClonelabError",
    "EvaluationError",
    "FiniteAlgebra",
    "InputError",
    "MalcevUnavailableError",
    "MathInvariantError",
    "MismatchError",
    "OpTable",
    "OperationSymbol",
    "SubstitutionError",
    "TermSyntaxError",
    "Var",
    "assign_min_lengths",
    "build_cube_term",
    "build_sigma",
    "check_supernilpotent",
    "clone_equality",
    "close_by_height",
    "commutator_growth_demo",
    "complexity_sequences",
    "decompose_generators",
    "evaluate",
    "find_malcev_term",
    "induced_table",
    "malcev_chain",
    "parse_algebra",
    "parse_term",
    "primality_probe",
    "print_term",
    "require_malcev",
    "rewrite_log_height",
    "substitute",
    "synthesize_term",
    "term_metrics",
    "validate_basis",
    "verify_general_bounds",
    "with_constants",
    "__version__",
]
