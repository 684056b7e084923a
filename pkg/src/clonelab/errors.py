"""Exception types shared across the package.

The CLI maps these onto exit codes: anything input-shaped exits 2,
exhausted budgets exit 3, and a mathematical check that fails with a
witness exits 1.
"""


class ClonelabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ClonelabError):
    """A request violates an operation's preconditions."""


class AlgebraFormatError(InputError):
    """Malformed algebra description text."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TermSyntaxError(InputError):
    """Malformed term text, or a term that does not fit the algebra."""


class EvaluationError(InputError):
    """A term could not be evaluated under the given assignment."""


class SubstitutionError(InputError):
    """A substitution does not cover every variable of the term."""


class BasisError(InputError):
    """A designated operation basis fails one of its required identities."""


class MalcevUnavailableError(InputError):
    """An operation that needs a Mal'cev term could not obtain one."""


class BudgetExceededError(ClonelabError):
    """A closure or verification could not finish within its budget."""


class MismatchError(ClonelabError):
    """A rewritten or decomposed term disagrees with its source.

    Carries the differing assignment; such a witness certifies that the
    degree assumption behind the rewrite does not hold for the algebra.
    """

    def __init__(self, message: str, assignment: tuple, expected: int, got: int):
        super().__init__(message)
        self.assignment = assignment
        self.expected = expected
        self.got = got


class MathInvariantError(ClonelabError):
    """An internally checked mathematical invariant was violated."""
