"""Exception types shared across the package."""


class CmLabError(Exception):
    """Base class for all errors raised by cm_lab."""


class DomainError(CmLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NonConvergence(CmLabError, ArithmeticError):
    """An iterative scheme failed to reach its accuracy target within budget."""


class OrderTooLarge(CmLabError, ValueError):
    """A derivative order exceeds the configured maximum."""


class MismatchedJets(CmLabError, ValueError):
    """Jet operands disagree on base point or truncation order."""


class InvalidSpec(CmLabError, ValueError):
    """A function/sweep specification is malformed or incomplete."""


class NonPositiveFunction(CmLabError, ValueError):
    """A log-complete-monotonicity check was asked for a function that is
    not strictly positive on the requested grid."""
