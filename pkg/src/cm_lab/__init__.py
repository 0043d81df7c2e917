"""cm-lab: a high-precision laboratory for complete-monotonicity checks.

The package evaluates the digamma function and its p- and q-analogues to
configurable decimal precision, differentiates composite expressions to
arbitrary order with truncated Taylor arithmetic, and verifies the sign
patterns that define completely monotonic and logarithmically completely
monotonic functions on configurable grids.
"""

from ._version import __version__
from .checker import (
    CMReport,
    GridSpec,
    MarginSample,
    Violation,
    check_cm,
    check_lcm,
    find_violation,
    laplace_crosscheck,
)
from .errors import (
    CmLabError,
    DomainError,
    InvalidSpec,
    MismatchedJets,
    NonConvergence,
    NonPositiveFunction,
    OrderTooLarge,
)
from .functions import (
    FUNCTION_KINDS,
    FunctionSpec,
    ThetaFamily,
    build,
    decomposition_residual,
    log_form,
)
from .jets import (
    Expr,
    Jet,
    derivative,
    derivative_stack,
    eval_jet,
    jet_combine,
    jet_compose,
    jet_constant,
    jet_neg,
    jet_variable,
)
from .kernel import (
    Constants,
    DEFAULT_CONFIG,
    EvalConfig,
    QuadratureResult,
    Real,
    bernoulli,
    euler_gamma,
    integrate_semi_infinite,
    integrate_semi_infinite_full,
)
from .special import (
    digamma,
    gamma_p,
    log_gamma_p,
    polygamma,
    psi_p,
    psi_p_deriv,
    q_digamma,
    q_digamma_deriv,
)

__all__ = [
    "__version__",
    "Real",
    "EvalConfig",
    "DEFAULT_CONFIG",
    "Constants",
    "QuadratureResult",
    "euler_gamma",
    "bernoulli",
    "integrate_semi_infinite",
    "integrate_semi_infinite_full",
    "digamma",
    "polygamma",
    "gamma_p",
    "log_gamma_p",
    "psi_p",
    "psi_p_deriv",
    "q_digamma",
    "q_digamma_deriv",
    "Jet",
    "Expr",
    "jet_variable",
    "jet_constant",
    "jet_combine",
    "jet_neg",
    "jet_compose",
    "eval_jet",
    "derivative",
    "derivative_stack",
    "FUNCTION_KINDS",
    "FunctionSpec",
    "ThetaFamily",
    "build",
    "log_form",
    "decomposition_residual",
    "GridSpec",
    "MarginSample",
    "Violation",
    "CMReport",
    "check_cm",
    "check_lcm",
    "find_violation",
    "laplace_crosscheck",
    "CmLabError",
    "DomainError",
    "NonConvergence",
    "OrderTooLarge",
    "MismatchedJets",
    "InvalidSpec",
    "NonPositiveFunction",
]
