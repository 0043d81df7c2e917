"""Builders for the functions under study, as expression trees.

Every analyzable function is described by a :class:`FunctionSpec` whose
``kind`` matches the CLI vocabulary:

====================  =====================================================
kind                  function of t
====================  =====================================================
``f``                 t * (ln t - psi(t))
``g``                 -ln t
``h``                 -gamma * ln t
``theta-alpha``       t^alpha * (ln t - psi(t))
``log-q``             -t * (ln t - psi(t)) * ln t - gamma * ln t
``q``                 exp of ``log-q``
``log-qp``            -t * (ln(p t / (t+p+1)) - psi_p(t)) * ln t - gamma ln t
``qp``                exp of ``log-qp``
``psi``               psi(t)
``psi-p``             psi_p(t)
``psi-q``             psi_q(t)
``open-problem-       (t * (psi_q(t) - ln theta(t)) - gamma) * ln t,
exponent``            theta drawn from a :class:`ThetaFamily`
====================  =====================================================

``log-q``/``log-qp``/``open-problem-exponent`` are the logarithms of the
positive functions the monotonicity checker studies; the checker consumes
them directly in LCM mode.  The exp-forms ``q``/``qp`` are built as
``exp(log form)`` so that their jets reuse the log-form derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, InvalidSpec
from .jets import (
    Expr,
    affine,
    derivative,
    euler_gamma_constant,
    exp,
    ln,
    power,
    psi,
    psi_p,
    psi_q,
    variable,
)
from .kernel import DEFAULT_CONFIG, EvalConfig, Real, RealLike

__all__ = [
    "FUNCTION_KINDS",
    "THETA_FAMILIES",
    "ThetaFamily",
    "FunctionSpec",
    "build",
    "log_form",
    "decomposition_residual",
]

FUNCTION_KINDS = (
    "theta-alpha",
    "f",
    "g",
    "h",
    "log-q",
    "q",
    "log-qp",
    "qp",
    "psi",
    "psi-p",
    "psi-q",
    "open-problem-exponent",
)

THETA_FAMILIES = ("identity", "affine", "rational", "q_bracket")

_PARAM_COUNT = {"identity": 0, "affine": 2, "rational": 4, "q_bracket": 0}


@dataclass(frozen=True)
class ThetaFamily:
    """Candidate theta(t) for the open-problem exponent.

    ``identity``      theta(t) = t
    ``affine``        theta(t) = a*t + b          params (a, b)
    ``rational``      theta(t) = (a*t+b)/(c*t+d)  params (a, b, c, d)
    ``q_bracket``     theta(t) = (1 - q^t)/(1 - q), q taken from the spec

    theta must be positive on the evaluation interval; the affine/rational
    factors are required to stay positive there (violations surface as
    DomainError when a logarithm is evaluated).
    """

    family_id: str
    params: tuple[Real, ...] = ()

    def __post_init__(self):
        if self.family_id not in THETA_FAMILIES:
            raise InvalidSpec(f"unknown theta family {self.family_id!r}")
        expected = _PARAM_COUNT[self.family_id]
        if len(self.params) != expected:
            raise InvalidSpec(
                f"theta family {self.family_id!r} takes {expected} parameters, "
                f"got {len(self.params)}"
            )
        object.__setattr__(self, "params", tuple(Real(p) for p in self.params))

    def describe(self) -> str:
        if self.family_id == "affine":
            a, b = self.params
            return f"affine(a={a}, b={b})"
        if self.family_id == "rational":
            a, b, c, d = self.params
            return f"rational(a={a}, b={b}, c={c}, d={d})"
        return self.family_id


def _log_theta(theta: ThetaFamily, q: Real) -> Expr:
    """ln theta(t) as an expression tree."""
    t = variable()
    if theta.family_id == "identity":
        return ln(t)
    if theta.family_id == "affine":
        a, b = theta.params
        return ln(affine(a, b))
    if theta.family_id == "rational":
        a, b, c, d = theta.params
        return ln(affine(a, b)) - ln(affine(c, d))
    # q_bracket: theta(t) = (1 - q^t) / (1 - q) with q^t = exp(t ln q)
    one = Real(1, q.precision)
    q_to_t = exp(variable() * ln(_const(q)))
    return ln(_const(one) - q_to_t) - ln(_const(one) - _const(q))


def _const(v: RealLike) -> Expr:
    from .jets import constant

    return constant(v)


@dataclass(frozen=True)
class FunctionSpec:
    """Declarative description of a function to evaluate or check."""

    kind: str
    alpha: Real | None = None
    p: int | None = None
    q: Real | None = None
    theta: ThetaFamily | None = None

    def __post_init__(self):
        if self.kind not in FUNCTION_KINDS:
            raise InvalidSpec(
                f"unknown function kind {self.kind!r}; expected one of {FUNCTION_KINDS}"
            )
        if self.alpha is not None and not isinstance(self.alpha, Real):
            object.__setattr__(self, "alpha", Real(self.alpha))
        if self.q is not None and not isinstance(self.q, Real):
            object.__setattr__(self, "q", Real(self.q))
        if self.kind == "theta-alpha" and self.alpha is None:
            raise InvalidSpec("theta-alpha requires alpha")
        if self.kind in ("log-qp", "qp", "psi-p"):
            if self.p is None or not isinstance(self.p, int) or self.p < 1:
                raise InvalidSpec(f"{self.kind} requires a positive integer p")
        if self.kind in ("psi-q", "open-problem-exponent"):
            if self.q is None or not (0 < self.q.value < 1):
                raise InvalidSpec(f"{self.kind} requires q strictly inside (0, 1)")
        if self.kind == "open-problem-exponent":
            if self.theta is None:
                raise InvalidSpec("open-problem-exponent requires a theta family")

    def describe(self) -> str:
        parts = [self.kind]
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha}")
        if self.p is not None:
            parts.append(f"p={self.p}")
        if self.q is not None:
            parts.append(f"q={self.q}")
        if self.theta is not None:
            parts.append(f"theta={self.theta.describe()}")
        return " ".join(parts)


def _log_q_expr() -> Expr:
    t = variable()
    gamma = euler_gamma_constant()
    return -((t * (ln(t) - psi(t))) * ln(t)) - gamma * ln(t)


def _log_qp_expr(p: int) -> Expr:
    t = variable()
    gamma = euler_gamma_constant()
    # ln(p t / (t + p + 1)) split into logarithms of positive affine factors
    log_ratio = ln(affine(p, 0)) - ln(affine(1, p + 1))
    return -((t * (log_ratio - psi_p(p, t))) * ln(t)) - gamma * ln(t)


def _open_problem_expr(q: Real, theta: ThetaFamily) -> Expr:
    t = variable()
    gamma = euler_gamma_constant()
    return (t * (psi_q(q, t) - _log_theta(theta, q)) - gamma) * ln(t)


def build(spec: FunctionSpec) -> Expr:
    """Expression tree for the function described by ``spec``."""
    t = variable()
    kind = spec.kind
    if kind == "f":
        return t * (ln(t) - psi(t))
    if kind == "g":
        return -ln(t)
    if kind == "h":
        return -(euler_gamma_constant() * ln(t))
    if kind == "theta-alpha":
        return power(t, spec.alpha) * (ln(t) - psi(t))
    if kind == "log-q":
        return _log_q_expr()
    if kind == "q":
        return exp(_log_q_expr())
    if kind == "log-qp":
        return _log_qp_expr(spec.p)
    if kind == "qp":
        return exp(_log_qp_expr(spec.p))
    if kind == "psi":
        return psi(t)
    if kind == "psi-p":
        return psi_p(spec.p, t)
    if kind == "psi-q":
        return psi_q(spec.q, t)
    if kind == "open-problem-exponent":
        return _open_problem_expr(spec.q, spec.theta)
    raise InvalidSpec(f"unknown function kind {kind!r}")


def log_form(spec: FunctionSpec) -> Expr | None:
    """ln(f) as a tree, when a closed log form exists.

    For ``q``/``qp`` this is the corresponding log expression; the three
    log-valued kinds are interpreted as the logarithm of the positive
    function they define and are returned as-is.  Returns None otherwise.
    """
    if spec.kind == "q":
        return _log_q_expr()
    if spec.kind == "qp":
        return _log_qp_expr(spec.p)
    if spec.kind in ("log-q", "log-qp", "open-problem-exponent"):
        return build(spec)
    return None


def decomposition_residual(t: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """|log q(t) - (f(t)*g(t) + h(t))| on 0 < t < 1.

    The three-factor decomposition is an algebraic identity, so the residual
    measures only roundoff of the two evaluation routes; the contract is
    residual < 10^(-precision_digits+10).
    """
    tv = Real(t, cfg.precision_digits)
    if not (0 < tv.value < 1):
        raise DomainError(f"decomposition residual is defined on (0, 1), got {tv}")
    whole = derivative(build(FunctionSpec("log-q")), 0, tv, cfg)
    f_val = derivative(build(FunctionSpec("f")), 0, tv, cfg)
    g_val = derivative(build(FunctionSpec("g")), 0, tv, cfg)
    h_val = derivative(build(FunctionSpec("h")), 0, tv, cfg)
    return abs(whole - (f_val * g_val + h_val))
