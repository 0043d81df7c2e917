"""Truncated Taylor arithmetic (jets) and the expression trees built on it.

A :class:`Jet` stores ``coeffs[k] = f^(k)(t0)/k!`` for ``k = 0..order``.
Sums and differences act coefficient-wise, products are Cauchy products,
and elementary/special primitives are composed through the standard
truncated-series recurrences.  For the digamma family the outer derivative
tower comes from :mod:`cm_lab.special` and is combined with the inner jet
by Horner evaluation of the shifted series, which is exact under
truncation because the shifted inner jet has zero constant term.

Expressions (:class:`Expr`) are immutable trees over the primitives the
checker needs; ``derivative(e, n, t0, cfg)`` evaluates an order-``n`` jet
and returns ``n! * coeffs[n]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, MismatchedJets, OrderTooLarge
from .kernel import (
    DEFAULT_CONFIG,
    EvalConfig,
    Real,
    RealLike,
    _euler_gamma_mpf,
    _round_to,
    _to_mpf,
)
from .special import digamma_tower, psi_p_tower, q_digamma_tower

__all__ = [
    "DEFAULT_MAX_ORDER",
    "HARD_MAX_ORDER",
    "Jet",
    "jet_variable",
    "jet_constant",
    "jet_combine",
    "jet_neg",
    "jet_compose",
    "Expr",
    "variable",
    "constant",
    "euler_gamma_constant",
    "affine",
    "ln",
    "exp",
    "power",
    "psi",
    "psi_p",
    "psi_q",
    "eval_jet",
    "derivative",
]

DEFAULT_MAX_ORDER = 16
HARD_MAX_ORDER = 64


def _check_order(order: int) -> None:
    if order < 0:
        raise DomainError(f"jet order must be >= 0, got {order}")
    if order > HARD_MAX_ORDER:
        raise OrderTooLarge(f"jet order {order} exceeds the hard cap {HARD_MAX_ORDER}")


@dataclass(frozen=True)
class Jet:
    """Truncated Taylor expansion at a base point."""

    base_point: Real
    coeffs: tuple[Real, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise DomainError("a jet needs at least the order-0 coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self, n: int) -> Real:
        """f^(n)(base_point) = n! * coeffs[n]."""
        if not 0 <= n <= self.order:
            raise DomainError(f"jet of order {self.order} has no coefficient {n}")
        digits = self.coeffs[n].precision
        with mp.workdps(digits):
            v = mpf(math.factorial(n)) * self.coeffs[n].value
        return Real._wrap(v, digits)


def _wrap_jet(t0: mpf, raw: list[mpf], digits: int) -> Jet:
    coeffs = tuple(Real._wrap(_round_to(c, digits), digits) for c in raw)
    return Jet(base_point=Real._wrap(_round_to(t0, digits), digits), coeffs=coeffs)


def jet_variable(t0: RealLike, order: int, precision: int | None = None) -> Jet:
    """Identity jet: coeffs [t0, 1, 0, ..., 0]."""
    _check_order(order)
    t = Real(t0, precision) if precision is not None else Real(t0) if not isinstance(t0, Real) else t0
    zero = Real._wrap(mpf(0), t.precision)
    one = Real._wrap(mpf(1), t.precision)
    coeffs = [t] + [zero] * order
    if order >= 1:
        coeffs[1] = one
    return Jet(base_point=t, coeffs=tuple(coeffs))


def jet_constant(value: RealLike, order: int, t0: RealLike = 0, precision: int | None = None) -> Jet:
    """Constant jet: coeffs [value, 0, ..., 0]."""
    _check_order(order)
    v = Real(value, precision)
    t = Real(t0, v.precision)
    zero = Real._wrap(mpf(0), v.precision)
    return Jet(base_point=t, coeffs=tuple([v] + [zero] * order))


# ---------------------------------------------------------------------------
# raw coefficient algebra (lists of mpf under the ambient mp context)
# ---------------------------------------------------------------------------

def _raw_mul(a: list[mpf], b: list[mpf]) -> list[mpf]:
    n = len(a)
    out = []
    for k in range(n):
        acc = mpf(0)
        for i in range(k + 1):
            acc += a[i] * b[k - i]
        out.append(acc)
    return out


def _raw_ln(g: list[mpf]) -> list[mpf]:
    g0 = g[0]
    if not g0 > 0:
        raise DomainError(f"ln of non-positive value {mpmath.nstr(g0, 8)}")
    n = len(g)
    h = [mpmath.ln(g0)]
    for k in range(1, n):
        acc = g[k]
        for j in range(1, k):
            acc -= mpf(k - j) / k * h[k - j] * g[j]
        h.append(acc / g0)
    return h


def _raw_exp(g: list[mpf]) -> list[mpf]:
    n = len(g)
    h = [mpmath.exp(g[0])]
    for k in range(1, n):
        acc = mpf(0)
        for j in range(1, k + 1):
            acc += j * g[j] * h[k - j]
        h.append(acc / k)
    return h


def _raw_power(g: list[mpf], alpha: mpf) -> list[mpf]:
    g0 = g[0]
    if not g0 > 0:
        raise DomainError(f"real power of non-positive value {mpmath.nstr(g0, 8)}")
    n = len(g)
    h = [mpmath.power(g0, alpha)]
    for k in range(1, n):
        acc = mpf(0)
        for j in range(1, k + 1):
            acc += (alpha * j - (k - j)) * g[j] * h[k - j]
        h.append(acc / (k * g0))
    return h


def _raw_compose(derivs: list[mpf], g: list[mpf]) -> list[mpf]:
    """Taylor coefficients of F(g) from the outer tower F^(i)(g0)."""
    n = len(g)
    b = [derivs[i] / mpf(math.factorial(i)) for i in range(n)]
    delta = list(g)
    delta[0] = mpf(0)
    acc = [mpf(0)] * n
    acc[0] = b[n - 1]
    for i in range(n - 2, -1, -1):
        acc = _raw_mul(acc, delta)
        acc[0] += b[i]
    return acc


# ---------------------------------------------------------------------------
# public jet operations
# ---------------------------------------------------------------------------

def _jet_digits(*jets: Jet) -> int:
    return max(j.base_point.precision for j in jets)


def _require_compatible(a: Jet, b: Jet) -> None:
    if a.order != b.order:
        raise MismatchedJets(f"jet orders differ: {a.order} vs {b.order}")
    if a.base_point.value != b.base_point.value:
        raise MismatchedJets("jet base points differ")


def jet_combine(op: str, a: Jet, b: Jet) -> Jet:
    """Combine two jets sharing base point and order: 'add', 'sub' or 'mul'."""
    _require_compatible(a, b)
    digits = _jet_digits(a, b)
    with mp.workdps(digits):
        av = [c.value for c in a.coeffs]
        bv = [c.value for c in b.coeffs]
        if op == "add":
            raw = [x + y for x, y in zip(av, bv)]
        elif op == "sub":
            raw = [x - y for x, y in zip(av, bv)]
        elif op == "mul":
            raw = _raw_mul(av, bv)
        else:
            raise DomainError(f"unknown jet combination {op!r}")
        return _wrap_jet(a.base_point.value, raw, digits)


def jet_neg(a: Jet) -> Jet:
    with mp.workdps(_jet_digits(a)):
        return Jet(
            base_point=a.base_point,
            coeffs=tuple(Real._wrap(-c.value, c.precision) for c in a.coeffs),
        )


def jet_compose(
    primitive: str,
    g: Jet,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    exponent: RealLike | None = None,
    p: int | None = None,
    q: RealLike | None = None,
) -> Jet:
    """Compose an outer primitive with an inner jet.

    ``primitive`` is one of ``ln``, ``exp``, ``power`` (with ``exponent``),
    ``psi``, ``psi_p`` (with ``p``) or ``psi_q`` (with ``q``).  The psi-family
    outer derivative towers are evaluated at ``g.coeffs[0]``.
    """
    digits = _jet_digits(g)
    order = g.order
    _check_order(order)
    with mp.workdps(cfg.working_digits):
        gv = [c.value for c in g.coeffs]
        if primitive == "ln":
            raw = _raw_ln(gv)
        elif primitive == "exp":
            raw = _raw_exp(gv)
        elif primitive == "power":
            if exponent is None:
                raise DomainError("power primitive requires an exponent")
            raw = _raw_power(gv, _to_mpf(exponent, cfg.working_digits))
        elif primitive == "psi":
            if not gv[0] > 0:
                raise DomainError("psi requires a positive inner value")
            raw = _raw_compose(digamma_tower(gv[0], order, cfg), gv)
        elif primitive == "psi_p":
            if p is None:
                raise DomainError("psi_p primitive requires p")
            raw = _raw_compose(psi_p_tower(p, gv[0], order, cfg), gv)
        elif primitive == "psi_q":
            if q is None:
                raise DomainError("psi_q primitive requires q")
            raw = _raw_compose(
                q_digamma_tower(_to_mpf(q, cfg.working_digits), gv[0], order, cfg), gv
            )
        else:
            raise DomainError(f"unknown primitive {primitive!r}")
        return _wrap_jet(g.base_point.value, raw, digits)


# ---------------------------------------------------------------------------
# expression trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    """Immutable expression tree over the supported primitives.

    Build instances through the module-level constructors (``variable``,
    ``ln``, ``psi``, ...) or the arithmetic operators, not directly.
    """

    kind: str
    children: tuple["Expr", ...] = ()
    value: Real | None = None       # constant nodes
    exponent: Real | None = None    # power nodes
    p: int | None = None            # psi_p nodes
    q: Real | None = None           # psi_q nodes
    scale: Real | None = None       # affine nodes: scale*t + offset
    offset: Real | None = None

    def __add__(self, other):
        return Expr("add", (self, _as_expr(other)))

    def __radd__(self, other):
        return Expr("add", (_as_expr(other), self))

    def __sub__(self, other):
        return Expr("sub", (self, _as_expr(other)))

    def __rsub__(self, other):
        return Expr("sub", (_as_expr(other), self))

    def __mul__(self, other):
        return Expr("mul", (self, _as_expr(other)))

    def __rmul__(self, other):
        return Expr("mul", (_as_expr(other), self))

    def __neg__(self):
        return Expr("neg", (self,))


def _as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return constant(x)


def variable() -> Expr:
    """The evaluation variable t."""
    return Expr("var")


def constant(value: RealLike) -> Expr:
    return Expr("const", value=value if isinstance(value, Real) else Real(value))


def euler_gamma_constant() -> Expr:
    """Euler's gamma as a constant node, resolved at evaluation precision."""
    return Expr("euler_gamma")


def affine(scale: RealLike, offset: RealLike) -> Expr:
    """The leaf scale*t + offset."""
    return Expr(
        "affine",
        scale=scale if isinstance(scale, Real) else Real(scale),
        offset=offset if isinstance(offset, Real) else Real(offset),
    )


def ln(e: Expr) -> Expr:
    return Expr("ln", (e,))


def exp(e: Expr) -> Expr:
    return Expr("exp", (e,))


def power(e: Expr, exponent: RealLike) -> Expr:
    return Expr("power", (e,), exponent=exponent if isinstance(exponent, Real) else Real(exponent))


def psi(e: Expr) -> Expr:
    return Expr("psi", (e,))


def psi_p(p: int, e: Expr) -> Expr:
    if not isinstance(p, int) or p < 1:
        raise DomainError(f"p must be a positive integer, got {p!r}")
    return Expr("psi_p", (e,), p=p)


def psi_q(q: RealLike, e: Expr) -> Expr:
    qr = q if isinstance(q, Real) else Real(q)
    if not (0 < qr.value < 1):
        raise DomainError(f"q must lie strictly in (0, 1), got {qr}")
    return Expr("psi_q", (e,), q=qr)


def _eval_raw(e: Expr, t0: mpf, order: int, cfg: EvalConfig) -> list[mpf]:
    kind = e.kind
    size = order + 1
    if kind == "var":
        raw = [mpf(0)] * size
        raw[0] = t0
        if order >= 1:
            raw[1] = mpf(1)
        return raw
    if kind == "const":
        raw = [mpf(0)] * size
        raw[0] = +e.value.value
        return raw
    if kind == "euler_gamma":
        raw = [mpf(0)] * size
        raw[0] = _euler_gamma_mpf(cfg.working_digits)
        return raw
    if kind == "affine":
        raw = [mpf(0)] * size
        raw[0] = e.scale.value * t0 + e.offset.value
        if order >= 1:
            raw[1] = +e.scale.value
        return raw
    if kind in ("add", "sub", "mul"):
        a = _eval_raw(e.children[0], t0, order, cfg)
        b = _eval_raw(e.children[1], t0, order, cfg)
        if kind == "add":
            return [x + y for x, y in zip(a, b)]
        if kind == "sub":
            return [x - y for x, y in zip(a, b)]
        return _raw_mul(a, b)
    if kind == "neg":
        return [-x for x in _eval_raw(e.children[0], t0, order, cfg)]
    g = _eval_raw(e.children[0], t0, order, cfg)
    if kind == "ln":
        return _raw_ln(g)
    if kind == "exp":
        return _raw_exp(g)
    if kind == "power":
        return _raw_power(g, e.exponent.value)
    if kind == "psi":
        if not g[0] > 0:
            raise DomainError("psi requires a positive argument")
        return _raw_compose(digamma_tower(g[0], order, cfg), g)
    if kind == "psi_p":
        return _raw_compose(psi_p_tower(e.p, g[0], order, cfg), g)
    if kind == "psi_q":
        return _raw_compose(q_digamma_tower(e.q.value, g[0], order, cfg), g)
    raise DomainError(f"unknown expression kind {kind!r}")


def eval_jet(e: Expr, t0: RealLike, order: int, cfg: EvalConfig = DEFAULT_CONFIG) -> Jet:
    """Jet of the expression at t0, truncated at ``order``."""
    _check_order(order)
    with mp.workdps(cfg.working_digits):
        t = _to_mpf(t0, cfg.working_digits)
        raw = _eval_raw(e, t, order, cfg)
        return _wrap_jet(t, raw, cfg.precision_digits)


def derivative(e: Expr, n: int, t0: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """n-th derivative of the expression at t0 via an order-n jet."""
    if n < 0:
        raise DomainError(f"derivative order must be >= 0, got {n}")
    _check_order(n)
    with mp.workdps(cfg.working_digits):
        t = _to_mpf(t0, cfg.working_digits)
        raw = _eval_raw(e, t, n, cfg)
        v = mpf(math.factorial(n)) * raw[n]
    return Real._wrap(_round_to(v, cfg.precision_digits), cfg.precision_digits)


def derivative_stack(
    e: Expr, max_order: int, t0: RealLike, cfg: EvalConfig = DEFAULT_CONFIG
) -> list[Real]:
    """[f(t0), f'(t0), ..., f^(max_order)(t0)] from a single jet evaluation."""
    _check_order(max_order)
    with mp.workdps(cfg.working_digits):
        t = _to_mpf(t0, cfg.working_digits)
        raw = _eval_raw(e, t, max_order, cfg)
        d = cfg.precision_digits
        out = []
        for n, c in enumerate(raw):
            v = mpf(math.factorial(n)) * c
            out.append(Real._wrap(_round_to(v, d), d))
        return out
