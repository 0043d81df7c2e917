"""Extended-precision arithmetic kernel.

Everything numerical in this package flows through :class:`Real`, a thin
immutable wrapper around an ``mpmath`` big-float that remembers how many
significant decimal digits it is good for.  The kernel also owns the
mathematical constants (Euler's gamma, exact Bernoulli numbers) and the
double-exponential quadrature rule used for semi-infinite integrals.

Accuracy bookkeeping is heuristic, not certified: internal computations run
with :data:`GUARD_DIGITS` extra digits and results are rounded back to the
requested precision.  Quadrature exposes a realized-error *estimate*, not an
enclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import mpmath
from mpmath import mp, mpf
from mpmath.libmp import dps_to_prec

from .errors import DomainError, NonConvergence

__all__ = [
    "Real",
    "RealLike",
    "EvalConfig",
    "DEFAULT_CONFIG",
    "Constants",
    "euler_gamma",
    "bernoulli",
    "integrate_semi_infinite",
    "integrate_semi_infinite_full",
    "QuadratureResult",
    "MIN_PRECISION_DIGITS",
    "DEFAULT_PRECISION_DIGITS",
    "GUARD_DIGITS",
]

MIN_PRECISION_DIGITS = 15
DEFAULT_PRECISION_DIGITS = 50

# Extra decimal digits carried internally so that rounding back to the
# requested precision absorbs accumulated roundoff.
GUARD_DIGITS = 15

RealLike = Union["Real", mpf, int, float, str, Fraction]


def _round_to(value: mpf, digits: int) -> mpf:
    old = mp.prec
    mp.prec = dps_to_prec(digits)
    try:
        return +value
    finally:
        mp.prec = old


def _to_mpf(value: RealLike, digits: int) -> mpf:
    if isinstance(value, Real):
        return value.value
    old = mp.prec
    mp.prec = dps_to_prec(digits)
    try:
        if isinstance(value, Fraction):
            return mpf(value.numerator) / mpf(value.denominator)
        return mpf(value)
    finally:
        mp.prec = old


class Real:
    """Arbitrary-precision real number tagged with its decimal precision.

    Instances are immutable.  Arithmetic between two ``Real`` values is
    performed (and rounded) at the larger of the two precisions; plain
    Python numbers and decimal strings are coerced at the precision of the
    ``Real`` operand.  Comparisons and sign queries are exact on the stored
    binary representation.

    Floats are adopted with their exact binary value; pass decimal strings
    when the decimal digits matter (``Real("0.1", 50)``).
    """

    __slots__ = ("value", "precision")

    def __init__(self, value: RealLike = 0, precision: int | None = None):
        if precision is None:
            precision = value.precision if isinstance(value, Real) else DEFAULT_PRECISION_DIGITS
        if precision < MIN_PRECISION_DIGITS:
            raise ValueError(
                f"precision must be >= {MIN_PRECISION_DIGITS} digits, got {precision}"
            )
        v = _to_mpf(value, precision)
        if isinstance(value, Real):
            v = _round_to(v, precision)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "precision", precision)

    @classmethod
    def _wrap(cls, value: mpf, precision: int) -> "Real":
        out = object.__new__(cls)
        object.__setattr__(out, "value", value)
        object.__setattr__(out, "precision", precision)
        return out

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("Real is immutable")

    # -- arithmetic ---------------------------------------------------

    def _binop(self, other: RealLike, op) -> "Real":
        o = other if isinstance(other, Real) else Real(other, self.precision)
        digits = max(self.precision, o.precision)
        old = mp.prec
        mp.prec = dps_to_prec(digits)
        try:
            v = op(self.value, o.value)
        finally:
            mp.prec = old
        return Real._wrap(v, digits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __pow__(self, other):
        def power(a, b):
            r = mpmath.power(a, b)
            if not isinstance(r, mpf):
                raise DomainError(f"{self!r} ** {other!r} is not a real number")
            return r

        return self._binop(other, power)

    def __neg__(self):
        # mpf unary ops round at the ambient context precision, so pin it
        old = mp.prec
        mp.prec = dps_to_prec(self.precision)
        try:
            v = -self.value
        finally:
            mp.prec = old
        return Real._wrap(v, self.precision)

    def __abs__(self):
        old = mp.prec
        mp.prec = dps_to_prec(self.precision)
        try:
            v = abs(self.value)
        finally:
            mp.prec = old
        return Real._wrap(v, self.precision)

    # -- comparisons (exact on the stored representation) --------------

    def _cmp_value(self, other: RealLike) -> mpf:
        return other.value if isinstance(other, Real) else _to_mpf(other, self.precision)

    def __eq__(self, other):
        try:
            return self.value == self._cmp_value(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __hash__(self):
        return hash(self.value)

    def sign(self) -> int:
        """Exact sign of the stored value: -1, 0 or +1."""
        if self.value > 0:
            return 1
        if self.value < 0:
            return -1
        return 0

    # -- conversions ----------------------------------------------------

    def __float__(self):
        return float(self.value)

    def decimal(self) -> str:
        """Decimal string carrying the full tagged precision (round-trips)."""
        return mpmath.nstr(self.value, self.precision)

    def __str__(self):
        return self.decimal()

    def __repr__(self):
        return f"Real('{self.decimal()}', precision={self.precision})"


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation policy: precision, tolerances and iteration budgets.

    ``sign_tolerance`` defaults to ``10**(-precision_digits/2)``, splitting
    the precision budget between roundoff and genuine sign violations.
    ``quadrature_target_error`` defaults to ``10**(-(precision_digits-10))``.
    """

    precision_digits: int = DEFAULT_PRECISION_DIGITS
    sign_tolerance: Real | None = None
    max_series_terms: int = 2_000_000
    quadrature_target_error: Real | None = None

    def __post_init__(self):
        if self.precision_digits < MIN_PRECISION_DIGITS:
            raise ValueError(
                f"precision_digits must be >= {MIN_PRECISION_DIGITS}, "
                f"got {self.precision_digits}"
            )
        if self.max_series_terms < 1:
            raise ValueError("max_series_terms must be positive")
        d = self.precision_digits
        with mp.workdps(d):
            if self.sign_tolerance is None:
                tol = Real._wrap(mpf(10) ** (-mpf(d) / 2), d)
                object.__setattr__(self, "sign_tolerance", tol)
            if self.quadrature_target_error is None:
                qte = Real._wrap(mpf(10) ** (-(d - 10)), d)
                object.__setattr__(self, "quadrature_target_error", qte)
            ceiling = mpf(10) ** (-d + 10)
        if not isinstance(self.sign_tolerance, Real):
            object.__setattr__(self, "sign_tolerance", Real(self.sign_tolerance, d))
        if not isinstance(self.quadrature_target_error, Real):
            object.__setattr__(
                self, "quadrature_target_error", Real(self.quadrature_target_error, d)
            )
        if not (0 <= self.sign_tolerance.value < 1):
            raise ValueError("sign_tolerance must lie in [0, 1)")
        if not (0 < self.quadrature_target_error.value <= ceiling):
            raise ValueError(
                "quadrature_target_error must be positive and at most "
                f"10^(-precision_digits+10) = 1e-{d - 10}"
            )

    @property
    def working_digits(self) -> int:
        """Internal precision: requested digits plus the guard band."""
        return self.precision_digits + GUARD_DIGITS

    def with_precision(self, digits: int) -> "EvalConfig":
        """Same budgets, different precision; tolerances re-derived."""
        return EvalConfig(precision_digits=digits, max_series_terms=self.max_series_terms)


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class Constants:
    """Named constants evaluated under a given :class:`EvalConfig`."""

    euler_gamma: Real

    @classmethod
    def for_config(cls, cfg: EvalConfig = DEFAULT_CONFIG) -> "Constants":
        return cls(euler_gamma=euler_gamma(cfg))


# ---------------------------------------------------------------------------
# Bernoulli numbers (exact rationals, memoized)
# ---------------------------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1), Fraction(-1, 2)]


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n (convention B_1 = -1/2)."""
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    while len(_BERNOULLI) <= n:
        m = len(_BERNOULLI)
        if m % 2 == 1:
            _BERNOULLI.append(Fraction(0))
            continue
        acc = Fraction(0)
        for j in range(m):
            if _BERNOULLI[j]:
                acc += math.comb(m + 1, j) * _BERNOULLI[j]
        _BERNOULLI.append(-acc / (m + 1))
    return _BERNOULLI[n]


_BERN_MPF: dict[tuple[int, int], mpf] = {}


def _bernoulli_mpf(n: int) -> mpf:
    """B_n rounded at the current working precision."""
    key = (mp.prec, n)
    v = _BERN_MPF.get(key)
    if v is None:
        b = bernoulli(n)
        v = mpf(b.numerator) / mpf(b.denominator)
        _BERN_MPF[key] = v
    return v


def asymptotic_shift_threshold(digits: int) -> int:
    """Argument size above which the Bernoulli asymptotic series reaches
    ``digits`` decimal digits; below it, recurrence shifting is applied."""
    return int(math.ceil(20.0 * digits / 15.0))


# ---------------------------------------------------------------------------
# Euler's constant
# ---------------------------------------------------------------------------

_GAMMA_CACHE: dict[int, mpf] = {}


def _euler_gamma_mpf(working_digits: int) -> mpf:
    """Euler's gamma at ``working_digits`` digits via Euler-Maclaurin applied
    to the harmonic numbers: H_n - ln n - 1/(2n) + sum B_2k/(2k n^2k)."""
    v = _GAMMA_CACHE.get(working_digits)
    if v is not None:
        return v
    with mp.workdps(working_digits + 5):
        n = asymptotic_shift_threshold(working_digits)
        harmonic = mpf(0)
        for k in range(1, n + 1):
            harmonic += mpf(1) / k
        nn = mpf(n)
        g = harmonic - mpmath.ln(nn) - 1 / (2 * nn)
        eps = mpf(10) ** (-(working_digits + 4))
        inv2 = 1 / (nn * nn)
        power = inv2
        k = 1
        while True:
            term = _bernoulli_mpf(2 * k) / (2 * k) * power
            g += term
            if abs(term) < eps:
                break
            power *= inv2
            k += 1
            if k > 1000:  # unreachable with the threshold above
                raise NonConvergence("Euler gamma series failed to converge")
    v = _round_to(g, working_digits)
    _GAMMA_CACHE[working_digits] = v
    return v


def euler_gamma(cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """Euler-Mascheroni constant to ``cfg.precision_digits`` digits."""
    v = _euler_gamma_mpf(cfg.working_digits)
    return Real._wrap(_round_to(v, cfg.precision_digits), cfg.precision_digits)


# ---------------------------------------------------------------------------
# Double-exponential (exp-sinh) quadrature on (0, infinity)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureResult:
    """Quadrature value together with its realized-error estimate."""

    value: Real
    error_estimate: Real
    levels: int
    evaluations: int


# (prec_bits, level) -> {index: (node t, weight C*cosh(u)*t)}
_NODE_CACHE: dict[tuple[int, int], dict[int, tuple[mpf, mpf]]] = {}

_MAX_QUAD_LEVEL = 13
_QUAD_EVAL_BUDGET = 400_000


def _exp_sinh_node(cache: dict, half_pi: mpf, h: mpf, i: int) -> tuple[mpf, mpf]:
    nd = cache.get(i)
    if nd is None:
        u = i * h
        eu = mpmath.exp(u)
        sinh_u = (eu - 1 / eu) / 2
        cosh_u = (eu + 1 / eu) / 2
        t = mpmath.exp(half_pi * sinh_u)
        cache[i] = nd = (t, half_pi * cosh_u * t)
    return nd


def _integrate_semi_infinite_mpf(
    f: Callable[[mpf], mpf], cfg: EvalConfig
) -> tuple[mpf, mpf, int, int]:
    """Core exp-sinh rule; assumes mp context is NOT yet configured.

    Substitutes t = exp(pi/2 * sinh(u)) and applies the trapezoid rule in u
    with level doubling, trimming each tail once terms fall below the target.
    Returns (value, error_estimate, levels_used, evaluations).
    """
    with mp.workdps(cfg.working_digits):
        target = cfg.quadrature_target_error.value
        cut = target / 1000
        half_pi = mpmath.pi / 2
        evaluations = 0
        previous = None
        previous_delta = None
        for level in range(2, _MAX_QUAD_LEVEL + 1):
            h = mpf(2) ** (-level)
            cache = _NODE_CACHE.setdefault((mp.prec, level), {})
            t0, w0 = _exp_sinh_node(cache, half_pi, h, 0)
            total = w0 * f(t0)
            evaluations += 1
            for direction in (1, -1):
                i = direction
                tiny_streak = 0
                while True:
                    t, w = _exp_sinh_node(cache, half_pi, h, i)
                    term = w * f(t)
                    evaluations += 1
                    total += term
                    if abs(term) < cut:
                        tiny_streak += 1
                        if tiny_streak >= 3:
                            break
                    else:
                        tiny_streak = 0
                    i += direction
                    if evaluations > _QUAD_EVAL_BUDGET:
                        raise NonConvergence(
                            "semi-infinite quadrature exceeded its node budget"
                        )
            integral = h * total
            if previous is not None:
                delta = abs(integral - previous)
                if delta == 0:
                    return integral, delta, level, evaluations
                estimate = delta
                if previous_delta is not None and previous_delta > 0:
                    estimate = min(delta, delta * delta / previous_delta)
                if level >= 4 and estimate <= target:
                    return integral, estimate, level, evaluations
                previous_delta = delta
            previous = integral
        raise NonConvergence(
            "semi-infinite quadrature did not reach the target error "
            f"{mpmath.nstr(target, 5)} within {_MAX_QUAD_LEVEL} levels"
        )


def integrate_semi_infinite_full(
    integrand: Callable[[Real], RealLike],
    decay_rate: RealLike,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> QuadratureResult:
    """Integrate ``integrand`` over (0, infinity) with error estimate.

    The integrand must be continuous on (0, inf), bounded near 0, and decay
    at least like ``exp(-decay_rate * t)`` with ``decay_rate > 0``.
    """
    d = cfg.precision_digits
    rate = Real(decay_rate, d)
    if rate.sign() <= 0:
        raise DomainError("decay_rate must be > 0")
    wd = cfg.working_digits

    def f(t: mpf) -> mpf:
        r = integrand(Real._wrap(t, wd))
        return r.value if isinstance(r, Real) else _to_mpf(r, wd)

    value, err, levels, evals = _integrate_semi_infinite_mpf(f, cfg)
    return QuadratureResult(
        value=Real._wrap(_round_to(value, d), d),
        error_estimate=Real._wrap(_round_to(err, d), d),
        levels=levels,
        evaluations=evals,
    )


def integrate_semi_infinite(
    integrand: Callable[[Real], RealLike],
    decay_rate: RealLike,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> Real:
    """Value of the semi-infinite integral; see
    :func:`integrate_semi_infinite_full` for the error estimate."""
    return integrate_semi_infinite_full(integrand, decay_rate, cfg).value
