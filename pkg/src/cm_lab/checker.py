"""Grid-based verification of complete monotonicity and its log variant.

A function f is completely monotonic (CM) on an interval when
``(-1)^n f^(n)(t) >= 0`` for all n >= 0; a positive f is logarithmically
completely monotonic (LCM) when the same sign pattern holds for
``(ln f)^(n)`` with n >= 1.  The checker evaluates one Taylor jet per grid
point, reads off the signed derivatives, and reports the minimal sign
margin together with any tolerance-certified violations.

A negative margin only counts as a :class:`Violation` after re-evaluation
at doubled precision stays below ``-sign_tolerance``; roundoff near zero
must not masquerade as a counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .errors import CmLabError, DomainError, NonPositiveFunction
from .functions import FunctionSpec, build, log_form
from .jets import Expr, derivative, derivative_stack, ln
from .kernel import (
    DEFAULT_CONFIG,
    EvalConfig,
    Real,
    RealLike,
    _integrate_semi_infinite_mpf,
    _round_to,
    _to_mpf,
)
from .special import _validate_p

__all__ = [
    "DEFAULT_CHECK_ORDER",
    "GridSpec",
    "MarginSample",
    "Violation",
    "CMReport",
    "check_cm",
    "check_lcm",
    "find_violation",
    "laplace_crosscheck",
]

DEFAULT_CHECK_ORDER = 12

MODES = ("cm", "lcm")


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid on (lo, hi); endpoints must stay inside the open
    domain of the function under test (0 and 1 are never included by the
    default insets used in the CLI)."""

    lo: Real
    hi: Real
    count: int
    spacing: str = "logarithmic"

    def __post_init__(self):
        lo = self.lo if isinstance(self.lo, Real) else Real(self.lo)
        hi = self.hi if isinstance(self.hi, Real) else Real(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.spacing not in ("uniform", "logarithmic"):
            raise DomainError(f"unknown grid spacing {self.spacing!r}")
        if not 0 < lo.value:
            raise DomainError("grid requires lo > 0")
        if not lo.value < hi.value:
            raise DomainError("grid requires lo < hi")
        if self.count < 2:
            raise DomainError("grid needs at least 2 points")

    def points(self, cfg: EvalConfig = DEFAULT_CONFIG) -> list[Real]:
        d = cfg.precision_digits
        with mp.workdps(cfg.working_digits):
            lo = self.lo.value
            hi = self.hi.value
            n = self.count
            out = []
            if self.spacing == "uniform":
                step = (hi - lo) / (n - 1)
                for i in range(n):
                    v = hi if i == n - 1 else lo + i * step
                    out.append(Real._wrap(_round_to(v, d), d))
            else:
                log_lo = mpmath.ln(lo)
                step = (mpmath.ln(hi) - log_lo) / (n - 1)
                for i in range(n):
                    v = hi if i == n - 1 else mpmath.exp(log_lo + i * step)
                    out.append(Real._wrap(_round_to(v, d), d))
        return out


@dataclass(frozen=True)
class MarginSample:
    """Signed derivative value (-1)^order * f^(order)(t) at one grid point."""

    t: Real
    order: int
    value: Real


@dataclass(frozen=True)
class Violation:
    """A certified sign violation: value < -sign_tolerance."""

    t: Real
    order: int
    value: Real


@dataclass(frozen=True)
class CMReport:
    """Outcome of a CM/LCM grid check.

    ``min_margin`` is the minimum of the signed derivatives over all points
    and orders; ``strict`` means every margin cleared +sign_tolerance.
    Points that failed to evaluate are listed in ``failed_points`` rather
    than silently skipped.
    """

    function: FunctionSpec | Expr
    mode: str
    grid: GridSpec
    max_order: int
    min_margin: Real
    violations: tuple[Violation, ...]
    strict: bool
    samples: tuple[MarginSample, ...]
    failed_points: tuple[tuple[Real, str], ...] = ()

    @property
    def partial(self) -> bool:
        return bool(self.failed_points)

    @property
    def clean(self) -> bool:
        return not self.violations


def _expression_for(spec: FunctionSpec | Expr, mode: str) -> tuple[Expr, int, Expr | None]:
    """(expression whose signed derivatives are checked, first order, inner).

    Accepts a named :class:`FunctionSpec` or a bare user expression.  In LCM
    mode the expression is ln(f); ``inner`` is f itself when the logarithm
    had to be wrapped around a plain positive function (used to distinguish
    non-positivity from other domain errors).
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    if isinstance(spec, Expr):
        if mode == "cm":
            return spec, 0, None
        return ln(spec), 1, spec
    if mode == "cm":
        return build(spec), 0, None
    direct = log_form(spec)
    if direct is not None:
        return direct, 1, None
    inner = build(spec)
    return ln(inner), 1, inner


def _describe(spec: FunctionSpec | Expr) -> str:
    if isinstance(spec, FunctionSpec):
        return spec.describe()
    return f"expression({spec.kind})"


def _evaluate_rows(
    expr: Expr,
    points: list[Real],
    max_order: int,
    start_order: int,
    cfg: EvalConfig,
    inner: Expr | None = None,
) -> tuple[list[MarginSample], list[tuple[Real, str]]]:
    rows: list[MarginSample] = []
    failed: list[tuple[Real, str]] = []
    for t in points:
        try:
            stack = derivative_stack(expr, max_order, t, cfg)
        except DomainError as err:
            if inner is not None:
                try:
                    value = derivative(inner, 0, t, cfg)
                except CmLabError:
                    value = None
                if value is not None and value.sign() <= 0:
                    raise NonPositiveFunction(
                        f"function is not positive at t={t}: value {value}"
                    ) from err
            failed.append((t, f"{type(err).__name__}: {err}"))
            continue
        except CmLabError as err:
            failed.append((t, f"{type(err).__name__}: {err}"))
            continue
        for n in range(start_order, max_order + 1):
            v = stack[n] if n % 2 == 0 else -stack[n]
            rows.append(MarginSample(t=t, order=n, value=v))
    return rows, failed


def _build_report(
    spec: FunctionSpec | Expr,
    mode: str,
    grid: GridSpec,
    max_order: int,
    rows: list[MarginSample],
    failed: list[tuple[Real, str]],
    cfg: EvalConfig,
) -> CMReport:
    if not rows:
        raise DomainError(
            f"no grid point of {_describe(spec)} could be evaluated; "
            f"first failure: {failed[0][1] if failed else 'empty grid'}"
        )
    tol = cfg.sign_tolerance.value
    worst = min(rows, key=lambda r: r.value.value)
    violations = tuple(
        Violation(t=r.t, order=r.order, value=r.value)
        for r in rows
        if r.value.value < -tol
    )
    return CMReport(
        function=spec,
        mode=mode,
        grid=grid,
        max_order=max_order,
        min_margin=worst.value,
        violations=violations,
        strict=worst.value.value > tol,
        samples=tuple(rows),
        failed_points=tuple(failed),
    )


def check_cm(
    spec: FunctionSpec | Expr,
    grid: GridSpec,
    max_order: int = DEFAULT_CHECK_ORDER,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> CMReport:
    """Check (-1)^n f^(n)(t) >= 0 for n = 0..max_order on the grid."""
    expr, start, inner = _expression_for(spec, "cm")
    rows, failed = _evaluate_rows(expr, grid.points(cfg), max_order, start, cfg, inner)
    return _build_report(spec, "cm", grid, max_order, rows, failed, cfg)


def check_lcm(
    spec: FunctionSpec | Expr,
    grid: GridSpec,
    max_order: int = DEFAULT_CHECK_ORDER,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> CMReport:
    """Check (-1)^n (ln f)^(n)(t) >= 0 for n = 1..max_order on the grid.

    ``q``/``qp`` use their closed log forms directly; the log-valued kinds
    (log-q, log-qp, open-problem-exponent) are interpreted as ln f itself.
    Other functions are wrapped in ln and must be positive on the grid.
    """
    if max_order < 1:
        raise DomainError("LCM checks need max_order >= 1")
    expr, start, inner = _expression_for(spec, "lcm")
    rows, failed = _evaluate_rows(expr, grid.points(cfg), max_order, start, cfg, inner)
    return _build_report(spec, "lcm", grid, max_order, rows, failed, cfg)


def _certify(
    spec: FunctionSpec | Expr, mode: str, sample: MarginSample, cfg: EvalConfig
) -> Real | None:
    """Re-evaluate a candidate violation at doubled precision.

    Returns the high-precision signed value when it stays below the original
    -sign_tolerance, else None (roundoff artifact)."""
    high = cfg.with_precision(2 * cfg.precision_digits)
    expr, _, _ = _expression_for(spec, mode)
    value = derivative(expr, sample.order, sample.t, high)
    if sample.order % 2 == 1:
        value = -value
    if value.value < -cfg.sign_tolerance.value:
        return value
    return None


def find_violation(
    spec: FunctionSpec | Expr,
    mode: str,
    interval: tuple[RealLike, RealLike],
    max_order: int = DEFAULT_CHECK_ORDER,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    coarse_points: int = 48,
    refine_points: int = 16,
    max_refinements: int = 6,
) -> Violation | None:
    """Search the interval for a certified sign violation.

    Runs a coarse logarithmic grid pass, then recursively refines around the
    most negative margin.  Returns the first violation that survives the
    doubled-precision re-evaluation, or None.
    """
    expr, start, inner = _expression_for(spec, mode)
    lo = Real(interval[0], cfg.precision_digits)
    hi = Real(interval[1], cfg.precision_digits)
    grid = GridSpec(lo, hi, coarse_points, "logarithmic")
    tol = cfg.sign_tolerance.value
    for _ in range(max_refinements + 1):
        points = grid.points(cfg)
        rows, _failed = _evaluate_rows(expr, points, max_order, start, cfg, inner)
        if not rows:
            return None
        worst = min(rows, key=lambda r: r.value.value)
        if worst.value.value < -tol:
            certified = _certify(spec, mode, worst, cfg)
            if certified is not None:
                return Violation(t=worst.t, order=worst.order, value=certified)
        # zoom into the bracket around the most negative margin
        idx = next(i for i, t in enumerate(points) if t.value == worst.t.value)
        new_lo = points[max(0, idx - 1)]
        new_hi = points[min(len(points) - 1, idx + 1)]
        if not new_lo.value < new_hi.value:
            return None
        grid = GridSpec(new_lo, new_hi, refine_points, "logarithmic")
    return None


def laplace_crosscheck(
    p: int, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG
) -> Real:
    """|series - integral| for the two representations of ln p - psi_p(x).

    The series side is the exact finite sum ``sum_{k=0}^{p} 1/(x+k)``; the
    integral side is ``int_0^inf (1-e^(-(p+1)t))/(1-e^(-t)) e^(-xt) dt``
    evaluated by double-exponential quadrature.  Contract: the discrepancy
    stays within 10x the quadrature error target.
    """
    _validate_p(p)
    with mp.workdps(cfg.working_digits):
        xv = _to_mpf(x, cfg.working_digits)
        if not xv > 0:
            raise DomainError(f"x must be > 0, got {mpmath.nstr(xv, 8)}")
        series = mpf(0)
        for k in range(p + 1):
            series += 1 / (xv + k)

    pp1 = p + 1

    def integrand(t: mpf) -> mpf:
        ratio = mpmath.expm1(-pp1 * t) / mpmath.expm1(-t)
        return ratio * mpmath.exp(-xv * t)

    integral, _err, _levels, _evals = _integrate_semi_infinite_mpf(integrand, cfg)
    with mp.workdps(cfg.working_digits):
        diff = abs(series - integral)
    d = cfg.precision_digits
    return Real._wrap(_round_to(diff, d), d)
