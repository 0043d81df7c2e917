"""Point evaluation of the digamma family and its p- and q-analogues.

All evaluators are hand-built on top of the kernel arithmetic:

* ``digamma``/``polygamma`` shift the argument upward with the recurrence
  ``psi(x) = psi(x+1) - 1/x`` (term-wise differentiated for higher orders)
  and then apply the Bernoulli-number asymptotic expansion.
* ``psi_p`` and its derivatives are exact finite sums.
* ``q_digamma_deriv`` evaluates the q-series through its Lambert-series
  rearrangement ``sum_j Li_{-m}(q^(x+j))`` with a closed-form
  Euler-Maclaurin tail, which stays fast arbitrarily close to q = 1 where
  the defining series becomes impractical.

The ``*_tower`` functions return raw ``mpf`` derivative stacks
``[f(x), f'(x), ..., f^(n)(x)]`` at working precision; they are what the
Taylor-jet composer consumes.
"""

from __future__ import annotations

import math

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, NonConvergence, OrderTooLarge
from .kernel import (
    DEFAULT_CONFIG,
    EvalConfig,
    Real,
    RealLike,
    _bernoulli_mpf,
    _round_to,
    _to_mpf,
    asymptotic_shift_threshold,
)

__all__ = [
    "MAX_DERIVATIVE_ORDER",
    "digamma",
    "polygamma",
    "gamma_p",
    "log_gamma_p",
    "psi_p",
    "psi_p_deriv",
    "q_digamma",
    "q_digamma_deriv",
    "digamma_tower",
    "psi_p_tower",
    "q_digamma_tower",
]

MAX_DERIVATIVE_ORDER = 64


def _require_positive(x: mpf, what: str = "x") -> None:
    if not x > 0:
        raise DomainError(f"{what} must be > 0, got {mpmath.nstr(x, 8)}")


def _require_order(n: int, minimum: int) -> None:
    if n < minimum:
        raise DomainError(f"derivative order must be >= {minimum}, got {n}")
    if n > MAX_DERIVATIVE_ORDER:
        raise OrderTooLarge(
            f"derivative order {n} exceeds the maximum {MAX_DERIVATIVE_ORDER}"
        )


def _validate_p(p: int) -> None:
    if not isinstance(p, int) or p < 1:
        raise DomainError(f"p must be a positive integer, got {p!r}")


def _fact(n: int) -> mpf:
    return mpf(math.factorial(n))


# ---------------------------------------------------------------------------
# digamma / polygamma
# ---------------------------------------------------------------------------

def _shift_sums(x: mpf, shift: int, max_order: int) -> list[mpf]:
    """acc[n] = sum_{j=0}^{shift-1} (x+j)^-(n+1), sharing the inverse powers."""
    acc = [mpf(0)] * (max_order + 1)
    for j in range(shift):
        inv = 1 / (x + j)
        power = inv
        for n in range(max_order):
            acc[n] += power
            power *= inv
        acc[max_order] += power
    return acc


def digamma_tower(x: mpf, max_order: int, cfg: EvalConfig = DEFAULT_CONFIG) -> list[mpf]:
    """Raw stack [psi(x), psi'(x), ..., psi^(max_order)(x)] at working precision."""
    with mp.workdps(cfg.working_digits):
        _require_positive(x)
        threshold = asymptotic_shift_threshold(cfg.precision_digits)
        shift = max(0, int(mpmath.ceil(threshold - x)))
        acc = _shift_sums(x, shift, max_order)
        xw = x + shift
        eps = mpf(10) ** (-(cfg.working_digits + 2))
        inv = 1 / xw
        inv2 = inv * inv

        out = []
        # order 0: psi(xw) = ln xw - 1/(2 xw) - sum B_2k / (2k xw^2k)
        tail = mpf(0)
        power = inv2
        k = 1
        while True:
            term = _bernoulli_mpf(2 * k) / (2 * k) * power
            tail += term
            if abs(term) < eps:
                break
            power *= inv2
            k += 1
            if k > 2000:
                raise NonConvergence("digamma asymptotic series stalled")
        out.append(mpmath.ln(xw) - inv / 2 - tail - acc[0])

        # order n >= 1:
        #   psi^(n)(xw) = (-1)^(n-1) [ (n-1)!/xw^n + n!/(2 xw^(n+1))
        #                              + sum B_2k (2k+n-1)!/(2k)! xw^(-2k-n) ]
        inv_n = inv  # inv^n
        for n in range(1, max_order + 1):
            s = _fact(n - 1) * inv_n + _fact(n) * inv_n * inv / 2
            coeff = _fact(n + 1) / 2  # (2k+n-1)!/(2k)! at k=1
            power = inv_n * inv2
            k = 1
            while True:
                term = _bernoulli_mpf(2 * k) * coeff * power
                s += term
                if abs(term) < eps * max(mpf(1), abs(s)):
                    break
                coeff *= mpf((2 * k + n + 1) * (2 * k + n)) / ((2 * k + 2) * (2 * k + 1))
                power *= inv2
                k += 1
                if k > 2000:
                    raise NonConvergence("polygamma asymptotic series stalled")
            psi_n_shifted = s if n % 2 == 1 else -s
            correction = _fact(n) * acc[n]
            if n % 2 == 0:
                correction = -correction
            out.append(psi_n_shifted + correction)
            inv_n *= inv
        return out


def digamma(x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """psi(x) for x > 0."""
    xv = _to_mpf(x, cfg.working_digits)
    value = digamma_tower(xv, 0, cfg)[0]
    return Real._wrap(_round_to(value, cfg.precision_digits), cfg.precision_digits)


def polygamma(n: int, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """psi^(n)(x) = (-1)^(n+1) n! sum_k (x+k)^-(n+1), for n >= 1 and x > 0."""
    _require_order(n, 1)
    xv = _to_mpf(x, cfg.working_digits)
    value = digamma_tower(xv, n, cfg)[n]
    return Real._wrap(_round_to(value, cfg.precision_digits), cfg.precision_digits)


# ---------------------------------------------------------------------------
# p-analogues: Gamma_p and psi_p
# ---------------------------------------------------------------------------

def log_gamma_p(p: int, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """ln Gamma_p(x) = ln p! + x ln p - sum_{k=0}^{p} ln(x+k)."""
    _validate_p(p)
    with mp.workdps(cfg.working_digits):
        xv = _to_mpf(x, cfg.working_digits)
        _require_positive(xv)
        total = mpmath.ln(_fact(p)) + xv * mpmath.ln(mpf(p))
        for k in range(p + 1):
            total -= mpmath.ln(xv + k)
    return Real._wrap(_round_to(total, cfg.precision_digits), cfg.precision_digits)


def gamma_p(p: int, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """Gamma_p(x) = p! p^x / (x (x+1) ... (x+p)), evaluated in log space."""
    lg = log_gamma_p(p, x, cfg)
    with mp.workdps(cfg.working_digits):
        v = mpmath.exp(lg.value)
    return Real._wrap(_round_to(v, cfg.precision_digits), cfg.precision_digits)


def psi_p_tower(p: int, x: mpf, max_order: int, cfg: EvalConfig = DEFAULT_CONFIG) -> list[mpf]:
    """Raw stack of psi_p and its derivatives; exact finite sums."""
    _validate_p(p)
    with mp.workdps(cfg.working_digits):
        _require_positive(x)
        acc = _shift_sums(x, p + 1, max_order)
        out = [mpmath.ln(mpf(p)) - acc[0]]
        for n in range(1, max_order + 1):
            value = _fact(n) * acc[n]
            out.append(value if n % 2 == 1 else -value)
        return out


def psi_p(p: int, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """psi_p(x) = ln p - sum_{k=0}^{p} 1/(x+k)."""
    xv = _to_mpf(x, cfg.working_digits)
    value = psi_p_tower(p, xv, 0, cfg)[0]
    return Real._wrap(_round_to(value, cfg.precision_digits), cfg.precision_digits)


def psi_p_deriv(p: int, n: int, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """psi_p^(n)(x) = (-1)^(n+1) n! sum_{k=0}^{p} (x+k)^-(n+1)."""
    _require_order(n, 1)
    xv = _to_mpf(x, cfg.working_digits)
    value = psi_p_tower(p, xv, n, cfg)[n]
    return Real._wrap(_round_to(value, cfg.precision_digits), cfg.precision_digits)


# ---------------------------------------------------------------------------
# q-digamma
# ---------------------------------------------------------------------------
#
# psi_q(x) = -ln(1-q) + ln(q) * sum_{k>=1} q^(kx) / (1 - q^k),  0 < q < 1,
# psi_q^(m)(x) = [m=0] * (-ln(1-q)) + (ln q)^(m+1) * T_m(x),
#     T_m(x) = sum_{k>=1} k^m q^(kx) / (1 - q^k) = sum_{j>=0} Li_{-m}(q^(x+j)).
#
# Li_{-s}(z) is rational: Li_{-s}(z) = N_s(z) / (1-z)^(s+1) with integer
# numerator polynomials N_s (Eulerian-number coefficients).  The j-sum is
# evaluated directly up to the asymptotic threshold and closed with
# Euler-Maclaurin, whose integral and derivative terms are again polylogs:
#
#   sum_{j>=J} Li_{-m}(e^(-e(x+j)))
#     = Li_{1-m}(r)/e + Li_{-m}(r)/2
#       + sum_{i>=1} B_2i/(2i)! e^(2i-1) Li_{-m-2i+1}(r),   r = q^(x+J),
#
# with e = -ln q.  The correction series is truncated at its smallest term.

_LI_NUMERATORS: list[list[int]] = [[0, 1]]  # N_0(z) = z, ascending powers


def _li_numerator(s: int) -> list[int]:
    while len(_LI_NUMERATORS) <= s:
        a = _LI_NUMERATORS[-1]
        prev_s = len(_LI_NUMERATORS) - 1
        inner = []
        for j in range(len(a) + 1):
            c = 0
            if j + 1 < len(a):
                c += (j + 1) * a[j + 1]
            if j < len(a):
                c += (prev_s + 1 - j) * a[j]
            inner.append(c)
        while inner and inner[-1] == 0:
            inner.pop()
        _LI_NUMERATORS.append([0] + inner)
    return _LI_NUMERATORS[s]


def _poly_eval(coeffs: list[int], z: mpf) -> mpf:
    acc = mpf(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


class _NegativePolylogTable:
    """Li_{-s}(r) for s = 0, 1, 2, ... at a fixed r, grown on demand."""

    def __init__(self, r: mpf, one_minus_r: mpf):
        self.r = r
        self.inv = 1 / one_minus_r
        self.values: list[mpf] = []
        self._power = self.inv  # inv^(s+1) for the next s

    def __getitem__(self, s: int) -> mpf:
        while len(self.values) <= s:
            k = len(self.values)
            self.values.append(_poly_eval(_li_numerator(k), self.r) * self._power)
            self._power *= self.inv
        return self.values[s]


def _validate_q(q: mpf) -> None:
    if not (0 < q < 1):
        raise DomainError(f"q must lie strictly in (0, 1), got {mpmath.nstr(q, 8)}")


def q_digamma_tower(q: mpf, x: mpf, max_order: int, cfg: EvalConfig = DEFAULT_CONFIG) -> list[mpf]:
    """Raw stack [psi_q(x), psi_q'(x), ..., psi_q^(max_order)(x)]."""
    with mp.workdps(cfg.working_digits):
        _validate_q(q)
        _require_positive(x)
        wd = cfg.working_digits
        eps_rel = mpf(10) ** (-(wd + 2))
        decay = -mpmath.ln(q)  # > 0
        threshold = asymptotic_shift_threshold(cfg.precision_digits)
        terms = max(0, int(mpmath.ceil(threshold - x)))
        if terms > cfg.max_series_terms:
            raise NonConvergence(
                "q-digamma series needs more terms than max_series_terms allows"
            )

        sums = [mpf(0)] * (max_order + 1)
        j = 0
        quiet_streak = 0
        while j < terms:
            w = decay * (x + j)
            r = mpmath.exp(-w)
            one_minus_r = -mpmath.expm1(-w)
            inv = 1 / one_minus_r
            power = inv
            largest_rel = mpf(0)
            for m in range(max_order + 1):
                li = _poly_eval(_li_numerator(m), r) * power
                sums[m] += li
                rel = li / sums[m]
                if rel > largest_rel:
                    largest_rel = rel
                power *= inv
            j += 1
            if largest_rel < eps_rel:
                quiet_streak += 1
                if quiet_streak >= 2:
                    break
            else:
                quiet_streak = 0

        # Euler-Maclaurin closure of the remaining tail, starting at x + j.
        u = x + j
        w = decay * u
        r = mpmath.exp(-w)
        one_minus_r = -mpmath.expm1(-w)
        table = _NegativePolylogTable(r, one_minus_r)
        li_one = -mpmath.ln(one_minus_r)
        for m in range(max_order + 1):
            integral = li_one if m == 0 else table[m - 1]
            tail = integral / decay + table[m] / 2
            eps_power = decay  # decay^(2i-1)
            decay_sq = decay * decay
            previous_mag = None
            i = 1
            while True:
                term = (
                    _bernoulli_mpf(2 * i) / _fact(2 * i) * eps_power * table[m + 2 * i - 1]
                )
                mag = abs(term)
                scale = max(mpf(1), abs(sums[m] + tail))
                if mag <= eps_rel * scale:
                    tail += term
                    break
                if previous_mag is not None and mag >= previous_mag:
                    # asymptotic series bottomed out above the target
                    raise NonConvergence(
                        "q-digamma Euler-Maclaurin tail stalled at relative "
                        f"size {mpmath.nstr(mag / scale, 5)}"
                    )
                tail += term
                previous_mag = mag
                eps_power *= decay_sq
                i += 1
                if i > 400:
                    raise NonConvergence("q-digamma tail correction ran away")
            sums[m] += tail

        ln_q = -decay
        out = []
        ln_q_power = ln_q
        for m in range(max_order + 1):
            value = ln_q_power * sums[m]
            if m == 0:
                value += -mpmath.ln(1 - q)
            out.append(value)
            ln_q_power *= ln_q
        return out


def q_digamma_deriv(
    q: RealLike, m: int, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG
) -> Real:
    """m-th derivative of the q-digamma function at x (m = 0 gives psi_q)."""
    if m < 0:
        raise DomainError(f"derivative order must be >= 0, got {m}")
    if m > MAX_DERIVATIVE_ORDER:
        raise OrderTooLarge(f"derivative order {m} exceeds the maximum {MAX_DERIVATIVE_ORDER}")
    qv = _to_mpf(q, cfg.working_digits)
    xv = _to_mpf(x, cfg.working_digits)
    value = q_digamma_tower(qv, xv, m, cfg)[m]
    return Real._wrap(_round_to(value, cfg.precision_digits), cfg.precision_digits)


def q_digamma(q: RealLike, x: RealLike, cfg: EvalConfig = DEFAULT_CONFIG) -> Real:
    """psi_q(x) = -ln(1-q) + ln(q) sum_{k>=1} q^(kx)/(1-q^k)."""
    return q_digamma_deriv(q, 0, x, cfg)
