"""Independent reference computations used by the tests.

Everything here deliberately avoids the code paths of the package under
test: brute-force partial sums with Richardson extrapolation, exact
finite-difference stencils solved over Fractions, direct q-series
summation, and (for published constants) mpmath's own implementations.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

# Euler's constant, published value (70 digits), used where an additive
# reference constant is needed by a series oracle.
EULER_GAMMA_70 = (
    "0.5772156649015328606065120900824024310421593359399235988057672348848677"
)


def euler_gamma_bruteforce() -> float:
    """gamma from H_n - ln n with Richardson extrapolation, n up to 10^6.

    Compensated float64 summation; accurate to ~1e-15.
    """
    ns = [125_000, 250_000, 500_000, 1_000_000]
    seq = []
    harmonic = 0.0
    terms: list[float] = []
    k = 1
    for n in ns:
        while k <= n:
            terms.append(1.0 / k)
            k += 1
        seq.append(math.fsum(terms) - math.log(n))
    # H_n - ln n = gamma + c1/n + c2/n^2 + ...; eliminate one power per level
    level = 1
    while len(seq) > 1:
        factor = 2.0**level
        seq = [
            (factor * seq[i + 1] - seq[i]) / (factor - 1.0)
            for i in range(len(seq) - 1)
        ]
        level += 1
    return seq[0]


def digamma_series(x: str | float, partial_ns=(4_000, 8_000, 16_000, 32_000)) -> float:
    """psi(x) from the defining series sum (1/(k+1) - 1/(k+x)) - gamma.

    The partial sums converge like 1/n, so Richardson extrapolation is
    applied across doubled truncation points; float64, ~1e-12 accurate.
    """
    xf = float(x)
    seq = []
    acc: list[float] = []
    k = 0
    for n in partial_ns:
        while k < n:
            acc.append(1.0 / (k + 1) - 1.0 / (k + xf))
            k += 1
        seq.append(math.fsum(acc))
    level = 1
    while len(seq) > 1:
        factor = 2.0**level
        seq = [
            (factor * seq[i + 1] - seq[i]) / (factor - 1.0)
            for i in range(len(seq) - 1)
        ]
        level += 1
    return seq[0] - float(mpf(EULER_GAMMA_70))


def zeta_int_direct(s: int, dps: int = 40, terms: int = 4000) -> mpf:
    """zeta(s) by direct summation with an Euler-Maclaurin tail bound.

    sum_{k<=N} k^-s + N^(1-s)/(s-1) - N^-s/2 + Bernoulli corrections; the
    correction series is truncated once terms drop below the target.
    """
    with mp.workdps(dps + 10):
        total = mpf(0)
        for k in range(1, terms + 1):
            total += mpf(1) / mpf(k) ** s
        n = mpf(terms)
        total += n ** (1 - s) / (s - 1) - n ** (-s) / 2
        # d/dk k^-s chains: B_2j/(2j)! * (s)_(2j-1) * N^(-s-2j+1)
        coeff = mpf(s)
        power = n ** (-s - 1)
        bern = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30)]
        for j, b in enumerate(bern, start=1):
            term = (
                mpf(b.numerator)
                / b.denominator
                / mpf(math.factorial(2 * j))
                * coeff
                * power
            )
            total += term
            if abs(term) < mpf(10) ** (-(dps + 5)):
                break
            coeff *= (s + 2 * j - 1) * (s + 2 * j)
            power /= n * n
        return +total


def q_digamma_direct(q: str, m: int, x: str, dps: int = 40, kmax: int = 500_000) -> mpf:
    """Direct partial sums of the q-digamma series with a geometric tail bound.

    Practical only for q not too close to 1; that is exactly why it serves
    as an independent oracle for the package's accelerated evaluator.
    """
    with mp.workdps(dps + 10):
        qv = mpf(q)
        xv = mpf(x)
        ln_q = mpmath.ln(qv)
        ratio = qv**xv
        target = mpf(10) ** (-(dps + 5))
        total = mpf(0)
        qk = mpf(1)  # q^k
        rk = mpf(1)  # q^(k x)
        for k in range(1, kmax + 1):
            qk *= qv
            rk *= ratio
            total += mpf(k) ** m * rk / (1 - qk)
            # geometric bound on the remaining tail
            tail = mpf(k + 1) ** m * rk * ratio / ((1 - qv) * (1 - ratio))
            if tail < target * max(mpf(1), total):
                break
        else:
            raise RuntimeError("direct q-series did not converge in budget")
        value = ln_q ** (m + 1) * total
        if m == 0:
            value += -mpmath.ln(1 - qv)
        return +value


def _stencil_weights(n: int, radius: int) -> list[Fraction]:
    """Exact central finite-difference weights for the n-th derivative.

    Solves sum_j w_j * j^i = n! * [i == n] for i = 0..2*radius over the
    offsets -radius..radius, by Fraction Gaussian elimination.
    """
    offsets = list(range(-radius, radius + 1))
    size = len(offsets)
    rows = [
        [Fraction(off) ** i for off in offsets] + [Fraction(math.factorial(n) if i == n else 0)]
        for i in range(size)
    ]
    for col in range(size):
        pivot = next(r for r in range(col, size) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = Fraction(1, 1) / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][-1] for i in range(size)]


def finite_difference(f, x: str | mpf, n: int, dps: int = 30) -> mpf:
    """Central finite-difference estimate of f^(n)(x) at ``dps`` digits.

    Step size 10^(-dps/(n+2)); ``f`` maps mpf -> mpf and is evaluated at
    dps + 10 working digits.
    """
    if n == 0:
        with mp.workdps(dps + 10):
            return f(mpf(x))
    radius = (n + 1) // 2 + 1
    weights = _stencil_weights(n, radius)
    with mp.workdps(dps + 10):
        xv = mpf(x)
        h = mpf(10) ** (-mpf(dps) / (n + 2))
        total = mpf(0)
        for j, w in zip(range(-radius, radius + 1), weights):
            if w == 0:
                continue
            total += mpf(w.numerator) / w.denominator * f(xv + j * h)
        return total / h**n
