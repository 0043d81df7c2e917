"""Kernel tests: Real arithmetic, configuration, gamma, quadrature."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from cm_lab import (
    Constants,
    DomainError,
    EvalConfig,
    NonConvergence,
    Real,
    bernoulli,
    euler_gamma,
    integrate_semi_infinite,
    integrate_semi_infinite_full,
)

from oracles import euler_gamma_bruteforce


class TestReal:
    def test_defaults_and_precision_tagging(self):
        x = Real("1.5")
        assert x.precision == 50
        y = Real("2.5", 30)
        assert (x + y).precision == 50

    def test_minimum_precision_enforced(self):
        with pytest.raises(ValueError):
            Real("1", 10)

    def test_decimal_string_exactness(self):
        x = Real("0.1", 40)
        with mp.workdps(45):
            assert abs(x.value - mpf("0.1")) < mpf(10) ** -40

    def test_comparisons_exact(self):
        a = Real("1", 30)
        b = Real("1", 50)
        assert a == b
        assert Real("2", 30) > a
        assert a.sign() == 1
        assert Real(0).sign() == 0
        assert Real("-3").sign() == -1

    def test_negation_keeps_full_precision(self):
        # unary ops must not round at the ambient (low) mpmath context
        x = Real("0.50949726295483928474060901351877967286536877067305", 50)
        assert (-(-x)).value == x.value
        assert abs(x).value == x.value

    def test_pow_rejects_complex_result(self):
        with pytest.raises(DomainError):
            Real("-2") ** Real("0.5")

    def test_decimal_roundtrip_idempotent(self):
        x = Real("3.14159265358979323846264338327950288", 35)
        s = x.decimal()
        assert Real(s, 35).decimal() == s

    @given(
        a=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
        b=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_add_then_subtract_within_one_ulp(self, a, b):
        x = Real(a, 30)
        y = Real(b, 30)
        back = (x + y) - y
        scale = max(abs(a), abs(b), 1.0)
        assert abs(back.value - x.value) <= mpf(10) ** -28 * scale


class TestEvalConfig:
    def test_defaults(self):
        cfg = EvalConfig()
        assert cfg.precision_digits == 50
        with mp.workdps(60):
            assert abs(cfg.sign_tolerance.value - mpf(10) ** -25) < mpf(10) ** -30
            assert abs(cfg.quadrature_target_error.value - mpf(10) ** -40) < mpf(10) ** -85

    def test_validation(self):
        with pytest.raises(ValueError):
            EvalConfig(precision_digits=10)
        with pytest.raises(ValueError):
            EvalConfig(sign_tolerance=Real("1.5"))
        with pytest.raises(ValueError):
            EvalConfig(quadrature_target_error=Real("1e-20"))  # above the ceiling
        with pytest.raises(ValueError):
            EvalConfig(max_series_terms=0)

    def test_with_precision_rederives_tolerances(self):
        cfg = EvalConfig().with_precision(100)
        assert cfg.precision_digits == 100
        with mp.workdps(110):
            assert abs(cfg.sign_tolerance.value - mpf(10) ** -50) < mpf(10) ** -60


class TestBernoulli:
    def test_known_values(self):
        expected = {
            0: Fraction(1),
            1: Fraction(-1, 2),
            2: Fraction(1, 6),
            3: Fraction(0),
            4: Fraction(-1, 30),
            6: Fraction(1, 42),
            8: Fraction(-1, 30),
            10: Fraction(5, 66),
            12: Fraction(-691, 2730),
        }
        for n, value in expected.items():
            assert bernoulli(n) == value


class TestEulerGamma:
    def test_matches_bruteforce_oracle_at_15_digits(self):
        cfg = EvalConfig(precision_digits=15)
        oracle = euler_gamma_bruteforce()
        assert abs(float(euler_gamma(cfg)) - oracle) < 1e-13
        assert euler_gamma(cfg).decimal().startswith("0.577215664901533"[:16])

    def test_gamma_equals_minus_digamma_at_one(self):
        from cm_lab import digamma

        cfg = EvalConfig(precision_digits=30)
        g = euler_gamma(cfg)
        psi1 = digamma(1, cfg)
        assert abs((g + psi1).value) < mpf(10) ** -28

    def test_bit_identical_for_equal_config(self):
        cfg = EvalConfig(precision_digits=40)
        assert euler_gamma(cfg).value == euler_gamma(cfg).value

    def test_precisions_agree_in_leading_digits(self):
        for d in (20, 50):
            lo = euler_gamma(EvalConfig(precision_digits=d))
            hi = euler_gamma(EvalConfig(precision_digits=d + 10))
            with mp.workdps(d + 20):
                assert abs(lo.value - hi.value) < mpf(10) ** -(d - 2)

    def test_constants_container(self):
        cfg = EvalConfig(precision_digits=25)
        consts = Constants.for_config(cfg)
        assert consts.euler_gamma == euler_gamma(cfg)


class TestSemiInfiniteQuadrature:
    def test_exponential_decay_one(self, cfg50):
        value = integrate_semi_infinite(lambda t: mpmath.exp(-t.value), 1, cfg50)
        assert abs(value.value - 1) < cfg50.quadrature_target_error.value

    def test_exponential_decay_two(self, cfg50):
        value = integrate_semi_infinite(lambda t: mpmath.exp(-2 * t.value), 2, cfg50)
        with mp.workdps(60):
            assert abs(value.value - mpf("0.5")) < cfg50.quadrature_target_error.value

    def test_psi_p_kernel_integrand(self, cfg50):
        # (1-e^(-2t))/(1-e^(-t)) e^(-t) = e^(-t) + e^(-2t), integral 3/2
        def integrand(t):
            tv = t.value
            return mpmath.expm1(-2 * tv) / mpmath.expm1(-tv) * mpmath.exp(-tv)

        value = integrate_semi_infinite(integrand, 1, cfg50)
        with mp.workdps(60):
            assert abs(value.value - mpf("1.5")) < cfg50.quadrature_target_error.value

    def test_error_estimate_exposed(self, cfg50):
        result = integrate_semi_infinite_full(lambda t: mpmath.exp(-t.value), 1, cfg50)
        assert result.error_estimate.value <= cfg50.quadrature_target_error.value
        assert result.evaluations > 0
        assert result.levels >= 3

    def test_linearity(self, cfg50):
        f = lambda t: mpmath.exp(-t.value)
        g = lambda t: mpmath.exp(-2 * t.value)
        both = integrate_semi_infinite(lambda t: f(t) + g(t), 1, cfg50)
        split = integrate_semi_infinite(f, 1, cfg50) + integrate_semi_infinite(g, 2, cfg50)
        assert abs((both - split).value) <= 3 * cfg50.quadrature_target_error.value

    def test_requires_positive_decay_rate(self, cfg50):
        with pytest.raises(DomainError):
            integrate_semi_infinite(lambda t: mpmath.exp(-t.value), 0, cfg50)

    def test_nonconvergence_when_target_unreachable(self):
        cfg = EvalConfig(precision_digits=15, quadrature_target_error=Real("1e-300", 15))
        with pytest.raises(NonConvergence):
            integrate_semi_infinite(lambda t: mpmath.exp(-t.value), 1, cfg)

    def test_determinism(self, cfg50):
        f = lambda t: mpmath.exp(-3 * t.value)
        assert integrate_semi_infinite(f, 3, cfg50).value == integrate_semi_infinite(
            f, 3, cfg50
        ).value
