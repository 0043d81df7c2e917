"""Taylor-jet tests: algebra, composition, expressions, derivatives."""

import math
import random

import mpmath
import pytest
from mpmath import mp, mpf

from cm_lab import (
    DomainError,
    EvalConfig,
    MismatchedJets,
    OrderTooLarge,
    Real,
    derivative,
    derivative_stack,
    eval_jet,
    euler_gamma,
    jet_combine,
    jet_compose,
    jet_constant,
    jet_neg,
    jet_variable,
    polygamma,
)
from cm_lab.jets import (
    affine,
    constant,
    euler_gamma_constant,
    exp,
    ln,
    power,
    psi,
    psi_p,
    psi_q,
    variable,
)

from oracles import finite_difference


def _close(a: Real, b, tol="1e-45") -> bool:
    with mp.workdps(60):
        return abs(a.value - mpf(b)) < mpf(tol)


class TestJetConstruction:
    def test_identity_jet(self):
        j = jet_variable(2, 3)
        assert [float(c) for c in j.coeffs] == [2.0, 1.0, 0.0, 0.0]
        assert jet_variable("0.5", 0).coeffs[0] == Real("0.5")
        j1 = jet_variable(1, 1)
        assert [float(c) for c in j1.coeffs] == [1.0, 1.0]

    def test_order_bounds(self):
        with pytest.raises(DomainError):
            jet_variable(1, -1)
        with pytest.raises(OrderTooLarge):
            jet_variable(1, 65)


class TestJetCombine:
    def test_square_of_one_plus_x(self):
        base = jet_combine("add", jet_variable(0, 2), jet_constant(1, 2, t0=0))
        squared = jet_combine("mul", base, base)
        assert [float(c) for c in squared.coeffs] == [1.0, 2.0, 1.0]

    def test_additive_inverse_gives_zero_jet(self):
        a = eval_jet(psi(variable()), "1.3", 4)
        zero = jet_combine("add", a, jet_neg(a))
        assert all(c.value == 0 for c in zero.coeffs)

    def test_t_times_ln_t(self, cfg50):
        j = eval_jet(variable() * ln(variable()), 1, 3, cfg50)
        assert _close(j.coeffs[0], 0)
        assert _close(j.coeffs[1], 1)
        assert _close(j.coeffs[2], mpf(1) / 2)
        assert _close(j.coeffs[3], -mpf(1) / 6)

    def test_mismatch_errors(self):
        with pytest.raises(MismatchedJets):
            jet_combine("add", jet_variable(1, 2), jet_variable(2, 2))
        with pytest.raises(MismatchedJets):
            jet_combine("mul", jet_variable(1, 2), jet_variable(1, 3))


class TestJetCompose:
    def test_ln_of_constant_jet(self, cfg50):
        with mp.workdps(60):
            e_val = mpmath.exp(mpf(1))
        j = jet_compose("ln", jet_constant(Real._wrap(e_val, 50), 2, t0=1), cfg50)
        assert _close(j.coeffs[0], 1)
        assert j.coeffs[1].value == 0 and j.coeffs[2].value == 0

    def test_psi_of_identity(self, cfg50):
        j = jet_compose("psi", jet_variable(1, 1), cfg50)
        gamma = euler_gamma(cfg50)
        assert abs((j.coeffs[0] + gamma).value) < mpf(10) ** -45
        with mp.workdps(60):
            assert abs(j.coeffs[1].value - mpmath.pi**2 / 6) < mpf(10) ** -45

    def test_exp_ln_roundtrip_is_identity(self, cfg50):
        inner = jet_compose("ln", jet_variable(3, 4), cfg50)
        back = jet_compose("exp", inner, cfg50)
        assert _close(back.coeffs[0], 3)
        assert _close(back.coeffs[1], 1)
        for c in back.coeffs[2:]:
            assert abs(c.value) < mpf(10) ** -45

    def test_power_with_real_exponent(self, cfg50):
        j = jet_compose("power", jet_variable(2, 2), cfg50, exponent=Real("0.5"))
        with mp.workdps(60):
            root2 = mpmath.sqrt(mpf(2))
            assert abs(j.coeffs[0].value - root2) < mpf(10) ** -45
            assert abs(j.coeffs[1].value - 1 / (2 * root2)) < mpf(10) ** -45

    def test_domain_checks(self, cfg50):
        with pytest.raises(DomainError):
            jet_compose("ln", jet_variable(-1, 2), cfg50)
        with pytest.raises(DomainError):
            jet_compose("psi", jet_variable(0, 2), cfg50)
        with pytest.raises(DomainError):
            jet_compose("power", jet_variable(-2, 2), cfg50, exponent=Real("0.5"))
        with pytest.raises(DomainError):
            jet_compose("sin", jet_variable(1, 2), cfg50)

    def test_psi_p_and_psi_q_composition(self, cfg50):
        jp = jet_compose("psi_p", jet_variable(1, 1), cfg50, p=1)
        assert _close(jp.coeffs[0], "-1.5")
        jq = jet_compose("psi_q", jet_variable(1, 1), cfg50, q="0.5")
        assert jq.coeffs[1].value > 0


class TestDerivative:
    def test_t_ln_t_second_derivative(self, cfg50):
        assert _close(derivative(variable() * ln(variable()), 2, 1, cfg50), 1)

    def test_neg_ln_first_derivative(self, cfg50):
        assert _close(derivative(-ln(variable()), 1, "0.5", cfg50), -2)

    def test_psi_first_derivative_is_trigamma(self, cfg50):
        value = derivative(psi(variable()), 1, 1, cfg50)
        ref = polygamma(1, 1, cfg50)
        assert abs((value - ref).value) < mpf(10) ** -45

    def test_affine_and_constants(self, cfg50):
        e = affine(2, 3)  # 2t + 3
        assert _close(derivative(e, 0, "1.5", cfg50), 6)
        assert _close(derivative(e, 1, "1.5", cfg50), 2)
        assert derivative(e, 2, "1.5", cfg50).value == 0
        g = euler_gamma_constant()
        assert derivative(g, 0, 5, cfg50) == euler_gamma(cfg50)

    def test_order_cap(self, cfg50):
        with pytest.raises(OrderTooLarge):
            derivative(variable(), 65, 1, cfg50)


class TestJetInvariants:
    def test_coefficient_prefix_consistency(self, cfg50):
        e = -((variable() * (ln(variable()) - psi(variable()))) * ln(variable()))
        lo = eval_jet(e, "0.4", 6, cfg50)
        hi = eval_jet(e, "0.4", 8, cfg50)
        with mp.workdps(60):
            for a, b in zip(lo.coeffs, hi.coeffs):
                scale = max(mpf(1), abs(a.value))
                assert abs(a.value - b.value) < mpf(10) ** -45 * scale

    def _random_safe_expr(self, rng: random.Random):
        t = variable()
        leaves = [
            lambda: affine(rng.uniform(0.2, 2.0), rng.uniform(0.1, 2.0)),
            lambda: ln(affine(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))),
            lambda: exp(affine(rng.uniform(-0.8, 0.8), 0)),
            lambda: psi(affine(rng.uniform(0.5, 1.5), rng.uniform(0.2, 1.0))),
            lambda: power(t, rng.uniform(0.3, 1.8)),
        ]
        make = rng.choice(leaves)
        e = make()
        if rng.random() < 0.5:
            other = rng.choice(leaves)()
            e = e + other if rng.random() < 0.5 else e * other
        return e

    def test_leibniz_and_linearity_on_random_expressions(self, cfg30):
        rng = random.Random(1234)
        for _ in range(25):
            a = self._random_safe_expr(rng)
            b = self._random_safe_expr(rng)
            t0 = Real(str(round(rng.uniform(0.4, 2.5), 6)), 30)
            n = rng.randint(0, 4)
            with mp.workdps(45):
                product = derivative(a * b, n, t0, cfg30).value
                leibniz = mpf(0)
                for k in range(n + 1):
                    leibniz += (
                        mpf(math.comb(n, k))
                        * derivative(a, k, t0, cfg30).value
                        * derivative(b, n - k, t0, cfg30).value
                    )
                scale = max(mpf(1), abs(product))
                assert abs(product - leibniz) < mpf(10) ** -25 * scale

                total = derivative(a + b, n, t0, cfg30).value
                split = derivative(a, n, t0, cfg30).value + derivative(b, n, t0, cfg30).value
                scale = max(mpf(1), abs(total))
                assert abs(total - split) < mpf(10) ** -27 * scale

    def test_matches_finite_differences(self, cfg30):
        t = variable()
        e = (t * (ln(t) - psi(t))) * ln(t)
        with mp.workdps(45):
            f = lambda x: (x * (mpmath.ln(x) - mpmath.digamma(x))) * mpmath.ln(x)
            for n in (1, 2, 3):
                mine = derivative(e, n, "0.7", cfg30).value
                ref = finite_difference(f, "0.7", n, dps=30)
                assert abs(mine - ref) / max(mpf(1), abs(ref)) < mpf(10) ** -6

    def test_derivative_stack_matches_individual_derivatives(self, cfg30):
        t = variable()
        e = exp(ln(t) * ln(t))
        stack = derivative_stack(e, 5, "1.4", cfg30)
        for n in (0, 2, 5):
            single = derivative(e, n, "1.4", cfg30)
            with mp.workdps(40):
                scale = max(mpf(1), abs(single.value))
                assert abs(stack[n].value - single.value) < mpf(10) ** -27 * scale

    def test_psi_q_expression_derivatives(self, cfg30):
        e = psi_q("0.5", variable())
        from oracles import q_digamma_direct

        for m in (0, 1, 3):
            mine = derivative(e, m, "0.8", cfg30)
            ref = q_digamma_direct("0.5", m, "0.8", dps=35)
            with mp.workdps(40):
                assert abs(mine.value - ref) < mpf(10) ** -27 * max(mpf(1), abs(ref))

    def test_psi_p_expression_against_constant_shift(self, cfg30):
        # d/dt psi_p at composed affine argument: chain rule through jets
        e = psi_p(3, affine(2, 1))
        mine = derivative(e, 1, "0.5", cfg30)
        from cm_lab import psi_p_deriv

        ref = psi_p_deriv(3, 1, 2 * mpf("0.5") + 1, cfg30) * 2
        assert abs((mine - ref).value) < mpf(10) ** -27
