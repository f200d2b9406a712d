import math

import numpy as np
import pytest

from nsdamp.damping import (
    DampingLaw,
    eval_law,
    eval_derivative,
    verify_admissible,
    lower_bound_constants,
    verify_lower_bound,
    monotonicity_gap,
    lipschitz_gap,
    young_constant,
    law_to_text,
    law_from_text,
    named_custom_law,
)


def exp_series(alpha, beta, r, x, terms=60):
    """Series oracle for alpha*(e^{beta x^r} - 1) = alpha * sum_{k>=1} (beta x^r)^k / k!."""
    y = beta * x ** r
    total, term = 0.0, 1.0
    for k in range(1, terms + 1):
        term *= y / k
        total += term
    return alpha * total


def exp_series_deriv(alpha, beta, r, x, terms=60):
    """Series oracle for the derivative alpha*beta*r*x^{r-1} sum_{k>=0} (beta x^r)^k / k!."""
    y = beta * x ** r
    total, term = 1.0, 1.0
    for k in range(1, terms + 1):
        term *= y / k
        total += term
    xr1 = 1.0 if (x == 0.0 and r == 1.0) else x ** (r - 1.0)
    return alpha * beta * r * xr1 * total


LAWS = [
    DampingLaw.polynomial(1, 5),
    DampingLaw.polynomial(2, 4),
    DampingLaw.polynomial(2, 3),
    DampingLaw.exponential(1, 1, 1),
    DampingLaw.exponential(1, 1, 2),
    DampingLaw.exponential(3, 1, 2),
]


class TestEval:
    def test_polynomial_value(self):
        assert eval_law(DampingLaw.polynomial(1, 5), 2.0) == 16.0

    def test_exponential_zero(self):
        assert eval_law(DampingLaw.exponential(1, 1, 2), 0.0) == 0.0

    def test_exponential_value_series_oracle(self):
        law = DampingLaw.exponential(2, 1, 1)
        got = eval_law(law, 1.0)
        assert got == pytest.approx(exp_series(2, 1, 1, 1.0), rel=1e-14)
        assert got == pytest.approx(3.43656, rel=1e-5)  # 2(e - 1)

    def test_zero_at_zero_all_families(self):
        for law in LAWS:
            assert eval_law(law, 0.0) == 0.0

    def test_negative_x_rejected(self):
        with pytest.raises(ValueError):
            eval_law(DampingLaw.polynomial(1, 5), -0.1)
        with pytest.raises(ValueError):
            eval_derivative(DampingLaw.exponential(1, 1, 1), -1.0)

    def test_array_evaluation(self):
        law = DampingLaw.polynomial(1, 3)
        x = np.array([0.0, 1.0, 2.0])
        assert np.allclose(eval_law(law, x), [0.0, 1.0, 4.0])

    def test_small_argument_no_cancellation(self):
        # expm1 path: f(x) ~ alpha*beta*x^r for tiny x, exact to full precision
        law = DampingLaw.exponential(1, 1, 1)
        x = 1e-12
        assert eval_law(law, x) == pytest.approx(math.expm1(x), rel=1e-15)

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValueError):
            DampingLaw.polynomial(0.0, 5)
        with pytest.raises(ValueError):
            DampingLaw.polynomial(1, 1.5)
        with pytest.raises(ValueError):
            DampingLaw.exponential(1, 0, 1)
        with pytest.raises(ValueError):
            DampingLaw.exponential(1, 1, 0.5)


class TestDerivative:
    def test_polynomial_value(self):
        assert eval_derivative(DampingLaw.polynomial(1, 5), 1.0) == 4.0

    def test_exponential_at_zero_r1(self):
        got = eval_derivative(DampingLaw.exponential(1, 2, 1), 0.0)
        assert got == pytest.approx(exp_series_deriv(1, 2, 1, 0.0), rel=1e-14)
        assert got == 2.0

    def test_central_difference_oracle(self):
        # |f'(x) - (f(x+h)-f(x-h))/2h| = O(h^2): two-decade h drop must shrink
        # the error ~quadratically unless it is already at rounding level.
        xs = [0.3, 0.9, 1.7]
        for law in LAWS:
            for x in xs:
                errs = []
                for h in (1e-3, 1e-4):
                    fd = (eval_law(law, x + h) - eval_law(law, x - h)) / (2 * h)
                    errs.append(abs(eval_derivative(law, x) - fd))
                scale = 1.0 + abs(eval_derivative(law, x))
                assert errs[0] <= 1e-4 * scale
                if errs[0] > 1e-10 * scale:
                    assert errs[1] <= errs[0] / 25.0

    def test_convexity_derivative_nondecreasing(self):
        xs = np.linspace(0, 5, 200)
        for law in LAWS:
            d = eval_derivative(law, xs)
            assert np.all(np.diff(d) >= -1e-12 * (1 + np.abs(d[:-1])))


class TestAdmissibility:
    def test_polynomial_clean(self):
        assert verify_admissible(DampingLaw.polynomial(1, 5), 10.0, 1000).ok

    def test_sine_flagged(self):
        law = DampingLaw.custom(np.sin, np.cos, name="sin")
        report = verify_admissible(law, 4.0, 1000)
        assert not report.ok
        kinds = {kind for _, kind, _ in report.violations}
        assert "f'<0" in kinds or "f' not nondecreasing" in kinds

    def test_exponential_clean_large_range(self):
        assert verify_admissible(DampingLaw.exponential(1, 1, 1), 50.0, 10_000).ok

    def test_zero_law_admissible(self):
        assert verify_admissible(DampingLaw.zero(), 10.0, 100).ok

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            verify_admissible(DampingLaw.polynomial(1, 5), -1.0, 100)
        with pytest.raises(ValueError):
            verify_admissible(DampingLaw.polynomial(1, 5), 1.0, 2)


class TestLowerBoundConstants:
    def test_polynomial(self):
        cert = lower_bound_constants(DampingLaw.polynomial(1, 5))
        assert (cert.c, cert.p) == (1.0, 4.0)
        assert cert.uniqueness_applicable

    def test_exponential(self):
        cert = lower_bound_constants(DampingLaw.exponential(3, 1, 2))
        assert cert.c == pytest.approx(1.0, rel=1e-15)
        assert cert.p == 3.0
        assert cert.uniqueness_applicable

    def test_p_equal_two_not_applicable(self):
        cert = lower_bound_constants(DampingLaw.polynomial(2, 3))
        assert (cert.c, cert.p) == (2.0, 2.0)
        assert not cert.uniqueness_applicable
        # exponential r=1 also lands on p=2: inconclusive by design
        assert not lower_bound_constants(DampingLaw.exponential(1, 1, 1)).uniqueness_applicable

    def test_custom_unsupported(self):
        with pytest.raises(ValueError):
            lower_bound_constants(DampingLaw.zero())


class TestVerifyLowerBound:
    def test_polynomial_exact_equality(self):
        cert = verify_lower_bound(DampingLaw.polynomial(1, 5), 1.0, 4.0, 100.0)
        assert cert.ok
        assert cert.verified_up_to == 100.0

    def test_exponential_half_x_squared(self):
        # e^x - 1 >= x^2/2 for x >= 0 (compare series tail), sampled check
        cert = verify_lower_bound(DampingLaw.exponential(1, 1, 1), 0.5, 2.0, 50.0)
        assert cert.ok

    def test_small_beta_violates_remark_constant(self):
        # the closed-form exponential constant fails for beta = 0.01:
        # f(1) = e^0.01 - 1 ~ 0.01005 < 0.05 * 1^2
        law = DampingLaw.exponential(1, 0.01, 1)
        cert = lower_bound_constants(law)
        assert cert.c == pytest.approx(0.05, rel=1e-12)
        checked = verify_lower_bound(law, cert.c, cert.p, 50.0)
        assert not checked.ok
        xs = np.array([x for x, _, _ in checked.violations])
        assert np.any((xs > 0.5) & (xs < 2.0))
        x, fx, bound = checked.violations[0]
        assert fx < bound

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            verify_lower_bound(DampingLaw.polynomial(1, 5), -1.0, 4.0, 10.0)


class TestMonotonicityGap:
    def test_equal_vectors(self):
        lhs, rhs = monotonicity_gap(DampingLaw.polynomial(1, 5), [1, 2, 3], [1, 2, 3], 1, 4)
        assert lhs == 0.0 and rhs == 0.0

    def test_hand_value(self):
        # f(x) = x^2: lhs = f(1)*1 = 1, rhs = (1/4)(1 + 0)*1 = 0.25
        lhs, rhs = monotonicity_gap(DampingLaw.polynomial(1, 3), [1, 0, 0], [0, 0, 0], 1, 2)
        assert lhs == pytest.approx(1.0)
        assert rhs == pytest.approx(0.25)

    @pytest.mark.parametrize("law", [DampingLaw.polynomial(1, 5),
                                     DampingLaw.polynomial(2, 4),
                                     DampingLaw.exponential(1, 1, 2)])
    def test_sampled_battery(self, law):
        cert = lower_bound_constants(law)
        assert verify_lower_bound(law, cert.c, cert.p, 20.0).ok
        rng = np.random.default_rng(12345)
        u = rng.uniform(-5, 5, size=(100_000, 3))
        v = rng.uniform(-5, 5, size=(100_000, 3))
        lhs, rhs = monotonicity_gap(law, u, v, cert.c, cert.p)
        violations = np.sum(lhs < rhs - 1e-12 * (1 + np.abs(rhs)))
        assert violations == 0


class TestLipschitzGap:
    def test_equal_points(self):
        assert lipschitz_gap(DampingLaw.polynomial(1, 5), 1.0, 1.0, 2.0) == (0.0, 0.0)

    def test_hand_value(self):
        # f(x) = x^2 on [0,2]: |2.25 - 0.25| = 2 vs f'(2)*1 = 4
        lhs, rhs = lipschitz_gap(DampingLaw.polynomial(1, 3), 1.5, 0.5, 2.0)
        assert (lhs, rhs) == (2.0, 4.0)

    def test_sampled_battery(self):
        rng = np.random.default_rng(999)
        R = 3.0
        x = rng.uniform(0, R, size=100_000)
        y = rng.uniform(0, R, size=100_000)
        lhs, rhs = lipschitz_gap(DampingLaw.exponential(1, 1, 1), x, y, R)
        assert np.sum(lhs > rhs + 1e-12 * (1 + rhs)) == 0

    def test_domain_error(self):
        with pytest.raises(ValueError):
            lipschitz_gap(DampingLaw.polynomial(1, 5), 3.0, 0.5, 2.0)


def brute_force_young(nu, c, p):
    """Two-stage grid maximization of a^2/(4 nu) - (c/2) a^p over a > 0."""
    a = np.linspace(1e-8, 10.0, 1_000_000)
    g = a ** 2 / (4 * nu) - 0.5 * c * a ** p
    i = int(np.argmax(g))
    lo, hi = a[max(i - 2, 0)], a[min(i + 2, a.size - 1)]
    a2 = np.linspace(lo, hi, 200_001)
    g2 = a2 ** 2 / (4 * nu) - 0.5 * c * a2 ** p
    return float(np.max(g2))


class TestYoungConstant:
    def test_reference_value(self):
        assert young_constant(1, 1, 4) == pytest.approx(1 / 32, rel=1e-15)

    def test_scaling_in_c(self):
        assert young_constant(1, 2, 4) == pytest.approx(1 / 64, rel=1e-15)

    def test_brute_force_grid(self):
        for nu in (0.5, 1.0, 2.0):
            for c in (0.5, 1.0, 2.0):
                for p in (3.0, 4.0, 6.0):
                    exact = young_constant(nu, c, p)
                    assert exact == pytest.approx(brute_force_young(nu, c, p), rel=1e-9)

    def test_pointwise_supremum_property(self):
        a = np.linspace(0, 10, 100_001)
        for (nu, c, p) in [(1.0, 1.0, 4.0), (0.3, 2.0, 3.0), (2.0, 0.5, 5.0)]:
            K = young_constant(nu, c, p)
            slack = a ** 2 / (4 * nu) - K - 0.5 * c * a ** p
            assert np.max(slack) <= 1e-12 * (1 + K)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            young_constant(1.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            young_constant(1.0, 1.0, 1.5)


class TestSerialization:
    def test_round_trip(self):
        for law in [DampingLaw.polynomial(1.5, 5),
                    DampingLaw.exponential(2, 0.25, 2),
                    DampingLaw.zero()]:
            back = law_from_text(law_to_text(law))
            assert back.family == law.family
            xs = np.linspace(0, 3, 17)
            assert np.allclose(eval_law(back, xs), eval_law(law, xs))

    def test_named_custom(self):
        law = named_custom_law("sin")
        assert eval_law(law, math.pi / 2) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            named_custom_law("nope")


class TestMonotoneConvexProperty:
    def test_f_monotone_sampled(self):
        xs = np.sort(np.random.default_rng(7).uniform(0, 10, 500))
        for law in LAWS:
            fx = eval_law(law, xs)
            assert np.all(np.diff(fx) >= -1e-12 * (1 + np.abs(fx[:-1])))
