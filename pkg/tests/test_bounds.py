"""Rate bounds, exact codebook error, and their stated relationships."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from coordbounds import (
    InfeasibleRateError,
    PreconditionError,
    TypeVector,
    TypicalitySpec,
    build_distribution,
    error_curve,
    error_floor,
    exact_achievability_bound,
    expected_codebook_error,
    gaussian_approx_rate,
    info_profile,
    optimal_random_codebook_rate,
    prob_typical_given_type,
    q_function,
    rate_rounding,
    typicality_prob_bound_check,
)
from coordbounds.simulate import mc_expected_error


@pytest.fixture(scope="module")
def v_constant_dist():
    """|V| = 1: the output sequence is forced."""
    return build_distribution(
        [0, 1], ["x"], [((0, "x"), Fraction(1, 2)), ((1, "x"), Fraction(1, 2))]
    )


@pytest.fixture(scope="module")
def uniform_product():
    q = Fraction(1, 4)
    return build_distribution([0, 1], [0, 1], [((u, v), q) for u in (0, 1) for v in (0, 1)])


class TestProbTypicalGivenType:
    def test_infeasible_type_probability_is_zero(self, example_dist):
        assert prob_typical_given_type(TypeVector((0, 1), (7, 3)), example_dist, 0.04) == 0.0

    def test_v_constant_indicator(self, v_constant_dist):
        # The unique completion is typical iff the source type is balanced enough.
        delta = Fraction(1, 10)
        assert prob_typical_given_type(TypeVector((0, 1), (5, 5)), v_constant_dist, delta) == 1.0
        assert prob_typical_given_type(TypeVector((0, 1), (9, 1)), v_constant_dist, delta) == 0.0

    def test_uniform_product_matches_sequence_enumeration(self, uniform_product):
        n, delta = 4, Fraction(1, 4)
        t_u = TypeVector((0, 1), (2, 2))
        got = prob_typical_given_type(t_u, uniform_product, delta)
        # direct enumeration over all 16 output sequences for a fixed source
        u_seq = (0, 0, 1, 1)
        total = 0.0
        for v_seq in itertools.product((0, 1), repeat=n):
            counts = {(u, v): 0 for u in (0, 1) for v in (0, 1)}
            for u, v in zip(u_seq, v_seq):
                counts[(u, v)] += 1
            if all(abs(Fraction(c, n) - Fraction(1, 4)) <= delta for c in counts.values()):
                total += 0.5**n
        assert got == pytest.approx(total, abs=1e-12)
        assert got == pytest.approx(1.0, abs=1e-12)

    def test_alphabet_mismatch(self, example_dist):
        with pytest.raises(ValueError, match="alphabet"):
            prob_typical_given_type(TypeVector(("a", "b"), (5, 5)), example_dist, 0.1)


class TestExpectedCodebookError:
    def test_all_infeasible_gives_exactly_one(self, example_dist):
        for m in (1, 2, 1000, 2**40):
            assert expected_codebook_error(10, m, example_dist, 0.04) == 1.0

    def test_monotone_and_sandwiched(self, example_dist):
        n, delta = 40, 0.025
        floor = error_floor(n, example_dist, delta)
        previous = 1.0
        for m in (1, 2, 4, 8, 16, 64, 256, 4096, 2**20, 2**60):
            err = expected_codebook_error(n, m, example_dist, delta)
            assert floor <= err <= 1.0
            assert err <= previous + 1e-12
            previous = err

    def test_strictly_decreasing_with_partial_success(self, example_dist):
        n, delta = 40, 0.025
        assert expected_codebook_error(n, 2, example_dist, delta) < expected_codebook_error(
            n, 1, example_dist, delta
        )

    def test_converges_to_floor(self, example_dist):
        n, delta = 40, 0.025
        floor = error_floor(n, example_dist, delta)
        assert expected_codebook_error(n, 2**200, example_dist, delta) == pytest.approx(
            floor, abs=1e-12
        )

    def test_bad_m(self, example_dist):
        with pytest.raises(ValueError, match="codebook size"):
            expected_codebook_error(10, 0, example_dist, 0.04)


class TestErrorFloor:
    def test_infeasible_case(self, example_dist):
        assert error_floor(10, example_dist, 0.04) == 1.0

    def test_point_mass(self, point_mass_dist):
        for n in (1, 3, 9):
            assert error_floor(n, point_mass_dist, Fraction(0)) == 0.0

    def test_partial_floor(self, example_dist):
        floor = error_floor(40, example_dist, 0.025)
        assert 0.0 < floor < 1.0
        # mass of the two completable source types (counts 13 and 14 of symbol 1)
        expected = 1.0 - sum(
            math.comb(40, k) * (1 / 3) ** k * (2 / 3) ** (40 - k) for k in (13, 14)
        )
        assert floor == pytest.approx(expected, abs=1e-12)


class TestErrorCurve:
    def test_curve_invariants(self, example_dist):
        curve = error_curve(40, example_dist, 0.025, [1, 4, 16, 64])
        errs = [e for _, e in curve.points]
        assert errs == sorted(errs, reverse=True)
        assert all(e >= curve.floor for e in errs)
        assert [m for m, _ in curve.points] == [1, 4, 16, 64]


class TestOptimalRandomCodebookRate:
    def test_infeasible(self, example_dist):
        with pytest.raises(InfeasibleRateError, match="infeasible"):
            optimal_random_codebook_rate(10, example_dist, 0.04, 0.1)

    def test_paper_scale_convention_threshold_is_infeasible(self, example_dist):
        # At n = 200 the c = 1/12 threshold leaves error floor ~ 0.65 > 0.1.
        spec = TypicalitySpec(mode="convention", c=Fraction(1, 12))
        with pytest.raises(InfeasibleRateError):
            optimal_random_codebook_rate(200, example_dist, spec.delta_at(200), 0.1)

    def test_single_codeword_suffices(self, v_constant_dist):
        rate, m_star = optimal_random_codebook_rate(8, v_constant_dist, Fraction(1, 2), 0.1)
        assert (rate, m_star) == (0.0, 1)

    def test_self_consistency_large_n(self, example_dist):
        n, delta, eps = 200, Fraction(1, 10), 0.1
        rate, m_star = optimal_random_codebook_rate(n, example_dist, delta, eps)
        assert rate == pytest.approx(math.log2(m_star) / n)
        assert expected_codebook_error(n, m_star, example_dist, delta) <= eps
        assert m_star > 1
        assert expected_codebook_error(n, m_star - 1, example_dist, delta) > eps

    def test_mc_ranking_at_accessible_size(self, example_dist):
        # Small enough that a codebook is actually sampled per trial.
        n, delta, eps = 16, Fraction(3, 10), 0.2
        rate, m_star = optimal_random_codebook_rate(n, example_dist, delta, eps)
        err_star = expected_codebook_error(n, m_star, example_dist, delta)
        err_below = expected_codebook_error(n, m_star - 1, example_dist, delta)
        assert err_star <= eps < err_below
        est_star = mc_expected_error(n, m_star, example_dist, delta, trials=20000, seed=71)
        est_below = mc_expected_error(n, m_star - 1, example_dist, delta, trials=20000, seed=72)
        assert abs(est_star.mean - err_star) <= 3 * est_star.std_error
        assert abs(est_below.mean - err_below) <= 3 * est_below.std_error
        assert est_below.mean > est_star.mean

    def test_eps_validation(self, example_dist):
        with pytest.raises(ValueError, match="eps"):
            optimal_random_codebook_rate(40, example_dist, 0.025, 1.2)


class TestGaussianApproxRate:
    def test_closed_form(self, example_dist):
        rate = gaussian_approx_rate(100, example_dist, q_function(1.0))
        expected = info_profile(example_dist).mutual_information + math.sqrt(1 / 1800)
        assert rate == pytest.approx(expected, abs=1e-9)

    def test_half_eps_gives_mutual_information(self, example_dist):
        prof = info_profile(example_dist)
        assert gaussian_approx_rate(123, example_dist, 0.5) == pytest.approx(
            prof.mutual_information, abs=1e-15
        )

    def test_zero_variance(self, product_dist):
        for n in (10, 1000):
            for eps in (0.01, 0.3, 0.9):
                assert gaussian_approx_rate(n, product_dist, eps) == 0.0

    def test_decreasing_in_eps(self, example_dist):
        rates = [gaussian_approx_rate(50, example_dist, e) for e in (0.05, 0.1, 0.3, 0.45)]
        assert all(a > b for a, b in zip(rates, rates[1:]))


class TestExactAchievabilityBound:
    def test_invalid_small_n_names_condition(self, example_dist):
        report = exact_achievability_bound(400, example_dist, Fraction(1, 100), 0.1)
        assert not report.valid
        assert report.rate is None
        failed = {c.name for c in report.failed_conditions()}
        assert "n >= 4/(pi_u^2*delta)" in failed
        thr = {c.name: c.threshold for c in report.conditions}
        assert thr["n >= 4/(pi_u^2*delta)"] == pytest.approx(3600.0)

    def test_valid_large_n(self, example_dist):
        report = exact_achievability_bound(20000, example_dist, Fraction(1, 10), 0.1)
        assert report.valid
        assert report.rate == pytest.approx(sum(report.terms.values()), abs=1e-15)
        assert report.rate >= gaussian_approx_rate(20000, example_dist, 0.1)
        assert 0.0 < report.q_argument < 0.1

    def test_zero_variance_branch(self, product_dist):
        n = 5000
        report = exact_achievability_bound(n, product_dist, Fraction(1, 10), 0.1)
        assert report.valid
        assert report.terms["dispersion"] == 0.0
        expected = 0.0 + 2 * 5 * math.log2(n + 1) / n + 2 / n
        assert report.rate == pytest.approx(expected, abs=1e-12)

    def test_invalid_inputs_never_raise(self, example_dist):
        report = exact_achievability_bound(100, example_dist, Fraction(1, 10), 1.5)
        assert not report.valid
        assert any(c.name == "eps in (0,1)" and not c.satisfied for c in report.conditions)
        report = exact_achievability_bound(100, example_dist, 2, 0.1)
        assert not report.valid
        assert any(c.name == "delta in (0,1)" and not c.satisfied for c in report.conditions)

    def test_dominates_exact_rate_when_valid(self, example_dist):
        n, delta, eps = 8000, Fraction(1, 10), 0.1
        report = exact_achievability_bound(n, example_dist, delta, eps)
        assert report.valid
        rate, _ = optimal_random_codebook_rate(n, example_dist, delta, eps)
        assert report.rate >= rate

    def test_expansion_shape(self, example_dist):
        # (rate - I - dispersion) * n / log2(n+1) decreases toward the
        # type-counting constant 2(|U||V|+1) = 10 on a doubling sweep.
        prof = info_profile(example_dist)
        values = []
        for n in (10000, 20000, 40000, 80000):
            report = exact_achievability_bound(n, example_dist, Fraction(1, 10), 0.1)
            assert report.valid
            gap = report.rate - prof.mutual_information - report.terms["dispersion"]
            values.append(gap * n / math.log2(n + 1))
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(10.0, abs=0.2)


class TestTypicalityProbBoundCheck:
    def test_precondition_small_n(self, example_dist):
        # 4/(pi_u^2 delta) = 1440 at delta = 1/40
        with pytest.raises(PreconditionError, match="n >= 4"):
            typicality_prob_bound_check(
                TypeVector((0, 1), (27, 13)), example_dist, Fraction(1, 40)
            )

    def test_precondition_atypical_type(self, example_dist):
        with pytest.raises(PreconditionError, match="not typical"):
            typicality_prob_bound_check(
                TypeVector((0, 1), (1000, 1000)), example_dist, Fraction(1, 10)
            )

    def test_holds_at_exact_proportions(self, example_dist):
        lhs, rhs, holds = typicality_prob_bound_check(
            TypeVector((0, 1), (1333, 667)), example_dist, Fraction(1, 10)
        )
        assert holds
        assert lhs <= rhs
        assert lhs > 0

    def test_holds_for_zero_variance(self, product_dist):
        lhs, rhs, holds = typicality_prob_bound_check(
            TypeVector((0, 1), (1000, 1000)), product_dist, Fraction(1, 10)
        )
        assert holds
        assert rhs - lhs >= 0


class TestRateRounding:
    def test_zero_rate(self):
        assert rate_rounding(0.0, 50) == (1, 0.0)

    def test_power_of_two(self):
        m, rate = rate_rounding(0.25, 100)
        assert m == 2**25
        assert rate == 0.25

    def test_generic(self):
        m, rate = rate_rounding(0.2516, 40)
        assert m == 1071
        assert rate == pytest.approx(math.log2(1071) / 40)
        assert rate <= 0.2516 + 2 / 40

    def test_guarantee_random_sweep(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            r = float(rng.uniform(0, 3))
            n = int(rng.integers(1, 300))
            if n * r > 1020:
                continue
            m, rate = rate_rounding(r, n)
            assert rate <= r + 2 / n

    def test_overflow(self):
        with pytest.raises(OverflowError, match="overflow"):
            rate_rounding(2.0, 1000)

    def test_negative(self):
        with pytest.raises(ValueError, match="nonnegative"):
            rate_rounding(-0.1, 10)
