"""Tests for the noise-measure layer: moments, tails, drift corrections,
and the admissibility check."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shelab.levy import (
    ConfigurationError,
    JumpLaw,
    LevyMeasureSpec,
    blumenthal_getoor_index,
    check_hypothesis_H,
    large_jump_moment,
    measure_density,
    signed_mass,
    small_jump_moment,
    tail_mass,
)

# independent oracle: sum_k (-1)^k / (k! (k + 1/2)) for the gamma
# small-jump moment at p = 1/2, shape = rate = 1
GAMMA_HALF_MOMENT = sum((-1.0) ** k / (math.factorial(k) * (k + 0.5)) for k in range(30))


class TestConstruction:
    def test_stable_defaults(self):
        spec = LevyMeasureSpec.stable(alpha=1.5)
        assert spec.c_plus == 1.0 and spec.c_minus == 1.0 and spec.b == 0.0
        assert spec.symmetric
        assert not spec.finite_activity

    def test_one_sided_not_symmetric(self):
        spec = LevyMeasureSpec.stable(alpha=0.5, c_plus=1.0, c_minus=0.0)
        assert not spec.symmetric

    def test_compound_poisson_is_finite_activity(self):
        spec = LevyMeasureSpec.compound_poisson(2.0, JumpLaw("point", value=1.0))
        assert spec.finite_activity
        assert tail_mass(spec, 0.0) == 2.0

    def test_zero_measure(self):
        spec = LevyMeasureSpec.zero()
        assert spec.finite_activity
        assert tail_mass(spec, 0.0) == 0.0

    def test_invalid_alpha_rejected(self):
        with pytest.raises(ConfigurationError):
            LevyMeasureSpec.stable(alpha=2.5)
        with pytest.raises(ConfigurationError):
            LevyMeasureSpec.stable(alpha=0.0)

    def test_invalid_jump_law(self):
        with pytest.raises(ConfigurationError):
            JumpLaw("lognormal")
        with pytest.raises(ConfigurationError):
            JumpLaw("uniform", low=2.0, high=1.0)

    def test_json_round_trip(self):
        spec = LevyMeasureSpec.tempered_stable(alpha=1.2, lambda_temper=0.7,
                                               c_plus=2.0, c_minus=0.5, b=-0.1)
        assert LevyMeasureSpec.from_json_dict(spec.to_json_dict()) == spec
        cp = LevyMeasureSpec.compound_poisson(
            3.0, JumpLaw("uniform", low=-1.0, high=2.0), b=0.3)
        assert LevyMeasureSpec.from_json_dict(cp.to_json_dict()) == cp


class TestMoments:
    def test_stable_small_moment_closed_form(self):
        # (c+ + c-) / (p - alpha) for p > alpha
        spec = LevyMeasureSpec.stable(alpha=0.5)
        assert small_jump_moment(spec, 1.0) == pytest.approx(4.0, rel=1e-12)
        assert small_jump_moment(spec, 0.5) == math.inf
        assert small_jump_moment(spec, 0.25) == math.inf

    def test_stable_large_moment_closed_form(self):
        # (c+ + c-) / (alpha - q) for q < alpha
        spec = LevyMeasureSpec.stable(alpha=1.5)
        assert large_jump_moment(spec, 0.5) == pytest.approx(2.0, rel=1e-12)
        assert large_jump_moment(spec, 1.5) == math.inf
        assert large_jump_moment(spec, 1.75) == math.inf

    def test_gamma_small_moment_series_oracle(self):
        spec = LevyMeasureSpec.gamma(shape=1.0, rate=1.0)
        assert small_jump_moment(spec, 0.5) == pytest.approx(GAMMA_HALF_MOMENT, rel=1e-9)

    def test_gamma_all_positive_moments_finite(self):
        spec = LevyMeasureSpec.gamma(shape=2.0, rate=3.0)
        for p in (0.1, 0.5, 1.0, 2.0):
            assert math.isfinite(small_jump_moment(spec, p))

    def test_tempered_equals_stable_at_zero_tempering_small(self):
        a = LevyMeasureSpec.stable(alpha=0.8)
        b = LevyMeasureSpec.tempered_stable(alpha=0.8, lambda_temper=1e-12)
        assert small_jump_moment(b, 1.2) == pytest.approx(small_jump_moment(a, 1.2), rel=1e-6)

    def test_compound_poisson_moment_is_weighted_law_moment(self):
        spec = LevyMeasureSpec.compound_poisson(3.0, JumpLaw("point", value=0.5))
        assert small_jump_moment(spec, 2.0) == pytest.approx(3.0 * 0.25, rel=1e-12)
        assert large_jump_moment(spec, 1.0) == 0.0

    def test_custom_density_matches_stable(self):
        spec = LevyMeasureSpec.custom(lambda z: abs(z) ** -1.5)
        ref = LevyMeasureSpec.stable(alpha=0.5)
        assert small_jump_moment(spec, 1.0) == pytest.approx(
            small_jump_moment(ref, 1.0), rel=1e-8)
        assert small_jump_moment(spec, 0.25) == math.inf

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=0.6, max_value=2.0),
           st.floats(min_value=0.0, max_value=1.3))
    def test_small_moment_non_increasing_in_p(self, p, dp):
        # |z|^p <= |z|^{p'} on |z| <= 1 when p >= p'
        spec = LevyMeasureSpec.stable(alpha=0.5)
        lo, hi = small_jump_moment(spec, p + dp), small_jump_moment(spec, p)
        assert lo <= hi or (math.isinf(lo) and math.isinf(hi))


class TestTailsAndDrift:
    def test_stable_tail_mass_closed_form(self):
        spec = LevyMeasureSpec.stable(alpha=0.5, c_plus=1.0, c_minus=1.0)
        # (c+ + c-) u^{-alpha} / alpha
        assert tail_mass(spec, 1.0) == pytest.approx(4.0, rel=1e-12)
        assert tail_mass(spec, 4.0) == pytest.approx(2.0, rel=1e-12)
        assert tail_mass(spec, 0.0) == math.inf

    def test_gamma_tail_mass_exponential_integral(self):
        from scipy.special import exp1
        spec = LevyMeasureSpec.gamma(shape=2.0, rate=3.0)
        assert tail_mass(spec, 0.5) == pytest.approx(2.0 * exp1(1.5), rel=1e-10)

    def test_normal_jump_law_tail(self):
        spec = LevyMeasureSpec.compound_poisson(5.0, JumpLaw("normal", std=1.0))
        assert tail_mass(spec, 0.0) == pytest.approx(5.0)
        assert tail_mass(spec, 1e9) == pytest.approx(0.0, abs=1e-12)

    def test_signed_mass_symmetric_is_zero(self):
        spec = LevyMeasureSpec.stable(alpha=1.5)
        assert signed_mass(spec, 0.1, 1.0) == 0.0

    def test_signed_mass_one_sided_stable(self):
        # integral of z * z^{-1.5} dz over (1, 4] = 2
        spec = LevyMeasureSpec.stable(alpha=0.5, c_plus=1.0, c_minus=0.0)
        assert signed_mass(spec, 1.0, 4.0) == pytest.approx(2.0, rel=1e-12)

    def test_signed_mass_uniform_law(self):
        spec = LevyMeasureSpec.compound_poisson(
            2.0, JumpLaw("uniform", low=0.0, high=2.0))
        # 2 * E[Z 1_{1 < Z <= 2}] = 2 * (1/2) * (4 - 1)/2
        assert signed_mass(spec, 1.0, 2.0) == pytest.approx(1.5, rel=1e-12)

    def test_density_pointwise(self):
        spec = LevyMeasureSpec.stable(alpha=1.0, c_plus=2.0, c_minus=3.0)
        assert measure_density(spec, 0.5) == pytest.approx(2.0 * 0.5 ** -2)
        assert measure_density(spec, -0.5) == pytest.approx(3.0 * 0.5 ** -2)
        gamma = LevyMeasureSpec.gamma(shape=1.0, rate=2.0)
        assert measure_density(gamma, -1.0) == 0.0


class TestBlumenthalGetoor:
    def test_parametric_kinds(self):
        assert blumenthal_getoor_index(LevyMeasureSpec.stable(alpha=1.3)) == 1.3
        assert blumenthal_getoor_index(
            LevyMeasureSpec.tempered_stable(alpha=0.7, lambda_temper=2.0)) == 0.7
        assert blumenthal_getoor_index(LevyMeasureSpec.gamma(1.0, 1.0)) == 0.0
        assert blumenthal_getoor_index(
            LevyMeasureSpec.compound_poisson(1.0, JumpLaw("point", value=1.0))) == 0.0

    def test_custom_density_bisection(self):
        spec = LevyMeasureSpec.custom(lambda z: abs(z) ** -2.2)
        assert blumenthal_getoor_index(spec) == pytest.approx(1.2, abs=5e-2)


class TestHypothesisCheck:
    def test_satisfied_symmetric_stable(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        rep = check_hypothesis_H(spec, d=1, p=0.7, q=0.4)
        assert rep.satisfied
        # (d/q, (2 - d(p-1)) / (p - q))
        assert rep.eta_range[0] == pytest.approx(2.5, rel=1e-12)
        assert rep.eta_range[1] == pytest.approx(2.3 / 0.3, rel=1e-12)
        assert rep.eta_range[0] < rep.eta_range[1]

    def test_satisfied_distinct_p_q(self):
        spec = LevyMeasureSpec.stable(alpha=1.5)
        rep = check_hypothesis_H(spec, d=2, p=1.6, q=1.4)
        assert rep.satisfied
        assert rep.eta_range[0] == pytest.approx(2.0 / 1.4, rel=1e-12)
        assert rep.eta_range[1] == pytest.approx(4.0, rel=1e-12)

    def test_small_jump_moment_failure(self):
        spec = LevyMeasureSpec.stable(alpha=1.5)
        rep = check_hypothesis_H(spec, d=2, p=1.2, q=1.0)
        assert not rep.satisfied
        assert any("small-jump" in r for r in rep.reasons)
        assert rep.eta_range is None

    def test_drift_condition_when_p_below_one(self):
        biased = LevyMeasureSpec.stable(alpha=0.5, c_plus=1.0, c_minus=0.0)
        rep = check_hypothesis_H(biased, d=1, p=0.7, q=0.4)
        assert not rep.satisfied
        assert any("b0" in r for r in rep.reasons)
        # compensating the drift restores admissibility
        fixed = LevyMeasureSpec.stable(alpha=0.5, c_plus=1.0, c_minus=0.0,
                                       b=signed_mass(biased, 0.0, 1.0))
        assert check_hypothesis_H(fixed, d=1, p=0.7, q=0.4).satisfied

    def test_small_jump_failure_high_alpha(self):
        spec = LevyMeasureSpec.stable(alpha=1.9)
        assert not check_hypothesis_H(spec, d=1, p=0.5, q=0.5).satisfied

    def test_p_out_of_range(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        rep = check_hypothesis_H(spec, d=1, p=3.5, q=0.9)
        assert not rep.satisfied

    def test_q_window(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        assert not check_hypothesis_H(spec, d=1, p=0.7, q=0.75).satisfied
        assert not check_hypothesis_H(spec, d=1, p=0.7, q=0.2).satisfied
