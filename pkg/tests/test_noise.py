"""Tests for jump sampling, deterministic seed streams, stopping times,
and noise truncation."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shelab.levy import ConfigurationError, JumpLaw, LevyMeasureSpec, tail_mass
from shelab.noise import (
    LargeCutoff,
    PointMeasure,
    SimRegion,
    derive_seed,
    make_rng,
    sample_prm,
    tau_fixed,
    tau_weighted,
    truncate_noise,
    truncate_noise_weighted,
)

INTERVAL = SimRegion(T=1.0, domain="interval")
BOX = SimRegion(T=1.0, domain="box", d=2, half_width=1.0)


class TestRegion:
    def test_interval_volume(self):
        assert INTERVAL.volume == pytest.approx(math.pi)
        assert INTERVAL.d == 1

    def test_box_volume(self):
        assert BOX.volume == pytest.approx(4.0)
        assert SimRegion(T=1.0, domain="box", d=3, half_width=2.0).volume == 64.0

    def test_invalid_region(self):
        with pytest.raises(ConfigurationError):
            SimRegion(T=-1.0, domain="interval")
        with pytest.raises(ConfigurationError):
            SimRegion(T=1.0, domain="strip")

    def test_json_round_trip(self):
        assert SimRegion.from_json_dict(BOX.to_json_dict()) == BOX


class TestSeedStreams:
    def test_deterministic(self):
        assert derive_seed(0, "a", 0) == derive_seed(0, "a", 0)

    def test_distinct_across_tags_and_replicas(self):
        seeds = {derive_seed(0, tag, rep) for tag in ("a", "b", "c")
                 for rep in range(50)}
        assert len(seeds) == 150

    def test_rng_reproducible(self):
        a = make_rng(7, "x", 3).standard_normal(5)
        b = make_rng(7, "x", 3).standard_normal(5)
        np.testing.assert_array_equal(a, b)


class TestSamplePrm:
    def test_reproducible_and_sorted(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        pm1 = sample_prm(spec, INTERVAL, eps=0.01, seed=11)
        pm2 = sample_prm(spec, INTERVAL, eps=0.01, seed=11)
        assert pm1 == pm2
        assert np.all(np.diff(pm1.t) > 0)
        assert np.all(np.abs(pm1.z) > 0.01)
        assert np.all((pm1.x >= 0) & (pm1.x <= math.pi))

    def test_count_matches_intensity(self):
        # Poisson(lambda) with lambda = tail_mass * T * |D|
        spec = LevyMeasureSpec.stable(alpha=0.5)
        lam = tail_mass(spec, 0.04) * INTERVAL.T * INTERVAL.volume
        counts = [len(sample_prm(spec, INTERVAL, eps=0.04, rng=make_rng(0, "c", r)))
                  for r in range(400)]
        mean = np.mean(counts)
        assert abs(mean - lam) < 4.0 * math.sqrt(lam / 400)

    def test_infinite_activity_requires_cutoff(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        with pytest.raises(ConfigurationError):
            sample_prm(spec, INTERVAL, eps=0.0)

    def test_finite_activity_allows_zero_cutoff(self):
        spec = LevyMeasureSpec.compound_poisson(2.0, JumpLaw("point", value=1.0))
        pm = sample_prm(spec, INTERVAL, eps=0.0, seed=5)
        assert np.all(pm.z == 1.0)

    def test_stable_mark_distribution(self):
        # P(|Z| > u | |Z| > eps) = (u/eps)^{-alpha}
        spec = LevyMeasureSpec.stable(alpha=1.0)
        pm = sample_prm(spec, INTERVAL, eps=0.5, seed=2)
        frac = np.mean(np.abs(pm.z) > 1.0)
        assert frac == pytest.approx(0.5, abs=4.0 / math.sqrt(len(pm)))

    def test_gamma_marks_positive(self):
        spec = LevyMeasureSpec.gamma(shape=2.0, rate=1.0)
        pm = sample_prm(spec, INTERVAL, eps=0.05, seed=3)
        assert np.all(pm.z > 0.05)

    def test_b_eps_symmetric_zero(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        assert sample_prm(spec, INTERVAL, eps=0.01, seed=0).b_eps == 0.0

    def test_b_eps_one_sided(self):
        # -(integral of z^{-0.5} dz over (eps, 1]) = -2(1 - sqrt(eps))
        spec = LevyMeasureSpec.stable(alpha=0.5, c_plus=1.0, c_minus=0.0)
        pm = sample_prm(spec, INTERVAL, eps=0.25, seed=0)
        assert pm.b_eps == pytest.approx(-1.0, rel=1e-12)
        assert sample_prm(spec, INTERVAL, eps=1.0, seed=0).b_eps == 0.0

    def test_box_positions_inside(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        pm = sample_prm(spec, BOX, eps=0.05, seed=1)
        assert pm.x.shape[1] == 2
        assert np.all(np.abs(pm.x) <= 1.0)

    def test_custom_density_sampling(self):
        spec = LevyMeasureSpec.custom(lambda z: abs(z) ** -1.5)
        ref = LevyMeasureSpec.stable(alpha=0.5)
        pm = sample_prm(spec, INTERVAL, eps=0.04, seed=9)
        pm_ref = sample_prm(ref, INTERVAL, eps=0.04, seed=9)
        assert len(pm) > 0
        # same activity, median magnitude in the same ballpark
        med, med_ref = np.median(np.abs(pm.z)), np.median(np.abs(pm_ref.z))
        assert med == pytest.approx(med_ref, rel=0.25)


class TestPointMeasureIO:
    def _pm(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        return sample_prm(spec, BOX, eps=0.1, seed=13)

    def test_csv_round_trips_doubles(self, tmp_path):
        pm = self._pm()
        csv_path = tmp_path / "jumps.csv"
        side_path = tmp_path / "jumps.json"
        pm.save(csv_path, side_path)
        rows = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
        np.testing.assert_array_equal(rows[:, 0], pm.t)
        np.testing.assert_array_equal(rows[:, 1:3], pm.x)
        np.testing.assert_array_equal(rows[:, 3], pm.z)
        side = json.loads(side_path.read_text())
        assert side["n_jumps"] == len(pm)
        assert side["small_cutoff"] == 0.1

    def test_header_names_dimension(self, tmp_path):
        pm = self._pm()
        assert pm.to_csv().splitlines()[0] == "t,x1,x2,z"


class TestStoppingTimes:
    def _pm(self, z):
        t = np.linspace(0.1, 0.9, len(z))
        x = np.linspace(0.5, 2.5, len(z)).reshape(-1, 1)
        return PointMeasure(t=t, x=x, z=np.asarray(z, dtype=float),
                            small_cutoff=0.0, large_cutoff=LargeCutoff(),
                            b_eps=0.0, seed=0, region=INTERVAL)

    def test_tau_fixed_first_exceedance(self):
        pm = self._pm([0.5, -3.0, 10.0])
        res = tau_fixed(pm, 2.0)
        assert res.tau == pytest.approx(0.5)
        assert res.triggering_jump == 1

    def test_tau_fixed_never(self):
        pm = self._pm([0.5, -0.7])
        assert tau_fixed(pm, 2.0).tau == math.inf

    def test_tau_weighted_uses_position(self):
        # threshold N (1 + |x|^eta): large |x| tolerates larger jumps
        pm = self._pm([2.5, 2.5])
        res = tau_weighted(pm, N=1.0, eta=1.0)
        assert res.triggering_jump == 0  # |x|=0.5 -> threshold 1.5 < 2.5
        assert tau_weighted(pm, N=1.0, eta=2.0).triggering_jump == 0

    def test_tau_weighted_requires_positive_eta(self):
        with pytest.raises(ConfigurationError):
            tau_weighted(self._pm([1.0]), N=1.0, eta=0.0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=1.0, max_value=5.0),
           st.floats(min_value=0.0, max_value=5.0))
    def test_tau_fixed_monotone_in_threshold(self, n, dn):
        pm = self._pm([0.5, -3.0, 10.0, -0.2, 6.0])
        assert tau_fixed(pm, n + dn).tau >= tau_fixed(pm, n).tau


class TestTruncation:
    def test_removes_large_jumps_and_adjusts_drift(self):
        spec = LevyMeasureSpec.stable(alpha=0.5, c_plus=1.0, c_minus=0.0)
        pm = sample_prm(spec, INTERVAL, eps=0.1, seed=21)
        out, b_N = truncate_noise(pm, spec, N=4.0)
        assert np.all(np.abs(out.z) <= 4.0)
        # b_N = b - integral of z^{-0.5} over (1, 4] = -2
        assert b_N == pytest.approx(-2.0, rel=1e-12)
        assert out.large_cutoff.N == 4.0

    def test_restriction_consistency(self):
        # truncating at N then at N' < N equals truncating once at N'
        spec = LevyMeasureSpec.stable(alpha=0.5)
        pm = sample_prm(spec, INTERVAL, eps=0.1, seed=22)
        once, _ = truncate_noise(pm, spec, N=2.0)
        twice, _ = truncate_noise(*truncate_noise(pm, spec, N=5.0)[:1], spec=spec, N=2.0)
        assert once == twice

    def test_agreement_up_to_tau(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        pm = sample_prm(spec, INTERVAL, eps=0.05, seed=23)
        tau = tau_fixed(pm, 3.0).tau
        a, _ = truncate_noise(pm, spec, N=3.0)
        b, _ = truncate_noise(pm, spec, N=4.0)
        keep_a = a.t < tau
        keep_b = b.t < tau
        np.testing.assert_array_equal(a.z[keep_a], b.z[keep_b])

    def test_n_below_one_rejected(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        pm = sample_prm(spec, INTERVAL, eps=0.1, seed=24)
        with pytest.raises(ConfigurationError):
            truncate_noise(pm, spec, N=0.5)

    def test_weighted_truncation(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        pm = sample_prm(spec, BOX, eps=0.1, seed=25)
        out = truncate_noise_weighted(pm, N=1.0, eta=2.0)
        radii = np.linalg.norm(out.x, axis=1)
        assert np.all(np.abs(out.z) <= 1.0 + radii ** 2)
        assert out.large_cutoff.kind == "weighted"
