"""Acceptance suite: one test per release criterion, each emitting a
pass/fail line on the terminal summary (see conftest.py).

All stochastic criteria run on pinned seeds and replica counts; the
tolerances are part of the release contract and must not be loosened.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy import integrate

from shelab._accel import sine_coeff_frames
from shelab.cli import main as cli_main
from shelab.kernels import (
    SpectralTruncation,
    green_interval,
    green_interval_image,
    heat_kernel,
    mittag_leffler,
)
from shelab.levy import JumpLaw, LevyMeasureSpec
from shelab.noise import (
    LargeCutoff,
    PointMeasure,
    SimRegion,
    sample_prm,
    tau_fixed,
    truncate_noise,
)
from shelab.regularity import (
    necessary_condition_integral,
    spatial_refinement_study,
    stationarity_test,
    temporal_refinement_study,
)
from shelab.sobolev import (
    delta_coeffs,
    divergence_flag,
    hr_norm,
    hr_norm_sq_coeffs,
    sine_coeffs,
    skorohod_modulus,
)
from shelab.solver import (
    InitialCondition,
    SigmaSpec,
    make_interval_sites,
    solve_additive,
    solve_picard,
)

from conftest import record_criterion

INTERVAL = SimRegion(T=1.0, domain="interval")

# frozen oracles (independent partial sums, see the module tests)
GREEN_HALF_PI = 0.39320398984329474
SINGLE_JUMP_VALUE = 0.7864079796865895
DELTA_NORM_SQ = 0.4585758495


def _check(number, description, checks):
    ok = all(checks.values())
    record_criterion(number, description, ok)
    failed = [name for name, good in checks.items() if not good]
    assert ok, f"criterion {number} failed: {failed}"


class TestCriterion1KernelOracles:
    def test_kernel_oracles(self):
        start = time.perf_counter()
        norm_err = 0.0
        for t in (0.1, 1.0):
            val, _ = integrate.quad(lambda x: heat_kernel(t, x, 1), -np.inf, np.inf)
            norm_err = max(norm_err, abs(val - 1.0))

        ck_err = 0.0
        for s in (0.1, 0.5):
            for t in (0.1, 0.5):
                conv, _ = integrate.quad(
                    lambda y: heat_kernel(s, 0.4 - y, 1) * heat_kernel(t, y, 1),
                    -np.inf, np.inf)
                ck_err = max(ck_err, abs(conv - heat_kernel(s + t, 0.4, 1)))

        xs = np.linspace(0.05, math.pi - 0.05, 20)
        ts = np.linspace(0.05, 1.0, 5)
        trunc = SpectralTruncation(K=100)
        cross_err = max(abs(green_interval(t, x, y, trunc)
                            - green_interval_image(t, x, y, terms=10))
                        for t in ts for x in xs for y in xs)
        runtime = time.perf_counter() - start
        _check(1, "kernel oracles (normalization, semigroup, spectral vs image)", {
            "normalization < 1e-8": norm_err < 1e-8,
            "chapman-kolmogorov < 1e-7": ck_err < 1e-7,
            "spectral vs image < 1e-9": cross_err < 1e-9,
            "runtime < 10 s": runtime < 10.0,
        })


class TestCriterion2MittagLeffler:
    def test_identities(self):
        _check(2, "Mittag-Leffler identities", {
            "E_{1,1}(1) = e": abs(mittag_leffler(1, 1, 1.0) - math.e) < 1e-12,
            "E_{2,1}(1) = cosh 1": abs(mittag_leffler(2, 1, 1.0) - math.cosh(1)) < 1e-12,
        })


class TestCriterion3Sobolev:
    def test_sobolev_layer(self):
        cv = sine_coeffs(lambda x: math.sin(x) + math.sin(3 * x), 32)
        parseval_err = abs(float(np.sum(cv.coeffs ** 2)) - math.pi)
        delta = delta_coeffs(math.pi / 2, 1_000_000)
        norm_sq = hr_norm(delta, -1.0) ** 2
        flagged = divergence_flag(delta_coeffs(math.pi / 2, 4096), -0.5)
        _check(3, "Sobolev layer (Parseval, delta norm, divergence flag)", {
            "parseval < 1e-10": parseval_err < 1e-10,
            "delta norm within 1e-3": abs(norm_sq - DELTA_NORM_SQ) < 1e-3,
            "r = -0.5 flag raised": flagged,
        })


class TestCriterion4AdditiveOracle:
    def test_single_jump(self):
        pm = PointMeasure(t=np.array([0.5]), x=np.array([[math.pi / 2]]),
                          z=np.array([2.0]), small_cutoff=0.0,
                          large_cutoff=LargeCutoff(), b_eps=0.0, seed=0,
                          region=INTERVAL)
        sites = make_interval_sites(15)
        fg = solve_additive(pm, InitialCondition.zero(), INTERVAL,
                            np.array([0.25, 1.0]), sites)
        value_err = abs(fg.values[1, 7] - SINGLE_JUMP_VALUE)

        # norm of the atom: right minus left coefficient frame at the jump
        n_max = 100_000
        t = np.array([0.5])
        jt, jx, jw = pm.t, pm.x[:, 0], pm.z
        right = sine_coeff_frames(t, jt, jx, jw, n_max, False)[0]
        left = sine_coeff_frames(t, jt, jx, jw, n_max, True)[0]
        jump_norm = math.sqrt(hr_norm_sq_coeffs(right - left, -1.0))
        expected = 2.0 * hr_norm(delta_coeffs(math.pi / 2, n_max), -1.0)
        _check(4, "additive single-jump oracle and atom size in H_{-1}", {
            "u(1, pi/2) within 1e-6": value_err < 1e-6,
            "atom norm within 1e-3": abs(jump_norm - expected) < 1e-3,
        })


class TestCriterion5Picard:
    def test_picard_contract(self):
        spec = LevyMeasureSpec.stable(alpha=0.5)
        pm = sample_prm(spec, INTERVAL, eps=0.05, seed=42)
        pm_t, _ = truncate_noise(pm, spec, N=1.0)
        sites = make_interval_sites(31)
        times = np.linspace(0.0, 1.0, 21)
        u0 = InitialCondition.zero()

        add = solve_additive(pm_t, u0, INTERVAL, times, sites)
        pic = solve_picard(pm_t, u0, SigmaSpec.constant(1.0), INTERVAL, times, sites)
        constant_ok = np.array_equal(add.values, pic.values)

        tanh = solve_picard(pm_t, InitialCondition.sine_mode(1),
                            SigmaSpec(kind="tanh", scale=1.0), INTERVAL,
                            times, sites, tol=1e-8, max_iters=20)
        tanh_ok = tanh.picard_residual < 1e-8 and tanh.picard_iters <= 20

        pm_full = sample_prm(spec, INTERVAL, eps=0.02, seed=77)
        tau = tau_fixed(pm_full, 2.0).tau
        sig = SigmaSpec(kind="tanh", scale=1.0)
        u2 = solve_picard(truncate_noise(pm_full, spec, 2.0)[0], u0, sig,
                          INTERVAL, times, sites)
        u3 = solve_picard(truncate_noise(pm_full, spec, 3.0)[0], u0, sig,
                          INTERVAL, times, sites)
        mask = times <= tau
        trunc_ok = mask.any() and np.array_equal(u2.values[mask], u3.values[mask])
        _check(5, "Picard solver contract", {
            "constant sigma equals additive bit-exactly": constant_ok,
            "tanh sigma converges (residual < 1e-8, <= 20 iters)": tanh_ok,
            "truncation consistency bit-exact up to tau_N": trunc_ok,
        })


class TestCriterion6Skorohod:
    def test_modulus_slope(self):
        start = time.perf_counter()
        spec = LevyMeasureSpec.compound_poisson(5.0 / math.pi,
                                                JumpLaw("two_point", value=1.0))
        rep = skorohod_modulus(spec, INTERVAL, r=-1.0,
                               h_values=[2.0 ** -k for k in range(4, 10)],
                               replicas=500, seed=7)
        runtime = time.perf_counter() - start
        _check(6, "two-sided modulus slope (500 replicas, seed 7)", {
            "slope > 1.05": rep.slope > 1.05,
            "95% CI excludes 1.0": rep.ci_low > 1.0 or rep.ci_high < 1.0,
            "runtime < 5 min": runtime < 300.0,
        })


class TestCriterion7Dichotomy:
    BOX = SimRegion(T=0.25, domain="box", d=2, half_width=0.5)
    IVAL = SimRegion(T=0.3, domain="interval")
    SEED = 31337
    REPLICAS = 200

    def test_spatial_supercritical_grows(self):
        start = time.perf_counter()
        v = spatial_refinement_study(
            LevyMeasureSpec.stable(alpha=1.5), self.BOX, t_fix=0.25,
            eps_levels=(0.2, 0.05, 0.0125), grid_levels=(13, 25, 49),
            replicas=self.REPLICAS, seed=self.SEED)
        _check(7.1, "refinement dichotomy (4 pinned regimes)", {
            "decision Growing": v.decision == "Growing",
            "runtime < 10 min": time.perf_counter() - start < 600.0,
        })

    def test_spatial_subcritical_bounded(self):
        start = time.perf_counter()
        v = spatial_refinement_study(
            LevyMeasureSpec.stable(alpha=0.5), self.BOX, t_fix=0.25,
            eps_levels=(0.0125, 0.003125, 0.00078125), grid_levels=(25, 49, 97),
            replicas=self.REPLICAS, seed=self.SEED)
        _check(7.2, "refinement dichotomy (4 pinned regimes)", {
            "decision Bounded": v.decision == "Bounded",
            "runtime < 10 min": time.perf_counter() - start < 600.0,
        })

    def test_temporal_supercritical_grows(self):
        start = time.perf_counter()
        v = temporal_refinement_study(
            LevyMeasureSpec.stable(alpha=1.5), self.IVAL, x_fix=math.pi / 2,
            eps_levels=(0.4, 0.1, 0.025), dt_levels=(1e-3, 1e-4, 1e-5),
            replicas=self.REPLICAS, seed=self.SEED)
        _check(7.3, "refinement dichotomy (4 pinned regimes)", {
            "decision Growing": v.decision == "Growing",
            "runtime < 10 min": time.perf_counter() - start < 600.0,
        })

    def test_temporal_subcritical_bounded(self):
        start = time.perf_counter()
        v = temporal_refinement_study(
            LevyMeasureSpec.stable(alpha=0.5), self.IVAL, x_fix=math.pi / 2,
            eps_levels=(0.05, 0.0125, 0.003125),
            dt_levels=(2e-4, 5e-5, 1.25e-5),
            replicas=self.REPLICAS, seed=self.SEED)
        _check(7.4, "refinement dichotomy (4 pinned regimes)", {
            "decision Bounded": v.decision == "Bounded",
            "runtime < 10 min": time.perf_counter() - start < 600.0,
        })


class TestCriterion8NecessaryCondition:
    def test_divergence_models(self):
        cutoffs = np.geomspace(1e-9, 1e-6, 7)
        log_rep = necessary_condition_integral(alpha=1.0, d=2,
                                               ball=((0.0, 0.0), 0.5), t=0.5,
                                               inner_cutoffs=cutoffs)
        pow_rep = necessary_condition_integral(alpha=1.5, d=2,
                                               ball=((0.0, 0.0), 0.5), t=0.5,
                                               inner_cutoffs=cutoffs)
        _check(8, "divergence integral: log at alpha=1, power at alpha=1.5", {
            "log preferred at alpha=1": log_rep.preferred == "log",
            "log fit R^2 > 0.99": log_rep.log_fit["r2"] > 0.99,
            "power preferred at alpha=1.5": pow_rep.preferred == "power",
            "exponent within -0.5 +/- 0.05":
                abs(pow_rep.power_fit["exponent"] + 0.5) < 0.05,
        })


class TestCriterion9Stationarity:
    def test_ks_battery(self):
        box = SimRegion(T=0.5, domain="box", d=2, half_width=2.0)
        rep = stationarity_test(LevyMeasureSpec.stable(alpha=0.8), box,
                                u0_constant=1.0, shifts=[[0.5, 0.0]],
                                t_values=[0.25, 0.5],
                                base_points=[[0.0, 0.0], [-0.4, 0.3]],
                                replicas=2000, seed=31337, alpha_level=0.01)
        _check(9, "translation-invariance KS battery (2000 replicas)", {
            "all adjusted p > 0.01": rep.passed,
        })


class TestCriterion10Determinism:
    def test_thread_count_invariance(self, tmp_path):
        config = {
            "experiment": "spatial_study",
            "levy": {"kind": "stable", "alpha": 1.5},
            "region": {"T": 0.25, "domain": "box", "d": 2, "half_width": 0.5},
            "levels": {"eps": [0.2, 0.05, 0.0125], "grid": [13, 25, 49]},
            "replicas": 200,
            "master_seed": 31337,
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        out1, out2 = tmp_path / "t1", tmp_path / "t4"
        rc1 = cli_main(["run", str(path), "--threads", "1", "--out", str(out1)])
        rc2 = cli_main(["run", str(path), "--threads", "4", "--out", str(out2)])
        same = ((out1 / "study.csv").read_bytes() == (out2 / "study.csv").read_bytes())
        hashes_match = (json.loads((out1 / "report.json").read_text())["config_hash"]
                        == json.loads((out2 / "report.json").read_text())["config_hash"])
        _check(10, "byte-identical CSVs across --threads", {
            "both runs succeed": rc1 == 0 and rc2 == 0,
            "study.csv byte-identical": same,
            "config hashes match": hashes_match,
        })
