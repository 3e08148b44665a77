"""Empirical probes of the sample-path regularity dichotomies.

Almost-sure (un)boundedness is not directly observable, so these studies
use a refinement surrogate: the jump cutoff is tightened and the section
grid refined together across levels, and the median section supremum
across replicas either stays flat (continuity regime) or grows
(unboundedness regime).  The necessary-condition integral and the
translation-invariance test are deterministic/statistical companions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from shelab._accel import kernel_sum_box, kernel_sum_interval
from shelab._parallel import run_replicas
from shelab.levy import ConfigurationError, LevyMeasureSpec, blumenthal_getoor_index
from shelab.noise import SimRegion, make_rng, sample_prm, truncate_noise
from shelab.solver import make_box_sites, make_interval_sites

GAMMA_GROW = 1.5
GAMMA_FLAT = 1.2

_TINY = 1e-300


@dataclass(frozen=True)
class RefinementStatistic:
    """Per-level section statistics across refinement levels."""

    levels: tuple          # grid resolutions, strictly increasing
    eps_values: tuple      # small-jump cutoffs, strictly decreasing
    max_abs: tuple         # median (over replicas) sup of |section|
    osc: tuple             # median max adjacent oscillation
    growth_ratios: tuple   # consecutive max_abs ratios

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ConfigurationError("levels must be strictly increasing")
        if len(self.max_abs) != len(self.levels) or len(self.osc) != len(self.levels):
            raise ConfigurationError("statistic arrays must align with levels")


@dataclass(frozen=True)
class DichotomyVerdict:
    regime: str            # "subcritical" | "supercritical"
    statistic: RefinementStatistic
    decision: str          # "Bounded" | "Growing" | "Inconclusive"
    gamma_grow: float = GAMMA_GROW
    gamma_flat: float = GAMMA_FLAT


def _ratios(max_abs) -> tuple:
    out = []
    for a, b in zip(max_abs, max_abs[1:]):
        if a < _TINY and b < _TINY:
            out.append(1.0)
        elif a < _TINY:
            out.append(math.inf)
        else:
            out.append(b / a)
    return tuple(out)


def _decide(ratios, gamma_grow, gamma_flat) -> str:
    if len(ratios) < 2:
        return "Inconclusive"
    if all(r >= gamma_grow for r in ratios):
        return "Growing"
    if all(r <= gamma_flat for r in ratios):
        return "Bounded"
    return "Inconclusive"


def _check_alpha(spec: LevyMeasureSpec, d: int) -> float:
    bg = blumenthal_getoor_index(spec)
    if bg >= min(1.0 + 2.0 / d, 2.0):
        raise ConfigurationError(
            "activity index outside the regime covered by the dichotomy")
    return bg


def _grid_osc(values: np.ndarray, d: int) -> float:
    """Largest adjacent-site oscillation on a (regular) section grid."""
    if d == 1:
        return float(np.max(np.abs(np.diff(values)))) if values.size > 1 else 0.0
    per_axis = round(values.size ** (1.0 / d))
    grid = values.reshape((per_axis,) * d)
    out = 0.0
    for axis in range(d):
        out = max(out, float(np.max(np.abs(np.diff(grid, axis=axis)))))
    return out


def spatial_refinement_study(spec: LevyMeasureSpec, region: SimRegion,
                             t_fix: float, eps_levels, grid_levels,
                             replicas: int, seed: int,
                             truncate_at: float = 1.0,
                             gamma_grow: float = GAMMA_GROW,
                             gamma_flat: float = GAMMA_FLAT,
                             image_terms: int = 3,
                             threads: int = 1) -> DichotomyVerdict:
    """Refinement study of the spatial sections x -> u(t_fix, x) of the
    additive solution (zero initial data, zero drift).

    Per level the jump cutoff tightens and the section grid refines;
    the verdict compares median sup growth against the thresholds.
    """
    if not 0.0 < t_fix <= region.T:
        raise ConfigurationError("section time must lie in (0, T]")
    eps_levels = tuple(float(e) for e in eps_levels)
    grid_levels = tuple(int(g) for g in grid_levels)
    if len(eps_levels) != len(grid_levels) or len(eps_levels) < 3:
        raise ConfigurationError("need at least three aligned refinement levels")
    if any(b >= a for a, b in zip(eps_levels, eps_levels[1:])):
        raise ConfigurationError("cutoffs must decrease across levels")
    bg = _check_alpha(spec, region.d)
    times = np.asarray([t_fix])

    med_max, med_osc = [], []
    for lvl, (eps, g) in enumerate(zip(eps_levels, grid_levels)):
        if region.domain == "interval":
            sites = make_interval_sites(g)
        else:
            sites = make_box_sites(region.half_width, region.d, g)
        sup_vals = np.empty(replicas)
        osc_vals = np.empty(replicas)
        sites_c = np.ascontiguousarray(sites)

        def one(rep, lvl=lvl, eps=eps, sites_c=sites_c, sup_vals=sup_vals, osc_vals=osc_vals):
            rng = make_rng(seed, f"spatial-L{lvl}", rep)
            pm = sample_prm(spec, region, eps, rng=rng)
            if truncate_at is not None:
                pm, _ = truncate_noise(pm, spec, truncate_at)
            if len(pm) == 0:
                section = np.zeros(sites_c.shape[0])
            elif region.domain == "interval":
                section = kernel_sum_interval(
                    times, sites_c,
                    np.ascontiguousarray(pm.t), np.ascontiguousarray(pm.x[:, 0]),
                    np.ascontiguousarray(pm.z), image_terms)[0]
            else:
                section = kernel_sum_box(
                    times, sites_c,
                    np.ascontiguousarray(pm.t), np.ascontiguousarray(pm.x),
                    np.ascontiguousarray(pm.z))[0]
            sup_vals[rep] = np.max(np.abs(section)) if section.size else 0.0
            osc_vals[rep] = _grid_osc(section, region.d)

        run_replicas(one, replicas, threads)
        med_max.append(float(np.median(sup_vals)))
        med_osc.append(float(np.median(osc_vals)))

    stat = RefinementStatistic(levels=grid_levels, eps_values=eps_levels,
                               max_abs=tuple(med_max), osc=tuple(med_osc),
                               growth_ratios=_ratios(med_max))
    regime = "subcritical" if bg < 2.0 / region.d else "supercritical"
    return DichotomyVerdict(regime=regime, statistic=stat,
                            decision=_decide(stat.growth_ratios, gamma_grow, gamma_flat),
                            gamma_grow=gamma_grow, gamma_flat=gamma_flat)


def temporal_refinement_study(spec: LevyMeasureSpec, region: SimRegion,
                              x_fix: float, eps_levels, dt_levels,
                              replicas: int, seed: int,
                              window: tuple = None,
                              truncate_at: float = 1.0,
                              gamma_grow: float = GAMMA_GROW,
                              gamma_flat: float = GAMMA_FLAT,
                              image_terms: int = 3,
                              threads: int = 1) -> DichotomyVerdict:
    """Refinement study of the temporal sections t -> u(t, x_fix) on the
    interval, with the time step refined alongside the jump cutoff."""
    if region.domain != "interval":
        raise ConfigurationError("the temporal study runs on the interval")
    if not 0.0 < x_fix < math.pi:
        raise ConfigurationError("section site must lie inside the interval")
    eps_levels = tuple(float(e) for e in eps_levels)
    dt_levels = tuple(float(dt) for dt in dt_levels)
    if len(eps_levels) != len(dt_levels) or len(eps_levels) < 3:
        raise ConfigurationError("need at least three aligned refinement levels")
    if any(b >= a for a, b in zip(eps_levels, eps_levels[1:])):
        raise ConfigurationError("cutoffs must decrease across levels")
    bg = _check_alpha(spec, 1)
    if window is None:
        window = (region.T / 2.0, region.T)
    xs = np.asarray([float(x_fix)])

    med_max, med_osc = [], []
    for lvl, (eps, dt) in enumerate(zip(eps_levels, dt_levels)):
        nt = int(round((window[1] - window[0]) / dt)) + 1
        times = np.linspace(window[0], window[1], nt)
        sup_vals = np.empty(replicas)
        osc_vals = np.empty(replicas)
        times_c = np.ascontiguousarray(times)

        def one(rep, lvl=lvl, eps=eps, nt=nt, times_c=times_c,
                sup_vals=sup_vals, osc_vals=osc_vals):
            rng = make_rng(seed, f"temporal-L{lvl}", rep)
            pm = sample_prm(spec, region, eps, rng=rng)
            if truncate_at is not None:
                pm, _ = truncate_noise(pm, spec, truncate_at)
            if len(pm) == 0:
                section = np.zeros(nt)
            else:
                section = kernel_sum_interval(
                    times_c, xs,
                    np.ascontiguousarray(pm.t), np.ascontiguousarray(pm.x[:, 0]),
                    np.ascontiguousarray(pm.z), image_terms)[:, 0]
            sup_vals[rep] = np.max(np.abs(section)) if section.size else 0.0
            osc_vals[rep] = _grid_osc(section, 1)

        run_replicas(one, replicas, threads)
        med_max.append(float(np.median(sup_vals)))
        med_osc.append(float(np.median(osc_vals)))

    levels = tuple(int(round((window[1] - window[0]) / dt)) + 1 for dt in dt_levels)
    stat = RefinementStatistic(levels=levels, eps_values=eps_levels,
                               max_abs=tuple(med_max), osc=tuple(med_osc),
                               growth_ratios=_ratios(med_max))
    regime = "subcritical" if bg < 1.0 else "supercritical"
    return DichotomyVerdict(regime=regime, statistic=stat,
                            decision=_decide(stat.growth_ratios, gamma_grow, gamma_flat),
                            gamma_grow=gamma_grow, gamma_flat=gamma_flat)


# ---------------------------------------------------------------------------
# necessary-condition integral
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivergenceReport:
    alpha: float
    d: int
    cutoffs: tuple
    values: tuple
    log_fit: dict          # I ~ a + b log(1/eps)
    power_fit: dict        # I ~ A eps^c
    preferred: str         # "log" | "power"


def _sphere_area(d: int) -> float:
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _ball_volume(d: int, delta: float) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * delta ** d


def necessary_condition_integral(alpha: float, d: int, ball: tuple, t: float,
                                 inner_cutoffs) -> DivergenceReport:
    """I(eps) = int_eps^t int (sup over the ball of g(tau, x - y))^alpha dy dtau.

    The inner spatial integral splits into the ball itself, where the
    sup equals the on-diagonal kernel value, and the radial tail where
    the sup is attained at the nearest ball point.  The report fits both
    a logarithmic and a power-law divergence model in eps and prefers
    the one with the lower AIC (residuals taken in I-space).
    """
    if not (2.0 / d <= alpha < min(1.0 + 2.0 / d, 2.0)):
        raise ConfigurationError(
            "exponent outside the divergence regime [2/d, min(1 + 2/d, 2))")
    _, delta = ball
    if delta <= 0 or t <= 0:
        raise ConfigurationError("need a positive ball radius and horizon")
    cutoffs = np.sort(np.asarray(inner_cutoffs, dtype=float))
    if cutoffs.size < 3 or cutoffs[0] <= 0 or cutoffs[-1] >= t:
        raise ConfigurationError("need >= 3 cutoffs inside (0, t)")
    vol = _ball_volume(d, delta)
    area = _sphere_area(d)

    def inner(tau: float) -> float:
        on_ball = vol * (4.0 * math.pi * tau) ** (-0.5 * alpha * d)

        def radial(rho):
            g = (4.0 * math.pi * tau) ** (-0.5 * d) * math.exp(-(rho - delta) ** 2 / (4.0 * tau))
            return rho ** (d - 1) * g ** alpha
        hi = delta + 20.0 * math.sqrt(tau / alpha) + 1.0
        tail = area * integrate.quad(radial, delta, hi, limit=200)[0]
        return on_ball + tail

    # integrate the tau profile once on a dense log grid, then reuse the
    # cumulative values for every cutoff
    taus = np.geomspace(cutoffs[0], t, 600)
    profile = np.array([inner(float(tau)) for tau in taus])
    cumulative = integrate.cumulative_trapezoid(profile[::-1], -taus[::-1], initial=0.0)[::-1]
    values = np.interp(cutoffs, taus, cumulative)

    # model 1: I = a + b log(1/eps)
    X = np.log(1.0 / cutoffs)
    A = np.vstack([X, np.ones_like(X)]).T
    sol, *_ = np.linalg.lstsq(A, values, rcond=None)
    pred_log = A @ sol
    rss_log = float(np.sum((values - pred_log) ** 2))
    ss_tot = float(np.sum((values - values.mean()) ** 2))
    log_fit = {"slope": float(sol[0]), "intercept": float(sol[1]),
               "r2": 1.0 - rss_log / ss_tot,
               "aic": cutoffs.size * math.log(max(rss_log, 1e-300) / cutoffs.size) + 4.0}

    # model 2: I = A eps^c  (linear in log-log)
    L = np.vstack([np.log(cutoffs), np.ones_like(X)]).T
    solp, *_ = np.linalg.lstsq(L, np.log(values), rcond=None)
    pred_pow = np.exp(L @ solp)
    rss_pow = float(np.sum((values - pred_pow) ** 2))
    logv = np.log(values)
    ss_tot_l = float(np.sum((logv - logv.mean()) ** 2))
    rss_pow_l = float(np.sum((logv - L @ solp) ** 2))
    power_fit = {"exponent": float(solp[0]), "prefactor": float(math.exp(solp[1])),
                 "r2": 1.0 - rss_pow_l / ss_tot_l,
                 "aic": cutoffs.size * math.log(max(rss_pow, 1e-300) / cutoffs.size) + 4.0}

    preferred = "log" if log_fit["aic"] < power_fit["aic"] else "power"
    return DivergenceReport(alpha=alpha, d=d, cutoffs=tuple(map(float, cutoffs)),
                            values=tuple(map(float, values)), log_fit=log_fit,
                            power_fit=power_fit, preferred=preferred)


# ---------------------------------------------------------------------------
# stationarity test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StationarityReport:
    points: tuple          # base evaluation points
    shifts: tuple
    t_values: tuple
    statistics: tuple      # KS statistics per (t, point, shift)
    p_values: tuple
    bonferroni_alpha: float
    passed: bool


def stationarity_test(spec: LevyMeasureSpec, region: SimRegion, u0_constant: float,
                      shifts, t_values, base_points, replicas: int, seed: int,
                      eps: float = None, alpha_level: float = 0.01,
                      threads: int = 1) -> StationarityReport:
    """Two-sample KS comparison of u(t, x) against u(t, x + a) across
    replicas, for constant initial data on the box.

    Both samples come from the same replicas (positively correlated),
    which makes the test conservative for the translation-invariance
    null.  Points within a quarter half-width of the box edge are
    rejected: the bounding-box truncation biases the law there.
    """
    if region.domain != "box":
        raise ConfigurationError("the stationarity test runs on the box domain")
    margin = region.half_width / 4.0
    pts = np.asarray(base_points, dtype=float).reshape(-1, region.d)
    shifts_arr = np.asarray(shifts, dtype=float).reshape(-1, region.d)
    eval_pts = [pts]
    for a in shifts_arr:
        eval_pts.append(pts + a)
    all_pts = np.vstack(eval_pts)
    if np.any(np.abs(all_pts) > region.half_width - margin):
        raise ConfigurationError(
            "evaluation points must stay a quarter half-width inside the box")
    if eps is None:
        eps = 0.0 if spec.finite_activity else 1e-2

    t_values = tuple(float(t) for t in t_values)
    times = np.ascontiguousarray(np.asarray(t_values))
    nt = times.shape[0]
    npts = all_pts.shape[0]
    samples = np.empty((replicas, nt, npts))
    pts_c = np.ascontiguousarray(all_pts)

    def one(rep):
        rng = make_rng(seed, "stationarity", rep)
        pm = sample_prm(spec, region, eps, rng=rng)
        if len(pm) == 0:
            samples[rep] = u0_constant
            return
        vals = kernel_sum_box(times, pts_c,
                              np.ascontiguousarray(pm.t), np.ascontiguousarray(pm.x),
                              np.ascontiguousarray(pm.z))
        samples[rep] = u0_constant + pm.b_eps * times[:, None] + vals

    run_replicas(one, replicas, threads)

    stats_out, pvals = [], []
    n_base = pts.shape[0]
    for ti in range(nt):
        for si, _a in enumerate(shifts_arr):
            for pi in range(n_base):
                base = samples[:, ti, pi]
                shifted = samples[:, ti, n_base * (si + 1) + pi]
                if np.array_equal(base, shifted):
                    stats_out.append(0.0)
                    pvals.append(1.0)
                    continue
                res = stats.ks_2samp(base, shifted)
                stats_out.append(float(res.statistic))
                pvals.append(float(res.pvalue))
    n_tests = max(len(pvals), 1)
    passed = all(p > alpha_level / n_tests for p in pvals)
    return StationarityReport(points=tuple(map(tuple, pts)),
                              shifts=tuple(map(tuple, shifts_arr)),
                              t_values=t_values, statistics=tuple(stats_out),
                              p_values=tuple(pvals),
                              bonferroni_alpha=alpha_level / n_tests, passed=passed)
