"""Experiment orchestration command line.

``shelab run <config.json>`` executes one experiment described by a
schema-validated JSON config and writes a report, CSV payloads and plot
scripts into the output directory; ``shelab validate <config.json>``
checks the config (schema plus admissibility pre-flight) without
sampling any randomness.  Exit codes: 0 success, 2 config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import jsonschema
import numpy as np

import shelab
from shelab._parallel import default_threads
from shelab.kernels import NonConvergenceError
from shelab.levy import ConfigurationError, LevyMeasureSpec, check_hypothesis_H
from shelab.noise import SimRegion, make_rng, sample_prm, truncate_noise
from shelab.regularity import (necessary_condition_integral,
                               spatial_refinement_study, stationarity_test,
                               temporal_refinement_study)
from shelab.sobolev import TUKEY_ALPHA, skorohod_modulus, trajectory_from_field
from shelab.solver import (FieldGrid, InitialCondition, PicardNonConvergence,
                           SigmaSpec, make_box_sites, make_interval_sites,
                           solve_additive, solve_picard)

EXPERIMENTS = ("solve", "trajectory", "skorohod", "spatial_study",
               "temporal_study", "nec_integral", "stationarity",
               "hypothesis_check")

_JUMP_LAW_SCHEMA = {
    "type": "object",
    "properties": {
        "dist": {"enum": ["point", "two_point", "uniform", "symmetric_uniform", "normal"]},
        "value": {"type": "number"},
        "low": {"type": "number"},
        "high": {"type": "number"},
        "std": {"type": "number"},
    },
    "required": ["dist"],
    "additionalProperties": False,
}

_LEVY_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["stable", "tempered_stable", "gamma",
                          "compound_poisson", "zero"]},
        "b": {"type": "number"},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 2},
        "c_plus": {"type": "number", "minimum": 0},
        "c_minus": {"type": "number", "minimum": 0},
        "lambda_temper": {"type": "number", "exclusiveMinimum": 0},
        "shape": {"type": "number", "exclusiveMinimum": 0},
        "rate": {"type": "number", "exclusiveMinimum": 0},
        "total_mass": {"type": "number", "minimum": 0},
        "jump_law": _JUMP_LAW_SCHEMA,
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_REGION_SCHEMA = {
    "type": "object",
    "properties": {
        "T": {"type": "number", "exclusiveMinimum": 0},
        "domain": {"enum": ["interval", "box"]},
        "d": {"type": "integer", "minimum": 1},
        "half_width": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["T", "domain"],
    "additionalProperties": False,
}

_SIGMA_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["constant", "linear", "tanh", "clamp"]},
        "c": {"type": "number"},
        "a": {"type": "number"},
        "scale": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_U0_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["zero", "constant", "sine_mode"]},
        "c": {"type": "number"},
        "mode": {"type": "integer", "minimum": 1},
        "amplitude": {"type": "number"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_PARAMS_SCHEMA = {
    "type": "object",
    "properties": {
        # hypothesis_check / pre-flight
        "d": {"type": "integer", "minimum": 1},
        "p": {"type": "number", "exclusiveMinimum": 0},
        "q": {"type": "number", "exclusiveMinimum": 0},
        # sampling
        "eps": {"type": "number", "minimum": 0},
        "truncate_N": {"type": "number", "minimum": 1},
        "engine": {"enum": ["auto", "gaussian", "spectral", "image"]},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iters": {"type": "integer", "minimum": 1},
        # sections / studies
        "t_fix": {"type": "number"},
        "x_fix": {"type": "number"},
        "window": {"type": "array", "items": {"type": "number"},
                   "minItems": 2, "maxItems": 2},
        "image_terms": {"type": "integer", "minimum": 1},
        "gamma_grow": {"type": "number", "exclusiveMinimum": 1},
        "gamma_flat": {"type": "number", "exclusiveMinimum": 1},
        # skorohod
        "r": {"type": "number"},
        "h_values": {"type": "array", "items": {"type": "number"}},
        "t0": {"type": "number"},
        "n_max": {"type": "integer", "minimum": 1},
        # nec_integral
        "alpha": {"type": "number"},
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "t": {"type": "number", "exclusiveMinimum": 0},
        "cutoffs": {"type": "array", "items": {"type": "number"}},
        # stationarity
        "shifts": {"type": "array"},
        "t_values": {"type": "array", "items": {"type": "number"}},
        "base_points": {"type": "array"},
        "alpha_level": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "levy": _LEVY_SCHEMA,
        "region": _REGION_SCHEMA,
        "sigma": _SIGMA_SCHEMA,
        "u0": _U0_SCHEMA,
        "grids": {
            "type": "object",
            "properties": {
                "n_times": {"type": "integer", "minimum": 1},
                "n_sites": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "r_values": {"type": "array", "items": {"type": "number"}},
        "levels": {
            "type": "object",
            "properties": {
                "eps": {"type": "array", "items": {"type": "number"}},
                "grid": {"type": "array", "items": {"type": "integer"}},
                "dt": {"type": "array", "items": {"type": "number"}},
            },
            "additionalProperties": False,
        },
        "replicas": {"type": "integer", "minimum": 1},
        "master_seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "params": _PARAMS_SCHEMA,
    },
    "required": ["experiment"],
    "additionalProperties": False,
}


class ConfigError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# canonical hashing
# ---------------------------------------------------------------------------

def _canonicalize(obj):
    if isinstance(obj, dict):
        return {str(k): _canonicalize(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [_canonicalize(v) for v in obj]
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return "%.17g" % obj
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_canonicalize(obj), sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    """64-bit digest (16 hex chars) of the canonical config JSON.

    The output directory and master seed are excluded: artifacts are
    traceable to the (config_hash, master_seed) pair.
    """
    basis = {k: v for k, v in config.items()
             if k not in ("output_dir", "master_seed")}
    return hashlib.sha256(canonical_json(basis).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

_DEFAULTS = {"replicas": 1, "master_seed": 0, "output_dir": "shelab_out",
             "params": {}, "r_values": [-1.0]}


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}")
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"schema violation: {exc.message}")
    return config


def resolve_config(config: dict) -> dict:
    out = dict(_DEFAULTS)
    out.update(config)
    return out


def _build_objects(config: dict):
    """Instantiate the typed pieces named in the config (no sampling)."""
    levy = region = sigma = u0 = None
    try:
        if "levy" in config:
            levy = LevyMeasureSpec.from_json_dict(config["levy"])
        if "region" in config:
            region = SimRegion.from_json_dict(config["region"])
        if "sigma" in config:
            sigma = SigmaSpec.from_json_dict(config["sigma"])
        if "u0" in config:
            u0 = InitialCondition.from_json_dict(config["u0"])
    except (ConfigurationError, KeyError) as exc:
        raise ConfigError(str(exc))
    return levy, region, sigma, u0


def preflight(config: dict) -> dict:
    """Admissibility pre-flight: build all typed objects; when moment
    exponents are given for a box-domain run, the whole-space moment and
    drift conditions must hold."""
    resolved = resolve_config(config)
    levy, region, sigma, u0 = _build_objects(resolved)
    report = {"resolved": resolved, "hypothesis": None}
    params = resolved.get("params", {})
    needs_h = (resolved["experiment"] == "hypothesis_check"
               or ("p" in params and "q" in params))
    if needs_h:
        if levy is None:
            raise ConfigError("moment pre-flight requires a noise measure")
        d = params.get("d", region.d if region is not None else 1)
        try:
            rep = check_hypothesis_H(levy, d, params["p"], params["q"])
        except KeyError:
            raise ConfigError("moment pre-flight requires both p and q")
        report["hypothesis"] = {
            "p": rep.p, "q": rep.q, "satisfied": rep.satisfied,
            "small_jump_integral": _json_num(rep.small_jump_integral),
            "large_jump_integral": _json_num(rep.large_jump_integral),
            "b0": _json_num(rep.b0),
            "eta_range": list(rep.eta_range) if rep.eta_range else None,
            "reasons": list(rep.reasons),
        }
        if (resolved["experiment"] != "hypothesis_check" and not rep.satisfied
                and region is not None and region.domain == "box"):
            raise ConfigError(
                "admissibility pre-flight failed: " + "; ".join(rep.reasons))
    return report


def _json_num(x: float):
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return x


# ---------------------------------------------------------------------------
# experiment runners (return payload dict + artifacts {name: text})
# ---------------------------------------------------------------------------

def _field_csv(fg: FieldGrid) -> str:
    coords = fg.site_coords()
    d = coords.shape[1]
    header = "t," + ",".join(f"x{a + 1}" for a in range(d)) + ",u"
    lines = [header]
    for j, t in enumerate(fg.times):
        for s in range(coords.shape[0]):
            cols = [t] + list(coords[s]) + [fg.values[j, s]]
            lines.append(",".join("%.17g" % c for c in cols))
    return "\n".join(lines) + "\n"


def _default_grid(region: SimRegion, grids: dict):
    n_times = grids.get("n_times", 129)
    n_sites = grids.get("n_sites", 65)
    times = np.linspace(0.0, region.T, n_times)
    if region.domain == "interval":
        sites = make_interval_sites(n_sites)
    else:
        sites = make_box_sites(region.half_width, region.d, n_sites)
    return times, sites


def _solve_one(levy, region, sigma, u0, params, seed, replica):
    rng = make_rng(seed, "solve", replica)
    eps = params.get("eps", 0.0 if levy.finite_activity else 1e-2)
    pm = sample_prm(levy, region, eps, rng=rng)
    b = levy.b
    if "truncate_N" in params:
        pm, b = truncate_noise(pm, levy, params["truncate_N"])
    return pm, b


def run_solve(config, threads):
    levy, region, sigma, u0 = _build_objects(config)
    if levy is None or region is None:
        raise ConfigError("solve requires levy and region sections")
    sigma = sigma or SigmaSpec.constant(1.0)
    u0 = u0 or InitialCondition.zero()
    params = config["params"]
    times, sites = _default_grid(region, config.get("grids", {}))
    engine = params.get("engine", "auto")
    replicas = config["replicas"]
    artifacts = {}
    residuals = []
    for rep in range(replicas):
        pm, b = _solve_one(levy, region, sigma, u0, params,
                           config["master_seed"], rep)
        if sigma.is_constant and sigma.c == 1.0:
            fg = solve_additive(pm, u0, region, times, sites, engine=engine, b=b)
        else:
            fg = solve_picard(pm, u0, sigma, region, times, sites, engine=engine,
                              b=b, tol=params.get("tol", 1e-8),
                              max_iters=params.get("max_iters", 50))
        artifacts[f"field_{rep:03d}.csv"] = _field_csv(fg)
        residuals.append(fg.picard_residual)
    payload = {"replicas": replicas, "n_times": len(times),
               "n_sites": int(np.asarray(sites).shape[0]),
               "picard_residuals": residuals}
    return payload, artifacts


def run_trajectory(config, threads):
    levy, region, sigma, u0 = _build_objects(config)
    if levy is None or region is None:
        raise ConfigError("trajectory requires levy and region sections")
    sigma = sigma or SigmaSpec.constant(1.0)
    u0 = u0 or InitialCondition.zero()
    params = config["params"]
    times, sites = _default_grid(region, config.get("grids", {}))
    pm, b = _solve_one(levy, region, sigma, u0, params, config["master_seed"], 0)
    if sigma.is_constant and sigma.c == 1.0:
        fg = solve_additive(pm, u0, region, times, sites,
                            engine=params.get("engine", "auto"), b=b)
    else:
        fg = solve_picard(pm, u0, sigma, region, times, sites,
                          engine=params.get("engine", "auto"), b=b,
                          tol=params.get("tol", 1e-8),
                          max_iters=params.get("max_iters", 50))
    artifacts = {}
    payload = {"r_values": config["r_values"], "norm_flags": {},
               "window_surrogate": (f"tukey{TUKEY_ALPHA:g}"
                                    if region.domain == "box" else None)}
    for r in config["r_values"]:
        traj = trajectory_from_field(fg, r, n_max=params.get("n_max", 4096))
        artifacts[f"trajectory_r{r:g}.csv"] = traj.to_csv()
        payload["norm_flags"][f"{r:g}"] = {"divergent": traj.divergent,
                                           "method": traj.method}
        artifacts[f"jumps_r{r:g}.json"] = json.dumps(
            {"annotations": traj.jump_annotations}, indent=2, sort_keys=True)
    return payload, artifacts


def run_skorohod(config, threads):
    levy, region, _sigma, _u0 = _build_objects(config)
    if levy is None or region is None:
        raise ConfigError("skorohod requires levy and region sections")
    params = config["params"]
    h_values = params.get("h_values", [2.0 ** -k for k in range(4, 10)])
    rep = skorohod_modulus(levy, region, params.get("r", -1.0), h_values,
                           config["replicas"], config["master_seed"],
                           t0=params.get("t0"), n_max=params.get("n_max", 1024),
                           threads=threads)
    lines = ["h,modulus"]
    for h, m in zip(rep.h_values, rep.moduli):
        lines.append("%.17g,%.17g" % (h, m))
    artifacts = {"modulus.csv": "\n".join(lines) + "\n",
                 "modulus.gp": _gnuplot_loglog("modulus.csv", "h", "modulus")}
    payload = {"slope": _json_num(rep.slope), "intercept": _json_num(rep.intercept),
               "ci": [_json_num(rep.ci_low), _json_num(rep.ci_high)],
               "replicas": rep.replicas, "warnings": list(rep.warnings)}
    return payload, artifacts


def _verdict_payload(v):
    s = v.statistic
    return {"regime": v.regime, "decision": v.decision,
            "gamma_grow": v.gamma_grow, "gamma_flat": v.gamma_flat,
            "levels": list(s.levels), "eps": list(s.eps_values),
            "max_abs": list(s.max_abs), "osc": list(s.osc),
            "growth_ratios": [_json_num(r) for r in s.growth_ratios]}


def _study_csv(v):
    s = v.statistic
    lines = ["level,eps,max_abs,osc"]
    for i in range(len(s.levels)):
        lines.append("%d,%.17g,%.17g,%.17g" % (s.levels[i], s.eps_values[i],
                                               s.max_abs[i], s.osc[i]))
    return "\n".join(lines) + "\n"


def run_spatial_study(config, threads):
    levy, region, _sigma, _u0 = _build_objects(config)
    if levy is None or region is None:
        raise ConfigError("the study requires levy and region sections")
    params = config["params"]
    levels = config.get("levels", {})
    if "eps" not in levels or "grid" not in levels:
        raise ConfigError("spatial study requires levels.eps and levels.grid")
    try:
        v = spatial_refinement_study(
            levy, region, params.get("t_fix", region.T), levels["eps"],
            levels["grid"], config["replicas"], config["master_seed"],
            truncate_at=params.get("truncate_N", 1.0),
            gamma_grow=params.get("gamma_grow", 1.5),
            gamma_flat=params.get("gamma_flat", 1.2),
            image_terms=params.get("image_terms", 3), threads=threads)
    except ConfigurationError as exc:
        raise ConfigError(str(exc))
    return _verdict_payload(v), {"study.csv": _study_csv(v),
                                 "study.gp": _gnuplot_loglog("study.csv", "eps", "max_abs", using="2:3")}


def run_temporal_study(config, threads):
    levy, region, _sigma, _u0 = _build_objects(config)
    if levy is None or region is None:
        raise ConfigError("the study requires levy and region sections")
    params = config["params"]
    levels = config.get("levels", {})
    if "eps" not in levels or "dt" not in levels:
        raise ConfigError("temporal study requires levels.eps and levels.dt")
    try:
        v = temporal_refinement_study(
            levy, region, params.get("x_fix", math.pi / 2), levels["eps"],
            levels["dt"], config["replicas"], config["master_seed"],
            window=tuple(params["window"]) if "window" in params else None,
            truncate_at=params.get("truncate_N", 1.0),
            gamma_grow=params.get("gamma_grow", 1.5),
            gamma_flat=params.get("gamma_flat", 1.2),
            image_terms=params.get("image_terms", 3), threads=threads)
    except ConfigurationError as exc:
        raise ConfigError(str(exc))
    return _verdict_payload(v), {"study.csv": _study_csv(v),
                                 "study.gp": _gnuplot_loglog("study.csv", "eps", "max_abs", using="2:3")}


def run_nec_integral(config, threads):
    params = config["params"]
    for key in ("alpha", "d", "t", "cutoffs"):
        if key not in params:
            raise ConfigError(f"nec_integral requires params.{key}")
    try:
        rep = necessary_condition_integral(
            params["alpha"], params["d"], (0.0, params.get("delta", 0.5)),
            params["t"], params["cutoffs"])
    except ConfigurationError as exc:
        raise ConfigError(str(exc))
    lines = ["eps,integral"]
    for e, v in zip(rep.cutoffs, rep.values):
        lines.append("%.17g,%.17g" % (e, v))
    payload = {"alpha": rep.alpha, "d": rep.d, "log_fit": rep.log_fit,
               "power_fit": rep.power_fit, "preferred": rep.preferred}
    return payload, {"integral.csv": "\n".join(lines) + "\n",
                     "integral.gp": _gnuplot_loglog("integral.csv", "eps", "I")}


def run_stationarity(config, threads):
    levy, region, _sigma, u0 = _build_objects(config)
    if levy is None or region is None:
        raise ConfigError("stationarity requires levy and region sections")
    if u0 is None or u0.kind != "constant":
        raise ConfigError("the stationarity test requires constant initial data")
    params = config["params"]
    for key in ("shifts", "t_values", "base_points"):
        if key not in params:
            raise ConfigError(f"stationarity requires params.{key}")
    try:
        rep = stationarity_test(levy, region, u0.c, params["shifts"],
                                params["t_values"], params["base_points"],
                                config["replicas"], config["master_seed"],
                                eps=params.get("eps"),
                                alpha_level=params.get("alpha_level", 0.01),
                                threads=threads)
    except ConfigurationError as exc:
        raise ConfigError(str(exc))
    lines = ["index,statistic,p_value"]
    for i, (s, p) in enumerate(zip(rep.statistics, rep.p_values)):
        lines.append("%d,%.17g,%.17g" % (i, s, p))
    payload = {"passed": rep.passed, "bonferroni_alpha": rep.bonferroni_alpha,
               "n_tests": len(rep.p_values),
               "min_p": min(rep.p_values) if rep.p_values else None}
    return payload, {"ks_battery.csv": "\n".join(lines) + "\n"}


def run_hypothesis_check(config, threads):
    report = preflight(config)
    if report["hypothesis"] is None:
        raise ConfigError("hypothesis_check requires params.p and params.q")
    return report["hypothesis"], {}


_RUNNERS = {
    "solve": run_solve,
    "trajectory": run_trajectory,
    "skorohod": run_skorohod,
    "spatial_study": run_spatial_study,
    "temporal_study": run_temporal_study,
    "nec_integral": run_nec_integral,
    "stationarity": run_stationarity,
    "hypothesis_check": run_hypothesis_check,
}


def _gnuplot_loglog(csv_name, xlabel, ylabel, using="1:2"):
    return (f"set datafile separator ','\n"
            f"set logscale xy\n"
            f"set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"
            f"plot '{csv_name}' every ::1 using {using} with linespoints\n")


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def _write_errors(out_dir, message, code):
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "errors.json"), "w") as fh:
            json.dump({"error": message, "exit_code": code}, fh, indent=2,
                      sort_keys=True)
    except OSError:
        pass


def cmd_run(args) -> int:
    out_dir = args.out or "shelab_out"
    try:
        config = load_config(args.config)
        config = resolve_config(config)
        if args.seed is not None:
            config["master_seed"] = args.seed
        if args.out:
            config["output_dir"] = args.out
        out_dir = config["output_dir"]
        preflight(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        _write_errors(out_dir, str(exc), 2)
        return 2

    threads = args.threads if args.threads else default_threads()
    chash = config_hash(config)
    start = time.perf_counter()
    try:
        payload, artifacts = _RUNNERS[config["experiment"]](config, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        _write_errors(out_dir, str(exc), 2)
        return 2
    except (PicardNonConvergence, NonConvergenceError, ConfigurationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        _write_errors(out_dir, str(exc), 3)
        return 3
    wall = time.perf_counter() - start

    report = {"config_hash": chash, "tool_version": shelab.__version__,
              "experiment": config["experiment"], "master_seed": config["master_seed"],
              "wall_time": round(wall, 3), "payload": payload, "warnings": []}
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    for name, text in artifacts.items():
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(text)
    print(f"{config['experiment']}: ok (hash {chash}, {wall:.2f}s, "
          f"{len(artifacts)} artifacts in {out_dir})")
    return 0


def cmd_validate(args) -> int:
    try:
        config = load_config(args.config)
        report = preflight(config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    echo = {"resolved": report["resolved"],
            "config_hash": config_hash(resolve_config(config)),
            "hypothesis": report["hypothesis"]}
    print(json.dumps(echo, indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shelab",
        description="Simulation laboratory for the stochastic heat equation "
                    "driven by Levy space-time white noise")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--threads", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config master seed")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.set_defaults(fn=cmd_run)
    p_val = sub.add_parser("validate", help="schema + pre-flight, no computation")
    p_val.add_argument("config")
    p_val.set_defaults(fn=cmd_validate)
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
