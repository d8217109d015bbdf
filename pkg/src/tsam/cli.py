"""Experiment configuration, orchestration, and CSV output.

Experiments are described by a single JSON file (flags only select the
config path, a seed override, and the output directory). Every run
writes an ``effective_config.json`` capturing all defaults that were
applied, and identical config + seed produces byte-identical trace
CSVs.

Exit codes: 0 success, 2 configuration/validation error, 3 runtime error.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .adaptation import default_config
from .data import (
    ObservationSet,
    generate_synthetic_logistic,
    generate_synthetic_lv,
    load_csv_dataset,
    load_hare_lynx,
    stratified_zero_subsample,
    subsample_zero_indices,
)
from .diagnostics import (
    LOG_POSTERIOR,
    ReplicatedEstimate,
    coverage_experiment,
    edpm,
    mc_estimate_experiment,
)
from .errors import ParseError, TsamError, ValidationError
from .ode import DAYS_PER_YEAR, LVParams, MONTHS_PER_YEAR, SolverGrid
from .samplers import KERNELS, SamplerConfig, Trace, run_chain
from .targets import banana_target, logistic_target, lotka_volterra_target, shifted_t_target

EXPERIMENTS = ("single-run", "mc-estimate", "coverage", "edpm-compare")
TARGET_NAMES = ("shifted-t", "banana", "logistic", "lotka-volterra")


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully validated experiment description (defaults filled)."""

    experiment: str
    output_dir: str
    base_seed: int
    target: dict
    sampler: dict
    experiment_params: dict


@dataclass(frozen=True)
class EdpmComparison:
    projection: str
    edpm_a: float
    edpm_b: float
    redpm: float


# ---------------------------------------------------------------------------
# config loading / validation


def _check_keys(section: dict, allowed, required, where, violations):
    for key in section:
        if key not in allowed:
            violations.append(f"{where}: unknown key {key!r}")
    for key in required:
        if key not in section:
            violations.append(f"{where}: missing required key {key!r}")


def _num(section, key, where, violations, default=None, minimum=None, maximum=None):
    if key not in section:
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        violations.append(f"{where}.{key}: expected a number, got {value!r}")
        return default
    if minimum is not None and value <= minimum:
        violations.append(f"{where}.{key}: must be > {minimum}, got {value}")
    if maximum is not None and value >= maximum:
        violations.append(f"{where}.{key}: must be < {maximum}, got {value}")
    return float(value)


def _int(section, key, where, violations, default=None, minimum=None):
    if key not in section:
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        violations.append(f"{where}.{key}: expected an integer, got {value!r}")
        return default
    if minimum is not None and value < minimum:
        violations.append(f"{where}.{key}: must be >= {minimum}, got {value}")
    return value


def _matrix(section, key, where, violations):
    value = section.get(key)
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        violations.append(f"{where}.{key}: expected a numeric matrix")
        return None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        violations.append(f"{where}.{key}: expected a square matrix, got shape {arr.shape}")
        return None
    return arr.tolist()


def _vector(section, key, where, violations, length=None):
    value = section.get(key)
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        violations.append(f"{where}.{key}: expected a numeric list")
        return None
    if arr.ndim != 1 or (length is not None and arr.shape[0] != length):
        expect = f" of length {length}" if length else ""
        violations.append(f"{where}.{key}: expected a 1-d list{expect}, got shape {arr.shape}")
        return None
    return arr.tolist()


def _validate_target(section, violations) -> dict:
    if not isinstance(section, dict):
        violations.append("target: expected an object")
        return {}
    name = section.get("name")
    if name not in TARGET_NAMES:
        violations.append(f"target.name: expected one of {TARGET_NAMES}, got {name!r}")
        return dict(section)
    out = {"name": name}
    if name == "shifted-t":
        _check_keys(section, {"name", "mu", "sigma", "nu", "truncation_sd"},
                    {"mu", "sigma", "nu"}, "target", violations)
        out["mu"] = _vector(section, "mu", "target", violations) if "mu" in section else None
        out["sigma"] = _matrix(section, "sigma", "target", violations) if "sigma" in section else None
        out["nu"] = _num(section, "nu", "target", violations, minimum=0.0)
        out["truncation_sd"] = _num(section, "truncation_sd", "target", violations, 5.0, minimum=0.0)
    elif name == "banana":
        _check_keys(section, {"name", "mu", "sigma", "a", "b", "truncation_sd"},
                    {"mu", "sigma", "a", "b"}, "target", violations)
        out["mu"] = _vector(section, "mu", "target", violations) if "mu" in section else None
        out["sigma"] = _matrix(section, "sigma", "target", violations) if "sigma" in section else None
        out["a"] = _num(section, "a", "target", violations)
        if out["a"] == 0.0:
            violations.append("target.a: must be nonzero")
        out["b"] = _num(section, "b", "target", violations)
        out["truncation_sd"] = _num(section, "truncation_sd", "target", violations, 5.0, minimum=0.0)
    elif name == "logistic":
        _check_keys(
            section,
            {"name", "csv", "synthetic", "n_subsample", "subsample_seed", "subsample_strategy",
             "prior_scale", "support_halfwidth"},
            {"n_subsample"}, "target", violations)
        has_csv = "csv" in section
        has_synth = "synthetic" in section
        if has_csv == has_synth:
            violations.append("target: exactly one of 'csv' or 'synthetic' is required")
        if has_csv:
            if not isinstance(section["csv"], str):
                violations.append("target.csv: expected a path string")
            out["csv"] = section["csv"]
        if has_synth:
            synth = section["synthetic"]
            if not isinstance(synth, dict):
                violations.append("target.synthetic: expected an object")
                synth = {}
            _check_keys(synth, {"n", "zero_fraction", "beta_true", "seed"},
                        {"n", "beta_true", "seed"}, "target.synthetic", violations)
            zf = synth.get("zero_fraction")
            if zf is not None:
                _num(synth, "zero_fraction", "target.synthetic", violations, minimum=0.0, maximum=1.0)
            out["synthetic"] = {
                "n": _int(synth, "n", "target.synthetic", violations, minimum=1),
                "zero_fraction": zf,
                "beta_true": _vector(synth, "beta_true", "target.synthetic", violations)
                if "beta_true" in synth else None,
                "seed": _int(synth, "seed", "target.synthetic", violations),
            }
        out["n_subsample"] = _int(section, "n_subsample", "target", violations, minimum=1)
        out["subsample_seed"] = _int(section, "subsample_seed", "target", violations, 0)
        out["subsample_strategy"] = section.get("subsample_strategy", "uniform")
        if out["subsample_strategy"] not in ("uniform", "stratified"):
            violations.append(
                "target.subsample_strategy: expected 'uniform' or 'stratified', "
                f"got {out['subsample_strategy']!r}"
            )
        out["prior_scale"] = _num(section, "prior_scale", "target", violations, 100.0, minimum=0.0)
        out["support_halfwidth"] = _num(
            section, "support_halfwidth", "target", violations, 20.0, minimum=0.0)
    else:  # lotka-volterra
        _check_keys(section, {"name", "csv", "synthetic", "fine_step", "coarse_step"},
                    set(), "target", violations)
        if "csv" in section and "synthetic" in section:
            violations.append("target: at most one of 'csv' or 'synthetic' may be given")
        if "csv" in section:
            if not isinstance(section["csv"], str):
                violations.append("target.csv: expected a path string")
            out["csv"] = section["csv"]
        if "synthetic" in section:
            synth = section["synthetic"]
            if not isinstance(synth, dict):
                violations.append("target.synthetic: expected an object")
                synth = {}
            _check_keys(
                synth,
                {"alpha", "beta", "gamma", "delta", "y0", "sigma", "n_years", "seed"},
                {"alpha", "beta", "gamma", "delta", "y0", "sigma", "n_years", "seed"},
                "target.synthetic", violations)
            out["synthetic"] = {
                "alpha": _num(synth, "alpha", "target.synthetic", violations, minimum=0.0),
                "beta": _num(synth, "beta", "target.synthetic", violations, minimum=0.0),
                "gamma": _num(synth, "gamma", "target.synthetic", violations, minimum=0.0),
                "delta": _num(synth, "delta", "target.synthetic", violations, minimum=0.0),
                "y0": _vector(synth, "y0", "target.synthetic", violations, length=2)
                if "y0" in synth else None,
                "sigma": _vector(synth, "sigma", "target.synthetic", violations, length=2)
                if "sigma" in synth else None,
                "n_years": _int(synth, "n_years", "target.synthetic", violations, minimum=1),
                "seed": _int(synth, "seed", "target.synthetic", violations),
            }
        out["fine_step"] = _num(
            section, "fine_step", "target", violations, 1.0 / DAYS_PER_YEAR, minimum=0.0)
        out["coarse_step"] = _num(
            section, "coarse_step", "target", violations, 1.0 / MONTHS_PER_YEAR, minimum=0.0)
    return out


def _validate_sampler(section, violations) -> dict:
    if not isinstance(section, dict):
        violations.append("sampler: expected an object")
        return {}
    _check_keys(section, {"kernel", "n_iters", "burn_in_fraction", "thinning", "seed", "adaptation"},
                {"n_iters"}, "sampler", violations)
    out = {
        "kernel": section.get("kernel", "TSAM"),
        "n_iters": _int(section, "n_iters", "sampler", violations, minimum=1),
        "burn_in_fraction": _num(section, "burn_in_fraction", "sampler", violations, 0.5),
        "thinning": _int(section, "thinning", "sampler", violations, 1, minimum=1),
        "seed": _int(section, "seed", "sampler", violations, 0),
    }
    if out["kernel"] not in KERNELS:
        violations.append(f"sampler.kernel: expected one of {KERNELS}, got {out['kernel']!r}")
    bf = out["burn_in_fraction"]
    if bf is not None and not 0.0 <= bf < 1.0:
        violations.append(f"sampler.burn_in_fraction: must lie in [0, 1), got {bf}")
    adapt = section.get("adaptation", {})
    if not isinstance(adapt, dict):
        violations.append("sampler.adaptation: expected an object")
        adapt = {}
    _check_keys(adapt, {"t0", "k", "s_d", "epsilon", "c0_scale"}, set(),
                "sampler.adaptation", violations)
    out["adaptation"] = {
        "t0": _int(adapt, "t0", "sampler.adaptation", violations, 100, minimum=1),
        "k": _int(adapt, "k", "sampler.adaptation", violations, 1, minimum=1),
        "s_d": _num(adapt, "s_d", "sampler.adaptation", violations, minimum=0.0)
        if adapt.get("s_d") is not None else None,
        "epsilon": _num(adapt, "epsilon", "sampler.adaptation", violations, minimum=0.0)
        if adapt.get("epsilon") is not None else None,
        "c0_scale": _num(adapt, "c0_scale", "sampler.adaptation", violations, 1.0, minimum=0.0),
    }
    return out


def _validate_experiment_params(experiment, section, violations) -> dict:
    if not isinstance(section, dict):
        violations.append("experiment_params: expected an object")
        return {}
    where = "experiment_params"
    if experiment == "single-run":
        _check_keys(section, set(), set(), where, violations)
        return {}
    if experiment == "mc-estimate":
        _check_keys(section, {"m", "n_list", "f_scale", "f_coeff"}, {"m", "n_list"},
                    where, violations)
        return {
            "m": _int(section, "m", where, violations, minimum=2),
            "n_list": _n_list(section, where, violations),
            "f_scale": _num(section, "f_scale", where, violations, 10.0),
            "f_coeff": _num(section, "f_coeff", where, violations, -0.1),
        }
    if experiment == "coverage":
        _check_keys(section, {"m", "n_list", "p"}, {"m", "n_list"}, where, violations)
        return {
            "m": _int(section, "m", where, violations, minimum=2),
            "n_list": _n_list(section, where, violations),
            "p": _num(section, "p", where, violations, 0.683, minimum=0.0, maximum=1.0),
        }
    # edpm-compare
    _check_keys(section, {"kernel_a", "kernel_b", "projections"}, set(), where, violations)
    out = {
        "kernel_a": section.get("kernel_a", "TSAM"),
        "kernel_b": section.get("kernel_b", "AM"),
        "projections": section.get("projections", [LOG_POSTERIOR]),
    }
    for key in ("kernel_a", "kernel_b"):
        if out[key] not in KERNELS:
            violations.append(f"{where}.{key}: expected one of {KERNELS}, got {out[key]!r}")
    if not isinstance(out["projections"], list) or not out["projections"]:
        violations.append(f"{where}.projections: expected a nonempty list")
    else:
        for p in out["projections"]:
            if not (p == LOG_POSTERIOR or (isinstance(p, int) and not isinstance(p, bool) and p >= 0)):
                violations.append(
                    f"{where}.projections: entries must be {LOG_POSTERIOR!r} or a coordinate index"
                )
    return out


def _n_list(section, where, violations):
    value = section.get("n_list")
    if not isinstance(value, list) or not value:
        violations.append(f"{where}.n_list: expected a nonempty list of integers")
        return []
    for n in value:
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            violations.append(f"{where}.n_list: entries must be positive integers, got {n!r}")
    return list(value)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON experiment config, filling defaults.

    Raises :class:`ParseError` for malformed JSON (with line/column) and
    :class:`ValidationError` listing every schema violation found.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(["top level: expected a JSON object"])

    violations = []
    _check_keys(raw, {"experiment", "output_dir", "base_seed", "target", "sampler",
                      "experiment_params"},
                {"target", "sampler"}, "top level", violations)
    experiment = raw.get("experiment", "single-run")
    if experiment not in EXPERIMENTS:
        violations.append(f"experiment: expected one of {EXPERIMENTS}, got {experiment!r}")
        experiment = "single-run"
    output_dir = raw.get("output_dir", "out")
    if not isinstance(output_dir, str):
        violations.append(f"output_dir: expected a string, got {output_dir!r}")
        output_dir = "out"
    target = _validate_target(raw.get("target", {}), violations)
    sampler = _validate_sampler(raw.get("sampler", {}), violations)
    params = _validate_experiment_params(experiment, raw.get("experiment_params", {}), violations)
    base_seed = _int(raw, "base_seed", "top level", violations, sampler.get("seed", 0))
    if experiment == "coverage" and target.get("name") not in (None, "banana"):
        violations.append("experiment 'coverage' requires the banana target")
    if violations:
        raise ValidationError(violations)
    return ExperimentConfig(
        experiment=experiment,
        output_dir=output_dir,
        base_seed=base_seed,
        target=target,
        sampler=sampler,
        experiment_params=params,
    )


# ---------------------------------------------------------------------------
# materialization


def _resolve_path(path_str, config_dir):
    p = Path(path_str)
    return p if p.is_absolute() else Path(config_dir) / p


def build_target(target_cfg: dict, config_dir="."):
    """Construct the target a validated config section describes."""
    name = target_cfg["name"]
    if name == "shifted-t":
        return shifted_t_target(
            np.asarray(target_cfg["mu"]),
            np.asarray(target_cfg["sigma"]),
            target_cfg["nu"],
            target_cfg["truncation_sd"],
        )
    if name == "banana":
        return banana_target(
            np.asarray(target_cfg["mu"]),
            np.asarray(target_cfg["sigma"]),
            target_cfg["a"],
            target_cfg["b"],
            target_cfg["truncation_sd"],
        )
    if name == "logistic":
        if "csv" in target_cfg:
            dataset = load_csv_dataset(_resolve_path(target_cfg["csv"], config_dir), "logistic")
        else:
            synth = target_cfg["synthetic"]
            dataset = generate_synthetic_logistic(
                synth["n"], synth["zero_fraction"], np.asarray(synth["beta_true"]), synth["seed"]
            )
        if target_cfg["subsample_strategy"] == "stratified":
            indices = stratified_zero_subsample(
                dataset.X, dataset.y, target_cfg["n_subsample"], target_cfg["subsample_seed"]
            )
        else:
            indices = subsample_zero_indices(
                dataset.y, target_cfg["n_subsample"], target_cfg["subsample_seed"]
            )
        d = dataset.X.shape[1]
        return logistic_target(
            dataset.X,
            dataset.y,
            indices,
            sigma0=target_cfg["prior_scale"] * np.eye(d),
            support_halfwidth=target_cfg["support_halfwidth"],
        )
    # lotka-volterra
    if "csv" in target_cfg:
        obs = load_csv_dataset(_resolve_path(target_cfg["csv"], config_dir), "lotka-volterra")
    elif "synthetic" in target_cfg:
        synth = target_cfg["synthetic"]
        obs = generate_synthetic_lv(
            LVParams(synth["alpha"], synth["beta"], synth["gamma"], synth["delta"]),
            synth["y0"],
            synth["sigma"],
            synth["n_years"],
            synth["seed"],
        )
    else:
        obs = load_hare_lynx()
    times = tuple(obs.times.tolist())
    fine = SolverGrid(times[0], times[-1], target_cfg["fine_step"], times)
    coarse = SolverGrid(times[0], times[-1], target_cfg["coarse_step"], times)
    return lotka_volterra_target(obs, fine, coarse)


def build_sampler_config(config: ExperimentConfig, target, kernel=None, seed=None) -> SamplerConfig:
    """Materialize the sampler config against a concrete target geometry."""
    s = config.sampler
    a = s["adaptation"]
    adapt = default_config(
        target.d,
        target.support,
        c0_scale=a["c0_scale"],
        t0=a["t0"],
        k=a["k"],
        s_d=a["s_d"],
        epsilon=a["epsilon"],
    )
    return SamplerConfig(
        adaptation=adapt,
        n_iters=s["n_iters"],
        seed=s["seed"] if seed is None else seed,
        kernel=s["kernel"] if kernel is None else kernel,
        burn_in_fraction=s["burn_in_fraction"],
        thinning=s["thinning"],
    )


def effective_config_dict(config: ExperimentConfig, sampler_config: SamplerConfig) -> dict:
    """The config with every applied default materialized (JSON-ready)."""
    sampler = dict(config.sampler)
    sampler["adaptation"] = {
        "t0": sampler_config.adaptation.t0,
        "k": sampler_config.adaptation.k,
        "s_d": sampler_config.adaptation.s_d,
        "epsilon": sampler_config.adaptation.epsilon,
        "c0_scale": config.sampler["adaptation"]["c0_scale"],
    }
    return {
        "experiment": config.experiment,
        "output_dir": config.output_dir,
        "base_seed": config.base_seed,
        "target": dict(config.target),
        "sampler": sampler,
        "experiment_params": dict(config.experiment_params),
    }


# ---------------------------------------------------------------------------
# CSV output


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_trace_csv(trace: Trace, path) -> None:
    """Retained states, one row per kept step, 17-significant-digit reals."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["iter", *(f"x_{j + 1}" for j in range(trace.d)),
             "log_pi", "stage1_accept", "stage2_accept", "expensive_eval"]
        )
        for i in range(trace.n):
            writer.writerow(
                [
                    _fmt(trace.iters[i]),
                    *(_fmt(v) for v in trace.states[i]),
                    _fmt(trace.log_pi_values[i]),
                    _fmt(trace.stage1_accepted[i]),
                    _fmt(trace.stage2_accepted[i]),
                    _fmt(trace.expensive_eval[i]),
                ]
            )


def read_trace_csv(path):
    """Parse a trace CSV back into arrays (exact float round-trip)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    d = len(header) - 5
    iters = np.array([int(r[0]) for r in rows], dtype=np.int64)
    states = np.array([[float(v) for v in r[1 : 1 + d]] for r in rows]).reshape(len(rows), d)
    log_pi = np.array([float(r[1 + d]) for r in rows])
    flags = np.array([[r[2 + d] == "1", r[3 + d] == "1", r[4 + d] == "1"] for r in rows], dtype=bool)
    return iters, states, log_pi, flags.reshape(len(rows), 3)


def write_summary_csv(results, path) -> None:
    """Experiment summary rows; columns depend on the experiment type."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if results and isinstance(results[0], EdpmComparison):
            writer.writerow(["projection", "edpm_a", "edpm_b", "redpm"])
            for row in results:
                writer.writerow(
                    [row.projection, _fmt(row.edpm_a), _fmt(row.edpm_b), _fmt(row.redpm)]
                )
        else:
            writer.writerow(["n", "mean", "sd"])
            for row in results:
                writer.writerow([_fmt(row.n), _fmt(row.mean), _fmt(row.sd)])


# ---------------------------------------------------------------------------
# orchestration


def run_experiment(config: ExperimentConfig, config_dir=".") -> dict:
    """Run the configured experiment; returns a dict of output paths."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = build_target(config.target, config_dir)
    outputs = {}

    sampler_config = build_sampler_config(config, target)
    effective = effective_config_dict(config, sampler_config)
    effective_path = out_dir / "effective_config.json"
    with open(effective_path, "w") as fh:
        json.dump(effective, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs["effective_config"] = effective_path

    params = config.experiment_params
    if config.experiment == "single-run":
        trace = run_chain(target, sampler_config)
        trace_path = out_dir / "trace.csv"
        write_trace_csv(trace, trace_path)
        outputs["trace"] = trace_path
    elif config.experiment == "mc-estimate":
        scale, coeff = params["f_scale"], params["f_coeff"]

        def f(x):
            return scale * math.exp(coeff * float(np.sum(x)))

        base = replace(sampler_config, seed=config.base_seed)
        results = mc_estimate_experiment(target, base, f, params["m"], params["n_list"])
        path = out_dir / "mc_estimate.csv"
        write_summary_csv(results, path)
        outputs["summary"] = path
    elif config.experiment == "coverage":
        base = replace(sampler_config, seed=config.base_seed)
        results = coverage_experiment(target, base, params["p"], params["m"], params["n_list"])
        path = out_dir / "coverage.csv"
        write_summary_csv(results, path)
        outputs["summary"] = path
    else:  # edpm-compare
        trace_a = run_chain(
            target, replace(sampler_config, kernel=params["kernel_a"], seed=config.base_seed)
        )
        trace_b = run_chain(
            target, replace(sampler_config, kernel=params["kernel_b"], seed=config.base_seed)
        )
        rows = []
        for projection in params["projections"]:
            ea = edpm(trace_a, projection)
            eb = edpm(trace_b, projection)
            rows.append(EdpmComparison(str(projection), ea, eb, ea / eb))
        path = out_dir / "edpm_compare.csv"
        write_summary_csv(rows, path)
        outputs["summary"] = path
    return outputs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tsam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="run the experiment described by a JSON config")
    run_parser.add_argument("config", help="path to the experiment config (JSON)")
    run_parser.add_argument("--seed", type=int, default=None, help="override all seeds")
    run_parser.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        sampler = dict(config.sampler)
        sampler["seed"] = args.seed
        config = replace(config, base_seed=args.seed, sampler=sampler)
    if args.out is not None:
        config = replace(config, output_dir=args.out)
    try:
        outputs = run_experiment(config, config_dir=Path(args.config).parent)
    except (TsamError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for kind, path in outputs.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
