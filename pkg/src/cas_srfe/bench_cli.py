"""Experiment runner CLI: adaptive-vs-baseline benchmark over many trials.

Subcommands:
  run <config.json>      full experiment, writes results.json + curves.csv
  mh-diag <config.json>  sampler diagnostics only (chain trace, tuning batches)
  list-targets           registered target names
  validate <config.json> config check, no work

A config JSON names a target, a sample schedule, and the solver/sampler knobs;
everything not given falls back to the target registry defaults. The master
seed fully determines all outputs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys
import time
import traceback
from dataclasses import dataclass

import numpy as np

from . import cas as cas_mod
from .cas import CasConfig, geometric_stats, run_cas, run_nas
from .features import gaussian_frequency_measure, generate_features
from .measures import Measure
from .mh_sampler import MHConfig, mh_sample, tune_sigma1
from .targets import get_target, list_targets


class ConfigError(ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


class RunFailure(RuntimeError):
    pass


def parse_schedule(value):
    """Accept [100, 200, ...] or an inclusive 'start:step:stop' string."""
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError("schedule", "string form must be 'start:step:stop'")
        start, step, stop = (int(p) for p in parts)
        if step <= 0:
            raise ConfigError("schedule", "step must be positive")
        sched = list(range(start, stop + 1, step))
    else:
        sched = [int(m) for m in value]
    if not sched or any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 1:
        raise ConfigError("schedule", "must be nonempty, positive and strictly increasing")
    return sched


def normalize_config(raw):
    """Fill defaults from the target registry and validate every field.

    Returns a plain dict (JSON-serializable and picklable) echoed verbatim
    into results.json.
    """
    if "target" not in raw:
        raise ConfigError("target", "is required")
    try:
        spec = get_target(raw["target"], dim=raw.get("dim"))
    except ValueError as exc:
        raise ConfigError("target", str(exc)) from None
    if "schedule" not in raw:
        raise ConfigError("schedule", "is required")
    schedule = parse_schedule(raw["schedule"])

    measure_spec = raw.get("measure", spec.measure.to_spec())
    try:
        measure = Measure.from_spec(measure_spec)
    except ValueError as exc:
        raise ConfigError("measure", str(exc)) from None
    if measure.dim != spec.dim:
        raise ConfigError("measure", f"dimension {measure.dim} != target dimension {spec.dim}")

    sigma_w = raw.get("sigma_w", list(spec.sigma_w))
    sigma_arr = np.atleast_1d(np.asarray(sigma_w, dtype=float))
    if sigma_arr.shape not in ((1,), (spec.dim,)) or np.any(sigma_arr <= 0):
        raise ConfigError("sigma_w", "must be a positive scalar or length-d vector")

    n_features = int(raw.get("N", spec.default_n_features))
    if n_features < schedule[-1]:
        raise ConfigError("N", f"must be >= the largest schedule entry {schedule[-1]}")

    trials = int(raw.get("trials", 30))
    if trials < 1:
        raise ConfigError("trials", "must be >= 1")

    solver = raw.get("solver", "htp")
    if solver not in ("omp", "htp"):
        raise ConfigError("solver", f"must be 'omp' or 'htp', got {solver!r}")

    divisor = int(raw.get("sparsity_divisor", 4))
    if divisor < 2 or schedule[0] // divisor < 1:
        raise ConfigError("sparsity_divisor", "must leave 0 < s < m at every m")

    mh_raw = dict(raw.get("mh", {}))
    x0 = mh_raw.get("x0", list(spec.x0))
    x0_arr = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0_arr.shape == (1,) and spec.dim > 1:
        x0_arr = np.full(spec.dim, x0_arr[0])
    if x0_arr.shape != (spec.dim,):
        raise ConfigError("mh.x0", f"must have length {spec.dim}")
    mh = {
        "sigma1_init": float(mh_raw.get("sigma1_init", 5.0)),
        "burn_in": int(mh_raw.get("burn_in", 5000)),
        "thinning": int(mh_raw.get("thinning", 15)),
        "x0": x0_arr.tolist(),
    }
    if mh["sigma1_init"] <= 0:
        raise ConfigError("mh.sigma1_init", "must be positive")
    if mh["burn_in"] < 0:
        raise ConfigError("mh.burn_in", "must be nonnegative")
    if mh["thinning"] < 1:
        raise ConfigError("mh.thinning", "must be >= 1")

    htp_raw = dict(raw.get("htp", {}))
    htp = {"max_iter": int(htp_raw.get("max_iter", 100)),
           "tol": float(htp_raw.get("tol", 1e-12))}
    if htp["max_iter"] < 1:
        raise ConfigError("htp.max_iter", "must be >= 1")

    eig_tol = float(raw.get("eig_tol", 1e-10))
    if eig_tol <= 0:
        raise ConfigError("eig_tol", "must be positive")

    n_test = int(raw.get("n_test", 10000))
    if n_test < 1:
        raise ConfigError("n_test", "must be >= 1")

    return {
        "target": spec.name,
        "dim": spec.dim,
        "measure": measure_spec,
        "sigma_w": sigma_arr.tolist(),
        "N": n_features,
        "schedule": schedule,
        "trials": trials,
        "solver": solver,
        "sparsity_divisor": divisor,
        "boosting": int(raw.get("boosting", 5)),
        "eig_tol": eig_tol,
        "reweight": bool(raw.get("reweight", True)),
        "n_test": n_test,
        "mh": mh,
        "htp": htp,
        "seed": int(raw.get("seed", 0)),
        "out": raw.get("out", "results"),
        "mh_total": int(raw.get("mh_total", 5000)),
        "diag_support": int(raw.get("diag_support", 100)),
    }


def _trial_rngs(seed, trial):
    """Disjoint deterministic streams: features, test, adaptive arm, baseline arm."""
    return {name: np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, k)))
            for k, name in enumerate(("features", "test", "cas", "nas"))}


def run_trial(config, trial):
    """One independent trial; both arms share features and test points."""
    spec = get_target(config["target"])
    if spec.dim != config["dim"]:
        spec = get_target(config["target"], dim=config["dim"])
    measure = Measure.from_spec(config["measure"])
    rngs = _trial_rngs(config["seed"], trial)

    gamma = gaussian_frequency_measure(np.asarray(config["sigma_w"]), config["dim"])
    features = generate_features(gamma, config["N"], rngs["features"])
    test_points = measure.sample(config["n_test"], rngs["test"])
    test_values = np.array([spec.evaluate(x) for x in test_points])

    divisor = config["sparsity_divisor"]
    cas_config = CasConfig(
        schedule=tuple(config["schedule"]),
        solver=config["solver"],
        boosting_count=config["boosting"],
        eig_tol=config["eig_tol"],
        sparsity_rule=lambda m: m // divisor,
        htp_max_iter=config["htp"]["max_iter"],
        htp_tol=config["htp"]["tol"],
        sigma1_init=config["mh"]["sigma1_init"],
        burn_in=config["mh"]["burn_in"],
        thinning=config["mh"]["thinning"],
        x0=tuple(config["mh"]["x0"]),
        reweight=config["reweight"],
        n_test=config["n_test"],
    )
    cas_records = run_cas(spec.evaluate, measure, features, cas_config, rngs["cas"],
                          test_points=test_points, test_values=test_values)
    nas_records = run_nas(spec.evaluate, measure, features, config["schedule"],
                          config["solver"], rngs["nas"],
                          htp_max_iter=config["htp"]["max_iter"],
                          htp_tol=config["htp"]["tol"],
                          sparsity_rule=lambda m: m // divisor,
                          test_points=test_points, test_values=test_values)
    def nested(records):
        return bool(all(np.array_equal(nxt.samples[:prev.sample_count], prev.samples)
                        for prev, nxt in zip(records, records[1:])))

    return {
        "trial": trial,
        "cas": {
            "errors": [r.relative_error for r in cas_records],
            "samples_nested": nested(cas_records),
            "effective_dims": [r.effective_dim for r in cas_records],
            "best_stabilities": [r.best_stability for r in cas_records],
            "candidate_stabilities": [r.candidate_stabilities for r in cas_records],
            "mh_acceptance": [r.mh_acceptance for r in cas_records],
        },
        "nas": {"errors": [r.relative_error for r in nas_records],
                "samples_nested": nested(nas_records)},
    }


def run_experiment(config, jobs=None):
    """All trials; aggregates geometric statistics per arm and sample count."""
    trials = config["trials"]
    if jobs is None:
        jobs = int(os.environ.get("CAS_SRFE_JOBS", 0)) or (os.cpu_count() or 1)
    started = time.monotonic()

    results = {}
    failures = {}
    if jobs > 1 and trials > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(run_trial, config, t): t for t in range(trials)}
            for fut in concurrent.futures.as_completed(futures):
                t = futures[fut]
                try:
                    results[t] = fut.result()
                except Exception:
                    failures[t] = traceback.format_exc()
    else:
        for t in range(trials):
            try:
                results[t] = run_trial(config, t)
            except Exception:
                failures[t] = traceback.format_exc()

    if failures:
        for t in sorted(failures):
            print(f"warning: trial {t} failed:\n{failures[t]}", file=sys.stderr)
    if len(failures) > 0.2 * trials:
        raise RunFailure(f"{len(failures)}/{trials} trials failed")

    ok = [results[t] for t in sorted(results)]
    schedule = config["schedule"]
    aggregates = []
    for arm in ("cas", "nas"):
        for j, m in enumerate(schedule):
            errs = [tr[arm]["errors"][j] for tr in ok]
            gmean, gstd = geometric_stats(errs)
            aggregates.append({"arm": arm, "m": m, "geo_mean_error": gmean,
                               "geo_std_error": gstd, "raw_errors": errs})
    return {
        # "out" is a filesystem path, not part of the experiment; dropping it
        # keeps results.json byte-identical across output directories.
        "config": {k: v for k, v in config.items() if k != "out"},
        "seed_scheme": "SeedSequence(seed, spawn_key=(trial, k)) with "
                       "k=0 features, 1 test, 2 adaptive arm, 3 baseline arm",
        "trial_results": ok,
        "failed_trials": sorted(failures),
        "aggregates": aggregates,
    }, time.monotonic() - started


def _atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit_results(result, outdir, elapsed=None):
    os.makedirs(outdir, exist_ok=True)
    _atomic_write(os.path.join(outdir, "results.json"),
                  json.dumps(result, indent=2, sort_keys=True) + "\n")
    lines = ["arm,m,geo_mean_error,geo_std_error"]
    for row in result["aggregates"]:
        lines.append(f"{row['arm']},{row['m']},{row['geo_mean_error']!r},{row['geo_std_error']!r}")
    _atomic_write(os.path.join(outdir, "curves.csv"), "\n".join(lines) + "\n")
    if elapsed is not None:
        # Kept out of results.json so reruns with the same seed are
        # byte-identical.
        _atomic_write(os.path.join(outdir, "timings.json"),
                      json.dumps({"wall_clock_seconds": elapsed}) + "\n")


def run_mh_diagnostics(config, outdir):
    """Sampler-only diagnostics: tuning batches, chain trace, kept samples."""
    from .christoffel import build_basis

    measure = Measure.from_spec(config["measure"])
    rngs = _trial_rngs(config["seed"], 0)
    gamma = gaussian_frequency_measure(np.asarray(config["sigma_w"]), config["dim"])
    features = generate_features(gamma, config["N"], rngs["features"])
    support = np.arange(min(config["diag_support"], config["N"]))
    basis = build_basis(measure, features, support, config["eig_tol"])

    x0 = np.asarray(config["mh"]["x0"], dtype=float)
    mask = measure.proposal_mask()
    mask = mask if np.any(mask == 0.0) else None
    history = []
    sigma1 = tune_sigma1(basis.cs_density, config["mh"]["sigma1_init"], x0,
                         config["mh"]["burn_in"], config["mh"]["thinning"],
                         rngs["cas"], proposal_mask=mask, history=history)
    mh_config = MHConfig(sigma1=sigma1, x0=x0, burn_in=config["mh"]["burn_in"],
                         thinning=config["mh"]["thinning"], proposal_mask=mask)
    result = mh_sample(basis.cs_density, mh_config, config["mh_total"], rngs["cas"],
                       record_trace=True)

    diag_dir = os.path.join(outdir, "mh_diag")
    os.makedirs(diag_dir, exist_ok=True)
    coords = [f"x{k + 1}" for k in range(config["dim"])]
    with open(os.path.join(diag_dir, "tuning.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["batch", "sigma1", "acceptance_rate"])
        for rec in history:
            writer.writerow([rec.batch, repr(rec.sigma1), repr(rec.acceptance_rate)])
    with open(os.path.join(diag_dir, "trace.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step"] + coords)
        for i, state in enumerate(result.trace):
            writer.writerow([i + 1] + [repr(v) for v in state])
    with open(os.path.join(diag_dir, "kept.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(coords)
        for state in result.samples:
            writer.writerow([repr(v) for v in state])
    print(f"tuned sigma1 = {sigma1:.6g}, acceptance rate = {result.acceptance_rate:.4f}, "
          f"kept {result.samples.shape[0]} samples over {result.steps_taken} steps")
    return sigma1, result


def _load_config(path, args):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("<file>", str(exc)) from None
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        raw["trials"] = args.trials
    if getattr(args, "out", None) is not None:
        raw["out"] = args.out
    return normalize_config(raw)


def _build_parser():
    parser = argparse.ArgumentParser(prog="cas-srfe",
                                     description="Adaptive sampling benchmark for sparse "
                                                 "random feature expansions")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a full experiment")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--trials", type=int)
    run_p.add_argument("--out")
    run_p.add_argument("--jobs", type=int, default=None)
    run_p.add_argument("--diagnostics", action="store_true",
                       help="also write mh_diag/ chain traces")

    diag_p = sub.add_parser("mh-diag", help="sampler diagnostics without the adaptive loop")
    diag_p.add_argument("config")
    diag_p.add_argument("--seed", type=int)
    diag_p.add_argument("--out")

    sub.add_parser("list-targets", help="print registered target names")

    val_p = sub.add_parser("validate", help="validate a config file")
    val_p.add_argument("config")
    return parser


def cli_main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-targets":
            for name in list_targets():
                print(name)
            return 0
        if args.command == "validate":
            _load_config(args.config, args)
            print("config ok")
            return 0
        config = _load_config(args.config, args)
        if args.command == "mh-diag":
            run_mh_diagnostics(config, config["out"])
            return 0
        # run
        result, elapsed = run_experiment(config, jobs=args.jobs)
        emit_results(result, config["out"], elapsed=elapsed)
        if args.diagnostics:
            run_mh_diagnostics(config, config["out"])
        for row in result["aggregates"]:
            print(f"{row['arm']:>4s} m={row['m']:<6d} geo-mean error = {row['geo_mean_error']:.4e} "
                  f"(geo-std {row['geo_std_error']:.3f})")
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
