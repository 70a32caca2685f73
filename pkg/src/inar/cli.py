"""Command-line interface: simulate, estimate, mc, normality.

All JSON outputs embed provenance (tool version, config digest, base seed
where one exists) and are byte-identical across reruns and worker counts.
Exit codes: 0 success, 1 runtime error (single machine-parsable line on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .config import parse_config, parse_kernel_spec
from .errors import InarError
from .estimate import build_design, rcond, residual_norm, solve_cls
from .inference import confidence_intervals, jarque_bera, sandwich_covariance, shapiro_wilk
from .model import ModelParams
from .montecarlo import component_label, normality_suite, run_experiment
from .simulate import (
    DEFAULT_LAMBDA_CAP,
    RngStream,
    read_path_csv,
    simulate_path,
    write_path_csv,
)

__all__ = ["main", "build_parser"]


def _digest(payload: dict) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()[:16]


def _provenance(config_payload: dict, base_seed: int | None) -> dict:
    return {
        "tool": "inar",
        "version": __version__,
        "config_digest": _digest(config_payload),
        "base_seed": base_seed,
    }


def _write_json(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("INAR_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InarError(f"INAR_THREADS must be an integer, got {env!r}") from None
    return 1


def _cmd_simulate(args) -> int:
    kernel = parse_kernel_spec(args.kernel)
    params = ModelParams(nu=args.nu, kernel=kernel, kernel_tail=args.kernel)
    rng = RngStream(args.seed, args.stream_id)
    path = simulate_path(params, args.T, rng, args.lambda_cap)
    write_path_csv(path, args.out)
    return 0


def _cmd_estimate(args) -> int:
    path = read_path_csv(args.path)
    system = build_design(path, args.p)
    theta = solve_cls(system)
    doc = {
        "mu_hat": theta.mu,
        "beta_hat": list(theta.betas),
        "p": system.p,
        "T": system.T,
        "residual_norm": residual_norm(system, theta),
        "rcond": rcond(system),
    }
    if args.ci:
        cov = sandwich_covariance(path, theta, args.p)
        intervals = confidence_intervals(theta, cov, system.T, args.level)
        ses = [float(v) for v in np.sqrt(np.maximum(np.diag(cov.Sigma_hat), 0.0) / system.T)]
        doc["level"] = args.level
        doc["se"] = ses
        doc["ci"] = [[lo, hi] for lo, hi in intervals]
    doc["provenance"] = _provenance(
        {"command": "estimate", "path": os.path.basename(args.path), "p": args.p,
         "ci": bool(args.ci), "level": args.level},
        None,
    )
    _write_json(doc, args.out)
    return 0


def _write_samples_csv(summary, out_path: str) -> None:
    m = summary.per_component_samples.shape[1]
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rep"] + [component_label(j) for j in range(m)])
        for rep, row in zip(summary.rep_ids, summary.per_component_samples):
            writer.writerow([int(rep)] + [repr(float(v)) for v in row])


def _cmd_mc(args) -> int:
    with open(args.config) as fh:
        text = fh.read()
    config = parse_config(text)
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, base_seed=args.seed)
    threads = _resolve_threads(args.threads)
    summary = run_experiment(config, threads=threads)
    diagnostics = normality_suite(summary)

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)

    config_payload = {
        "command": "mc",
        "case": config.case,
        "nu": config.params.nu,
        "kernel": config.params.kernel_tail,
        "T": config.T,
        "p": config.p,
        "n_experiments": config.n_experiments,
        "seed": config.base_seed,
        "cap_negatives": config.cap_negatives,
        "lambda_cap": config.lam_cap,
    }
    doc = {
        "case": config.case,
        "T": config.T,
        "p": config.p,
        "n_experiments": config.n_experiments,
        "base_seed": config.base_seed,
        "mean_theta": [float(v) for v in summary.mean_theta],
        "mse": summary.mse,
        "rel_err_theta": summary.rel_err_theta,
        "rel_err_alpha": summary.rel_err_alpha,
        "failures": summary.failures,
        "n_success": summary.n_success,
        "normality": {
            diag.label: {
                "jb_stat": diag.report.jb_stat,
                "jb_p": diag.report.jb_p,
                "sw_stat": diag.report.sw_stat,
                "sw_p": diag.report.sw_p,
            }
            for diag in diagnostics
        },
        "normality_samples": "raw",
        "provenance": _provenance(config_payload, config.base_seed),
    }
    _write_json(doc, os.path.join(out_dir, "mc_summary.json"))

    if not args.no_samples:
        _write_samples_csv(summary, os.path.join(out_dir, "samples.csv"))
    for diag in diagnostics:
        with open(os.path.join(out_dir, f"qq_{diag.label}.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["z", "value"])
            for z, v in zip(diag.qq_z, diag.qq_value):
                writer.writerow([repr(float(z)), repr(float(v))])
        with open(os.path.join(out_dir, f"hist_{diag.label}.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "count"])
            for left, right, count in zip(
                diag.hist_left, diag.hist_right, diag.hist_count
            ):
                writer.writerow([repr(float(left)), repr(float(right)), int(count)])
    return 0


def _read_samples_csv(path: str) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "rep":
            raise InarError("samples CSV must start with header 'rep,mu_hat,...'")
        labels = header[1:]
        rows = [[float(v) for v in row[1:]] for row in reader if row]
    if not rows:
        raise InarError("samples CSV contains no data rows")
    return labels, np.asarray(rows, dtype=np.float64)


def _cmd_normality(args) -> int:
    labels, samples = _read_samples_csv(args.samples)
    if args.components:
        wanted = [c.strip() for c in args.components.split(",") if c.strip()]
    else:
        wanted = labels[: min(3, len(labels))]
    reports = {}
    for label in wanted:
        if label not in labels:
            raise InarError(f"component {label!r} not present in samples CSV")
        col = samples[:, labels.index(label)]
        jb_stat, jb_p = jarque_bera(col)
        sw_stat, sw_p = shapiro_wilk(col)
        reports[label] = {
            "jb_stat": jb_stat,
            "jb_p": jb_p,
            "sw_stat": sw_stat,
            "sw_p": sw_p,
            "sample_size": int(col.shape[0]),
        }
    doc = {
        "normality": reports,
        "normality_samples": "raw",
        "provenance": _provenance(
            {"command": "normality", "samples": os.path.basename(args.samples),
             "components": wanted},
            None,
        ),
    }
    _write_json(doc, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inar",
        description="Simulate, estimate, and study cumulative INAR count processes.",
    )
    parser.add_argument("--version", action="version", version=f"inar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate one path to CSV")
    sim.add_argument("--nu", type=float, required=True, help="immigration rate")
    sim.add_argument("--kernel", required=True,
                     help="none | geometric:<ratio> | lags:[a1,a2,...]")
    sim.add_argument("--T", type=int, required=True, help="path length")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--stream-id", type=int, default=0)
    sim.add_argument("--lambda-cap", type=float, default=DEFAULT_LAMBDA_CAP)
    sim.add_argument("--out", required=True, help="output path CSV")
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate", help="CLS estimate from a path CSV")
    est.add_argument("--path", required=True, help="input path CSV")
    est.add_argument("--p", type=int, required=True, help="lag order")
    est.add_argument("--ci", action="store_true",
                     help="add sandwich standard errors and confidence intervals")
    est.add_argument("--level", type=float, default=0.95)
    est.add_argument("--out", default=None, help="output JSON (default stdout)")
    est.set_defaults(func=_cmd_estimate)

    mc = sub.add_parser("mc", help="Monte Carlo study from a JSON config")
    mc.add_argument("--config", required=True, help="config JSON path")
    mc.add_argument("--out-dir", default=".", help="output directory")
    mc.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: INAR_THREADS or 1)")
    mc.add_argument("--seed", type=int, default=None,
                    help="override the config's base seed")
    mc.add_argument("--no-samples", action="store_true",
                    help="skip writing samples.csv")
    mc.set_defaults(func=_cmd_mc)

    norm = sub.add_parser("normality", help="normality tests on a samples CSV")
    norm.add_argument("--samples", required=True, help="samples CSV from mc")
    norm.add_argument("--components", default=None,
                      help="comma-separated labels (default: first three)")
    norm.add_argument("--out", default=None, help="output JSON (default stdout)")
    norm.set_defaults(func=_cmd_normality)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InarError, ValueError, OSError) as exc:
        sys.stderr.write(f"inar: error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
