"""Command-line front end: analyze, bound, evolve, check-kernel.

Exit codes: 0 success, 1 configuration error, 2 model-hypothesis violation
(including diagnostic-mode completions), 3 numerical failure.  Every error
is also emitted as a JSON diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from .config import RunConfig, config_from_dict, load_config
from .discretize import assemble_generator
from .errors import (
    HYPOTHESIS_ERRORS,
    ConfigError,
    TorspecError,
    ValidationError,
)
from .evolution import check_extinction, evolve
from .gapbound import gap_constants, verify_gap
from .jsonio import dump, write_trace_csv
from .kernels import check_potential, jump_rate, kernel_stats
from .spectral import analyze, max_eigenvalue_shifted_power

COMMANDS = ("analyze", "bound", "evolve", "check-kernel")


def _metadata() -> dict:
    return {
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "tool": f"torspec {__version__}",
    }


def _out_dir(config: RunConfig, override: str | None) -> str:
    path = override if override is not None else config.output.directory
    os.makedirs(path, exist_ok=True)
    return path


def _gap_section(config: RunConfig, wound, potential, report) -> dict | None:
    if wound is None:
        return None
    try:
        bound = gap_constants(potential, wound)
    except TorspecError:
        return None
    verdict = verify_gap(report, bound)
    return {**bound.as_dict(), "verdict": verdict.as_dict()["verdict"], "margin": verdict.margin}


def _run_analyze(config: RunConfig, out_dir: str) -> int:
    grid = config.build_grid()
    wound, kernel = config.build_kernel(grid)
    potential = config.build_potential(grid)
    options = dataclasses.replace(config.analysis, diagnostic=True)
    report = analyze(kernel, potential, grid, options)
    body = report.to_dict()
    document = {
        "config_echo": config.echo(),
        "essential": body["essential"],
        "lambda": body["lambda"],
        "lambda_by_method": body["lambda_by_method"],
        "discrete_eigenvalues": body["discrete_eigenvalues"],
        "ground_state_stats": body["ground_state_stats"],
        "gap_bound": _gap_section(config, wound, potential, report),
        "diagnostics": body["diagnostics"],
        "metadata": _metadata(),
    }
    path = os.path.join(out_dir, "report.json")
    dump(document, path)
    print(path)
    return 0 if report.diagnostics["conforming"] else 2


def _run_bound(config: RunConfig, out_dir: str) -> int:
    grid = config.build_grid()
    wound, kernel = config.build_kernel(grid)
    if wound is None:
        raise ValidationError("the gap bound applies only to convolution-form kernels")
    potential = config.build_potential(grid)
    report = analyze(kernel, potential, grid, config.analysis)
    bound = gap_constants(potential, wound)
    verdict = verify_gap(report, bound)
    document = {
        "config_echo": config.echo(),
        "gap_bound": {**bound.as_dict(), **verdict.as_dict()},
        "lambda_by_method": dict(report.lambda_by_method),
        "metadata": _metadata(),
    }
    path = os.path.join(out_dir, "gap_bound.json")
    dump(document, path)
    print(path)
    return 0


def _run_evolve(config: RunConfig, out_dir: str) -> int:
    grid = config.build_grid()
    _, kernel = config.build_kernel(grid)
    potential = config.build_potential(grid)
    pot_diag = check_potential(potential)
    generator = assemble_generator(kernel, potential, grid)

    estimate = max_eigenvalue_shifted_power(
        generator,
        generator.edge_sup,
        tol=config.analysis.power_tol,
        max_iter=config.analysis.max_iter,
        seed=config.analysis.seed,
    )
    t_max = config.evolution.t_max
    if t_max is None:
        t_max = 40.0 / abs(estimate.lam) if abs(estimate.lam) > 1e-12 else 40.0
    trace = evolve(
        generator,
        np.ones(grid.size),
        t_max=t_max,
        dt=config.evolution.dt,
        method=config.evolution.method,
    )
    summary = check_extinction(trace)
    trace_path = os.path.join(out_dir, "trace.csv")
    write_trace_csv(trace, trace_path)
    document = {
        "config_echo": config.echo(),
        "t_max": t_max,
        "method": config.evolution.method,
        "lambda_estimate": estimate.lam,
        "decay_rate_fit": trace.decay_rate_fit,
        "fit_window": list(trace.fit_window),
        "min_value_seen": trace.min_value_seen,
        "extinction": summary.as_dict(),
        "metadata": _metadata(),
    }
    path = os.path.join(out_dir, "evolution.json")
    dump(document, path)
    print(trace_path)
    print(path)
    return 0 if pot_diag.eligible else 2


def _run_check_kernel(config: RunConfig, out_dir: str) -> int:
    grid = config.build_grid()
    wound, kernel = config.build_kernel(grid)
    potential = config.build_potential(grid)
    pot_diag = check_potential(potential)
    rates = jump_rate(kernel)

    stats_section = None
    error_section = None
    code = 0
    try:
        stats_section = kernel_stats(kernel, config.analysis.primitivity_max_power).as_dict()
    except HYPOTHESIS_ERRORS as exc:
        error_section = {"error": type(exc).__name__, "message": str(exc)}
        code = 2
    if not pot_diag.eligible:
        code = 2

    document = {
        "config_echo": config.echo(),
        "kernel_stats": stats_section,
        "kernel_error": error_section,
        "jump_rate": {"min": float(rates.min()), "max": float(rates.max())},
        "wound": None if wound is None else {
            "quadrature_mass": wound.quadrature_mass(),
            "wind_truncation": wound.wind_truncation,
            "tail_estimate": wound.tail_estimate,
        },
        "potential": {
            "max_sample": pot_diag.max_sample,
            "fraction_negative": pot_diag.fraction_negative,
            "norm_l1": pot_diag.norm_l1,
            "norm_l2": pot_diag.norm_l2,
            "eligible": pot_diag.eligible,
        },
        "metadata": _metadata(),
    }
    path = os.path.join(out_dir, "kernel_check.json")
    dump(document, path)
    print(path)
    return code


_RUNNERS = {
    "analyze": _run_analyze,
    "bound": _run_bound,
    "evolve": _run_evolve,
    "check-kernel": _run_check_kernel,
}


def run_command(command: str, config: RunConfig, out_dir: str | None = None) -> int:
    """Dispatch one command against a validated config; returns the exit code."""
    if command not in _RUNNERS:
        raise ValidationError(f"unknown command {command!r}")
    return _RUNNERS[command](config, _out_dir(config, out_dir))


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, ConfigError):
        return 1
    if isinstance(exc, HYPOTHESIS_ERRORS):
        return 2
    if isinstance(exc, TorspecError):
        return 3
    raise exc


def _load_with_overrides(path: str, seed: int | None, grid_n: int | None) -> RunConfig:
    if seed is None and grid_n is None:
        return load_config(path)
    config = load_config(path)  # full validation of the file as written
    raw = config.echo()
    if seed is not None:
        raw["analysis"]["seed"] = seed
    if grid_n is not None:
        raw["grid_n"] = grid_n
    return config_from_dict(raw, base_dir=config.base_dir)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="torspec",
        description="Spectra and density evolution of non-local jump operators "
        "with periodic potentials on the torus.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--grid-n", type=int, default=None, help="grid resolution override")
    args = parser.parse_args(argv)

    try:
        config = _load_with_overrides(args.config, args.seed, args.grid_n)
        return run_command(args.command, config, args.out)
    except (ConfigError, TorspecError) as exc:
        code = _exit_code_for(exc)
        diagnostic = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        print(json.dumps(diagnostic), file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
