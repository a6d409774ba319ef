"""Command-line experiment driver.

One experiment per invocation: a subcommand picks the runner, a JSON config
describes kernels, orientations, lattice bounds and tolerances, and the run
writes one CSV of results plus a JSON summary with pass/fail per assertion.

Exit codes: 0 success, 1 assertion failure, 2 configuration error,
3 quadrature non-convergence.

Flags may also be supplied through the environment with the NLSPECTRAL_
prefix (NLSPECTRAL_CONFIG, NLSPECTRAL_OUT, NLSPECTRAL_THREADS,
NLSPECTRAL_SEED, NLSPECTRAL_TOL_OVERRIDE with comma-separated KEY=VAL
entries); explicit flags win.
"""

import argparse
import json
import os
import sys
import time

from . import __version__
from .errors import ConfigError, KernelError, QuadratureConvergenceError
from .experiments import RUNNERS, passed
from .results import config_hash, write_csv, write_summary

ENV_PREFIX = "NLSPECTRAL_"

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_QUADRATURE = 3


def _env(name):
    return os.environ.get(ENV_PREFIX + name)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nlspectral",
        description="half-ball nonlocal operator experiments on periodic boxes",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", default=None, help="path to the JSON config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for independent symbol builds")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--tol-override", action="append", default=[],
                       metavar="KEY=VAL", help="override a tolerance entry")
    return parser


def load_config(path):
    if path is None:
        raise ConfigError("no config given (flag --config or NLSPECTRAL_CONFIG)")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _apply_overrides(cfg, args):
    threads = args.threads if args.threads is not None else _env("THREADS")
    if threads is not None:
        cfg["threads"] = int(threads)
    seed = args.seed if args.seed is not None else _env("SEED")
    if seed is not None:
        cfg["seed"] = int(seed)
    overrides = list(args.tol_override)
    env_tol = _env("TOL_OVERRIDE")
    if env_tol:
        overrides.extend(tok for tok in env_tol.split(",") if tok)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"tolerance override must be KEY=VAL, got {item!r}")
        key, val = item.split("=", 1)
        try:
            cfg.setdefault("tolerances", {})[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"tolerance override {item!r} is not numeric") from exc
    return cfg


def run_command(command, cfg, out_dir):
    """Execute one experiment and write its artifacts; returns the exit code."""
    runner = RUNNERS[command]
    os.makedirs(out_dir, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise ConfigError(f"output directory {out_dir} is not writable")
    started = time.time()
    table, summary = runner(cfg, out_dir=out_dir)
    import numpy
    import scipy

    summary["metadata"] = {
        "command": command,
        "config_sha256": config_hash(cfg),
        "package_version": __version__,
        "numpy_version": numpy.__version__,
        "scipy_version": scipy.__version__,
        "wall_time_s": time.time() - started,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    name = cfg.get("experiment", command).replace(" ", "_")
    write_csv(table, os.path.join(out_dir, f"{name}.csv"))
    write_summary(summary, os.path.join(out_dir, f"{name}_summary.json"))
    return EXIT_OK if passed(summary) else EXIT_ASSERTION


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg_path = args.config or _env("CONFIG")
        cfg = load_config(cfg_path)
        cfg = _apply_overrides(cfg, args)
        out_dir = args.out or _env("OUT") or "."
        return run_command(args.command, cfg, out_dir)
    except (ConfigError, KernelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureConvergenceError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE


if __name__ == "__main__":
    sys.exit(main())
