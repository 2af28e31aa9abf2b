"""Command-line front door: theory tables, builds, and experiment runs.

Exit codes: 0 success, 1 runtime failure (including a failing oracle
suite), 2 usage or validation failure.  Validation messages always name
the offending flag.  A JSON config file may supply any flag value; flags
given explicitly on the command line win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import theory
from .connection import alpha, format_connection, parse_connection
from .engine import (
    BuildMode,
    build_graph,
    degree_stats,
    format_mode,
    isolated_count,
    longest_edge,
    parse_mode,
)
from .ensemble import CoupledEnsemble
from .experiments import (
    STATISTIC_PARAMS,
    SWEEPABLE,
    ExperimentConfig,
    persist,
    run as run_experiment,
    summary_document,
    sweep_coupled,
)
from .geometry import check_dim, unit_ball_volume
from .oracle import run_suite


class UsageError(Exception):
    """Validation failure attributable to one flag."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcm",
        description="Random connection model laboratory: theory values, "
        "graph builds, and Monte Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file supplying default flag values")
        p.add_argument("--g", help="connection function, e.g. indicator, exp:1, pow:5, gauss")
        p.add_argument("--dim", type=int, help="torus dimension (1..8)")
        p.add_argument("--seed", type=int, help="root seed (default 0)")

    p_theory = sub.add_parser("theory", help="print theta, alpha, beta, radii, predictions")
    common(p_theory)
    p_theory.add_argument("--gamma", type=float, help="radius multiplier for r_hat and predictions")
    p_theory.add_argument("--n", help="comma-separated intensities for the r_hat table")
    p_theory.add_argument("--b", type=float, help="isolation offset parameter")
    p_theory.add_argument("--beta-prime", type=float, help="typical longest-edge parameter")
    p_theory.add_argument("--t", type=float, help="degree-tail deviation parameter")

    p_build = sub.add_parser("build", help="materialize one graph and print its statistics")
    common(p_build)
    p_build.add_argument("--n", help="Poisson intensity")
    p_build.add_argument("--r", type=float, help="connection radius")
    p_build.add_argument("--mode", help="exact or trunc:<eps> (default trunc:1e-3)")

    for name, help_text in (
        ("run", "independent replications of an experiment statistic"),
        ("sweep", "coupled trajectories of an almost-sure statistic"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--experiment", help="statistic kind, e.g. isolated_mean, dn_ratio")
        p.add_argument("--n", help="comma-separated intensity grid")
        p.add_argument("--reps", type=int, help="replications per intensity (default 10)")
        p.add_argument("--b", type=float, help="isolation offset parameter")
        p.add_argument("--gamma", type=float, help="radius multiplier")
        p.add_argument("--beta-prime", type=float, help="typical longest-edge parameter")
        p.add_argument("--t", type=float, help="degree-tail deviation parameter")
        p.add_argument("--mode", help="exact or trunc:<eps> (default trunc:1e-3)")
        p.add_argument("--out", help="output stem; writes <out>.raw.csv and <out>.summary.json")
        p.add_argument("--threads", type=int, help="worker processes (default: machine parallelism)")

    p_oracle = sub.add_parser("oracle", help="brute-force equivalence suite on small instances")
    common(p_oracle)
    p_oracle.add_argument("--cases", type=int, help="number of seeded instances (default 100)")
    p_oracle.add_argument("--n", help="intensity per instance (default 50)")
    return parser


def _merge_config(args: argparse.Namespace) -> None:
    """Fill unset flags from the JSON config file, if one was given."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("--config", str(exc)) from None
    if not isinstance(data, dict):
        raise UsageError("--config", "top-level JSON value must be an object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest) or dest in ("command", "config"):
            raise UsageError("--config", f"unknown key {key!r} for subcommand {args.command!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def _required(args, flag: str, dest: str):
    value = getattr(args, dest)
    if value is None:
        raise UsageError(f"--{flag}", "required")
    return value


def _parse_fn(args):
    text = _required(args, "g", "g")
    try:
        return parse_connection(str(text))
    except ValueError as exc:
        raise UsageError("--g", str(exc)) from None


def _parse_dim(args) -> int:
    value = getattr(args, "dim")
    if value is None:
        return 2
    try:
        return check_dim(int(value))
    except ValueError as exc:
        raise UsageError("--dim", str(exc)) from None


def _parse_grid(args) -> tuple[float, ...]:
    raw = _required(args, "n", "n")
    if isinstance(raw, (list, tuple)):
        parts = list(raw)
    else:
        parts = [p for p in str(raw).split(",") if p != ""]
    try:
        grid = tuple(float(p) for p in parts)
    except (TypeError, ValueError):
        raise UsageError("--n", f"expected comma-separated numbers, got {raw!r}") from None
    if not grid:
        raise UsageError("--n", "at least one intensity required")
    return grid


def _parse_build_mode(args) -> BuildMode:
    text = getattr(args, "mode", None)
    if text is None:
        return BuildMode()
    try:
        return parse_mode(str(text))
    except ValueError as exc:
        raise UsageError("--mode", str(exc)) from None


def _parse_positive(args, flag: str, dest: str, default=None):
    value = getattr(args, dest, None)
    if value is None:
        if default is None:
            raise UsageError(f"--{flag}", "required")
        return default
    value = float(value)
    if not (value > 0.0):
        raise UsageError(f"--{flag}", f"must be positive, got {value:g}")
    return value


def _emit(document: dict) -> None:
    print(json.dumps(document, indent=2, sort_keys=True))


def _cmd_theory(args) -> int:
    fn = _parse_fn(args)
    d = _parse_dim(args)
    doc = {
        "g": format_connection(fn),
        "dim": d,
        "theta": unit_ball_volume(d),
        "alpha": alpha(fn, d),
        "beta": theory.beta_solve(fn, d),
    }
    gamma = getattr(args, "gamma", None)
    if gamma is not None:
        gamma = _parse_positive(args, "gamma", "gamma")
        doc["gamma"] = gamma
        if getattr(args, "n", None) is not None:
            doc["r_hat"] = {
                repr(n): theory.r_hat(n, gamma, fn, d) for n in _parse_grid(args)
            }
    predictions = {}
    for kind in theory.STATISTICS:
        try:
            limit = theory.predict(
                kind, fn, d,
                b=getattr(args, "b", None),
                gamma=gamma,
                beta_prime=getattr(args, "beta_prime", None),
                t=getattr(args, "t", None),
            )
        except theory.NotApplicableError as exc:
            predictions[kind] = {"applicable": False, "reason": str(exc)}
        except ValueError:
            continue  # a needed parameter was not supplied
        else:
            block = {"applicable": True, "value": limit.value, "claim": limit.claim}
            if limit.band is not None:
                block["band"] = list(limit.band)
            predictions[kind] = block
    doc["predictions"] = predictions
    _emit(doc)
    return 0


def _cmd_build(args) -> int:
    fn = _parse_fn(args)
    d = _parse_dim(args)
    n = _parse_positive(args, "n", "n")
    r = getattr(args, "r", None)
    if r is None:
        raise UsageError("--r", "required")
    try:
        r = float(r)
    except (TypeError, ValueError):
        raise UsageError("--r", f"expected a number, got {r!r}") from None
    if not (r >= 0.0):
        raise UsageError("--r", f"must be nonnegative, got {r:g}")
    mode = _parse_build_mode(args)
    seed = int(getattr(args, "seed", None) or 0)
    graph = build_graph(CoupledEnsemble(seed, d), fn, n, r, mode)
    stats = degree_stats(graph)
    _emit(
        {
            "g": format_connection(fn),
            "dim": d,
            "n": n,
            "r": r,
            "seed": seed,
            "mode": format_mode(mode),
            "N": len(graph.ids),
            "edges": len(graph.edges),
            "isolated": isolated_count(graph),
            "max_degree": stats.max_degree,
            "min_degree": stats.min_degree,
            "longest_edge": longest_edge(graph),
            "cutoff": graph.cutoff,
            "certified_bound": graph.certified_bound,
        }
    )
    return 0


def _experiment_config(args) -> ExperimentConfig:
    kind = _required(args, "experiment", "experiment")
    if kind not in STATISTIC_PARAMS:
        known = ", ".join(sorted(STATISTIC_PARAMS))
        raise UsageError("--experiment", f"unknown statistic {kind!r}; expected one of {known}")
    fn = _parse_fn(args)
    d = _parse_dim(args)
    grid = _parse_grid(args)
    reps = getattr(args, "reps", None)
    threads = getattr(args, "threads", None)
    out = getattr(args, "out", None)
    if out is not None:
        parent = os.path.dirname(str(out)) or "."
        if not os.path.isdir(parent):
            raise UsageError("--out", f"directory {parent!r} does not exist")
        if not os.access(parent, os.W_OK):
            raise UsageError("--out", f"directory {parent!r} is not writable")
    try:
        return ExperimentConfig(
            statistic=kind,
            fn=fn,
            dim=d,
            n_grid=grid,
            replications=int(reps) if reps is not None else 10,
            seed=int(getattr(args, "seed", None) or 0),
            mode=_parse_build_mode(args),
            b=getattr(args, "b", None),
            gamma=getattr(args, "gamma", None),
            beta_prime=getattr(args, "beta_prime", None),
            t=getattr(args, "t", None),
            out=str(out) if out is not None else None,
            threads=int(threads) if threads is not None else (os.cpu_count() or 1),
        )
    except ValueError as exc:
        raise UsageError("--experiment", str(exc)) from None


def _cmd_run(args, sweep: bool) -> int:
    config = _experiment_config(args)
    if sweep and config.statistic not in SWEEPABLE:
        allowed = ", ".join(SWEEPABLE)
        raise UsageError(
            "--experiment",
            f"sweep covers almost-sure statistics ({allowed}); got {config.statistic!r}",
        )
    result = sweep_coupled(config) if sweep else run_experiment(config)
    doc = summary_document(result)
    if config.out is not None:
        raw_path, summary_path = persist(result, config.out)
        doc["files"] = {"raw": raw_path, "summary": summary_path}
    _emit(doc)
    return 0


def _cmd_oracle(args) -> int:
    cases = int(getattr(args, "cases", None) or 100)
    n = _parse_positive(args, "n", "n", default=50.0)
    d = _parse_dim(args)
    report = run_suite(seeds=range(cases), n=n, d=d)
    _emit(
        {
            "cases": report.cases,
            "checks": report.checks,
            "failures": report.failures,
            "passed": report.passed,
        }
    )
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _merge_config(args)
        if args.command == "theory":
            return _cmd_theory(args)
        if args.command == "build":
            return _cmd_build(args)
        if args.command == "run":
            return _cmd_run(args, sweep=False)
        if args.command == "sweep":
            return _cmd_run(args, sweep=True)
        return _cmd_oracle(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
