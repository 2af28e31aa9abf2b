"""Monte Carlo harness: replicated statistics over an intensity grid.

Two execution shapes.  run() draws an independent forked ensemble per
(intensity, replication) cell, matching in-distribution statements.
sweep_coupled() forks once per replication and walks the whole grid on
that single coupled realization, so each replication traces the
almost-sure trajectory a strong law speaks about; it is restricted to
the ratio statistics those laws cover.

Persisted artifacts are a raw CSV (one row per sample) and a summary
JSON; both are byte-identical across reruns of the same (config, seed),
which is why wall-clock timings live only on the in-memory result.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__, theory
from .connection import ConnectionFunction, alpha, format_connection
from .engine import (
    BuildMode,
    build_graph,
    count_isolated_at,
    degree_stats,
    format_mode,
    incident_longest_edge,
    is_connected_at,
    isolation_threshold,
    longest_edge_value,
)
from .ensemble import CoupledEnsemble
from .geometry import check_dim

# parameters each statistic needs, beyond the connection function itself
STATISTIC_PARAMS = {
    "isolated_mean": ("b",),
    "isolated_dispersion": ("b",),
    "dn_ratio": (),
    "connectivity_fraction": ("gamma",),
    "typical_longest_edge": ("gamma", "beta_prime"),
    "longest_edge_ratio": ("gamma",),
    "degree_tail": ("gamma", "t"),
    "max_degree_ratio": ("gamma",),
    "min_degree_ratio": ("gamma",),
}

# statistics whose limit theorems are almost-sure, hence sweepable
SWEEPABLE = ("dn_ratio", "max_degree_ratio", "min_degree_ratio")


@dataclass(frozen=True)
class ExperimentConfig:
    statistic: str
    fn: ConnectionFunction
    dim: int = 2
    n_grid: tuple[float, ...] = (1000.0,)
    replications: int = 10
    seed: int = 0
    mode: BuildMode = BuildMode()
    b: float | None = None
    gamma: float | None = None
    beta_prime: float | None = None
    t: float | None = None
    out: str | None = None
    threads: int = 1

    def __post_init__(self):
        if self.statistic not in STATISTIC_PARAMS:
            known = ", ".join(sorted(STATISTIC_PARAMS))
            raise ValueError(f"unknown statistic {self.statistic!r}; expected one of {known}")
        check_dim(self.dim)
        grid = tuple(float(v) for v in self.n_grid)
        if not grid:
            raise ValueError("n_grid must not be empty")
        if any(not (v > 1.0) for v in grid):
            raise ValueError(f"every grid intensity must exceed 1, got {grid}")
        if any(a >= b for a, b in zip(grid, grid[1:])):
            raise ValueError(f"n_grid must be strictly increasing, got {grid}")
        object.__setattr__(self, "n_grid", grid)
        if self.replications < 1:
            raise ValueError(f"replications must be at least 1, got {self.replications}")
        if self.threads < 1:
            raise ValueError(f"threads must be at least 1, got {self.threads}")
        for name in STATISTIC_PARAMS[self.statistic]:
            if getattr(self, name) is None:
                raise ValueError(f"statistic {self.statistic!r} requires parameter {name!r}")

    def echo(self) -> dict:
        """Plain-data form of the configuration for summaries.

        Worker count is excluded: it cannot influence results, and the
        persisted files must be byte-identical across machines.
        """
        out = {
            "statistic": self.statistic,
            "fn": format_connection(self.fn),
            "dim": self.dim,
            "n_grid": list(self.n_grid),
            "replications": self.replications,
            "seed": self.seed,
            "mode": format_mode(self.mode),
        }
        for name in ("b", "gamma", "beta_prime", "t"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


@dataclass
class Sample:
    n: float
    replication: int
    value: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    samples: list  # of Sample, ordered by (n, replication)
    skipped: dict  # n -> count of degenerate replications
    prediction: dict
    per_n: dict  # n -> aggregate dict
    timings: dict


class StreamingMoments:
    """Single-pass mean and variance in the numerically stable update form."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def add(self, x: float):
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (x - self.mean)

    @property
    def variance(self) -> float:
        return self._m2 / (self.count - 1) if self.count > 1 else math.nan


def aggregate(values: list[float]) -> dict:
    """Per-intensity summary block: moments, normal CI, median."""
    moments = StreamingMoments()
    for v in values:
        moments.add(v)
    out = {"count": moments.count}
    if moments.count == 0:
        out.update(mean=None, variance=None, se=None, ci95=None, median=None)
        return out
    mean = moments.mean
    out["mean"] = mean
    out["median"] = float(np.median(values))
    if moments.count > 1:
        var = moments.variance
        se = math.sqrt(var / moments.count)
        out["variance"] = var
        out["se"] = se
        out["ci95"] = [mean - 1.96 * se, mean + 1.96 * se]
    else:
        out.update(variance=None, se=None, ci95=None)
    return out


def prediction_block(config: ExperimentConfig) -> dict:
    """theory.predict outcome as plain data, up front and once."""
    try:
        limit = theory.predict(
            config.statistic,
            config.fn,
            config.dim,
            b=config.b,
            gamma=config.gamma,
            beta_prime=config.beta_prime,
            t=config.t,
        )
    except theory.NotApplicableError as exc:
        return {"applicable": False, "reason": str(exc)}
    block = {"applicable": True, "value": limit.value, "claim": limit.claim}
    if limit.band is not None:
        block["band"] = list(limit.band)
    if limit.note is not None:
        block["note"] = limit.note
    return block


def _sample_statistic(config: ExperimentConfig, ens: CoupledEnsemble, n: float) -> float | None:
    """One raw value, or None when the realization is degenerate (N < 2)."""
    fn, d, mode = config.fn, config.dim, config.mode
    kind = config.statistic
    if kind == "typical_longest_edge":
        ens = ens.with_palm()
    ids, _ = ens.points_up_to(n)
    if len(ids) < 2:
        return None
    if kind in ("isolated_mean", "isolated_dispersion"):
        r = theory.r_iso(n, config.b, fn, d)
        count, _ = count_isolated_at(ens, fn, n, r, mode)
        return float(count)
    if kind == "dn_ratio":
        res = isolation_threshold(ens, fn, n, mode)
        return alpha(fn, d) * n * res.value**d / math.log(n)
    if kind == "connectivity_fraction":
        r = theory.r_hat(n, config.gamma, fn, d)
        verdict, _ = is_connected_at(ens, fn, n, r, mode)
        return 1.0 if verdict else 0.0
    if kind == "typical_longest_edge":
        r = theory.r_hat(n, config.gamma, fn, d)
        a_n = theory.solve_a_n(n, config.gamma, config.beta_prime, fn, d)
        reach = incident_longest_edge(ens, fn, n, r, 0)
        return 1.0 if reach <= a_n * r else 0.0
    if kind == "longest_edge_ratio":
        r = theory.r_hat(n, config.gamma, fn, d)
        length, _ = longest_edge_value(ens, fn, n, r, mode)
        if theory.longest_edge_scale(fn) == "ratio":
            return length / (r * math.log(n))
        return math.log(length) / math.log(n) if length > 0.0 else -math.inf
    r = theory.r_hat(n, config.gamma, fn, d)
    graph = build_graph(ens, fn, n, r, mode)
    if kind == "degree_tail":
        level = theory.degree_threshold(n, config.gamma, fn, d, config.t)
        stats = degree_stats(graph, levels=(level,))
        return stats.at_least[level] / len(graph.ids)
    if kind == "max_degree_ratio":
        return float(graph.degrees.max()) / math.log(n)
    return float(graph.degrees.min()) / math.log(n)  # min_degree_ratio


def _independent_cell(args):
    config, n_index, rep = args
    base = CoupledEnsemble(config.seed, config.dim)
    fork = base.fork_replication(n_index * config.replications + rep)
    value = _sample_statistic(config, fork, config.n_grid[n_index])
    return n_index, rep, value


def _trajectory(args):
    config, rep = args
    fork = CoupledEnsemble(config.seed, config.dim).fork_replication(rep)
    return rep, [_sample_statistic(config, fork, n) for n in config.n_grid]


def _map_jobs(worker, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, jobs, chunksize=max(1, len(jobs) // (4 * threads))))


def _assemble(config: ExperimentConfig, cells) -> ExperimentResult:
    """Order (n, rep, value) cells into samples, skips, and aggregates."""
    samples, skipped = [], {}
    for n_index, rep, value in sorted(cells, key=lambda c: (c[0], c[1])):
        n = config.n_grid[n_index]
        if value is None:
            skipped[n] = skipped.get(n, 0) + 1
        else:
            samples.append(Sample(n, rep, float(value)))
    per_n = {}
    for n in config.n_grid:
        block = aggregate([s.value for s in samples if s.n == n])
        block["skipped"] = skipped.get(n, 0)
        per_n[n] = block
    return ExperimentResult(
        config=config,
        samples=samples,
        skipped=skipped,
        prediction=prediction_block(config),
        per_n=per_n,
        timings={},
    )


def run(config: ExperimentConfig) -> ExperimentResult:
    """Independent replications for every grid intensity."""
    start = time.perf_counter()
    jobs = [
        (config, n_index, rep)
        for n_index in range(len(config.n_grid))
        for rep in range(config.replications)
    ]
    cells = _map_jobs(_independent_cell, jobs, config.threads)
    result = _assemble(config, cells)
    result.timings["seconds"] = time.perf_counter() - start
    return result


def sweep_coupled(config: ExperimentConfig) -> ExperimentResult:
    """One coupled trajectory per replication across the whole grid."""
    if config.statistic not in SWEEPABLE:
        allowed = ", ".join(SWEEPABLE)
        raise ValueError(
            f"sweep_coupled covers almost-sure statistics ({allowed}); "
            f"got {config.statistic!r}"
        )
    start = time.perf_counter()
    jobs = [(config, rep) for rep in range(config.replications)]
    rows = _map_jobs(_trajectory, jobs, config.threads)
    cells = [
        (n_index, rep, value)
        for rep, values in rows
        for n_index, value in enumerate(values)
    ]
    result = _assemble(config, cells)
    result.timings["seconds"] = time.perf_counter() - start
    return result


def summary_document(result: ExperimentResult) -> dict:
    """The persisted summary: everything reproducible, nothing wall-clock."""
    return {
        "config": result.config.echo(),
        "prediction": result.prediction,
        "per_n": {repr(n): block for n, block in result.per_n.items()},
        "version": __version__,
    }


def persist(result: ExperimentResult, path: str) -> tuple[str, str]:
    """Write `<path>.raw.csv` and `<path>.summary.json`; returns both names."""
    raw_path = f"{path}.raw.csv"
    summary_path = f"{path}.summary.json"
    try:
        with open(raw_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["statistic", "n", "replication", "value"])
            for s in result.samples:
                writer.writerow([result.config.statistic, repr(s.n), s.replication, repr(s.value)])
        with open(summary_path, "w") as fh:
            json.dump(summary_document(result), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write results under {path!r}: {exc}") from exc
    return raw_path, summary_path


def read_raw(path: str) -> list[Sample]:
    """Parse a raw CSV back into samples, validating the 4-column schema."""
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["statistic", "n", "replication", "value"]:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            samples.append(Sample(float(row[1]), int(row[2]), float(row[3])))
    return samples


def summarize_raw(path: str) -> dict:
    """Recompute per-n aggregates from a raw CSV (round-trip check)."""
    samples = read_raw(path)
    grid = sorted({s.n for s in samples})
    return {
        repr(n): aggregate([s.value for s in samples if s.n == n]) for n in grid
    }
