"""Turn persisted results into PNG figures.

Three kinds cover the reporting needs.  `convergence` plots the
per-intensity mean with its 95% interval against the predicted limit.
`histogram` shows the replication distribution at the largest
intensity, with a Poisson mass overlay when the statistic is the
isolated-vertex count.  `threshold_sweep` draws the coupled
trajectories across the grid under the per-intensity median.

Rendering is deterministic: the Agg backend, a pinned figure size and
resolution, and fixed PNG metadata make identical inputs give
identical bytes.
"""

import math
from collections import defaultdict
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .io import RawSample, SchemaError, load_raw, load_summary

KINDS = ("convergence", "histogram", "threshold_sweep")
FIGSIZE = (6.4, 4.4)
DPI = 110
METADATA = {"Software": "rcm-plot"}

__all__ = ["KINDS", "PlotSpec", "render"]


@dataclass(frozen=True)
class PlotSpec:
    summary: str
    out: str
    kind: str = "convergence"
    raw: str | None = None
    log_x: bool = False


def render(spec: PlotSpec) -> str:
    """Write the figure described by spec; returns the output path."""
    if spec.kind not in KINDS:
        raise SchemaError(f"unknown figure kind {spec.kind!r}; choose from {', '.join(KINDS)}")
    doc = load_summary(spec.summary)
    rows = None
    if spec.kind in ("histogram", "threshold_sweep"):
        if spec.raw is None:
            raise SchemaError(f"figure kind {spec.kind!r} needs the raw samples file")
        rows = load_raw(spec.raw)
        _check_against_summary(doc, rows, spec.raw)

    fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
    try:
        ax = fig.add_subplot(111)
        if spec.kind == "convergence":
            _convergence(ax, doc)
        elif spec.kind == "histogram":
            _histogram(ax, doc, rows)
        else:
            _threshold_sweep(ax, doc, rows)
        if spec.log_x and spec.kind != "histogram":
            ax.set_xscale("log")
        fig.tight_layout()
        fig.savefig(spec.out, format="png", metadata=dict(METADATA))
    finally:
        plt.close(fig)
    return spec.out


def _check_against_summary(doc: dict, rows: list[RawSample], raw_path: str):
    """Raw rows must describe the same experiment as the summary."""
    want = doc["config"]["statistic"]
    for row in rows:
        if row.statistic != want:
            raise SchemaError(
                f"{raw_path}: column 'statistic' holds {row.statistic!r}, "
                f"summary config says {want!r}"
            )
    grid = {float(n) for n in doc["config"]["n_grid"]}
    stray = {row.n for row in rows} - grid
    if stray:
        raise SchemaError(
            f"{raw_path}: column 'n' holds {sorted(stray)[0]!r}, "
            f"which is not on the summary grid"
        )


def _aggregates(doc: dict) -> list[tuple[float, dict]]:
    """Per-intensity blocks with at least one sample, in grid order."""
    pairs = [(float(key), block) for key, block in doc["per_n"].items()]
    pairs.sort(key=lambda p: p[0])
    kept = [(n, block) for n, block in pairs if block["mean"] is not None]
    if not kept:
        raise SchemaError("summary holds no aggregated samples to plot")
    return kept


def _title(ax, config: dict):
    ax.set_title(f"{config['statistic']}  ({config['fn']}, d={config['dim']})", fontsize=10)


def _draw_prediction(ax, prediction: dict, lo: float, hi: float):
    """Dashed line for an exact limit, shaded admissible region for bounds."""
    if not prediction.get("applicable", False):
        ax.annotate(
            "no applicable prediction", xy=(0.02, 0.97), xycoords="axes fraction",
            va="top", fontsize=8, color="dimgray",
        )
        return
    value = prediction["value"]
    claim = prediction["claim"]
    if claim == "exact_limit":
        ax.axhline(value, color="crimson", lw=1.2, ls="--", label=f"predicted limit {value:.4g}")
        return
    if claim == "band":
        low, high = prediction["band"]
        ax.axhspan(low, high, color="crimson", alpha=0.12,
                   label=f"predicted band [{low:.4g}, {high:.4g}]")
        return
    pad = 0.15 * max(hi - lo, abs(value), 1e-9)
    if claim == "upper_bound":
        ax.axhspan(min(lo, value) - pad, value, color="crimson", alpha=0.12,
                   label=f"upper bound {value:.4g}")
    else:
        ax.axhspan(value, max(hi, value) + pad, color="crimson", alpha=0.12,
                   label=f"lower bound {value:.4g}")


def _convergence(ax, doc: dict):
    config = doc["config"]
    ns, means, halves = [], [], []
    for n, block in _aggregates(doc):
        ns.append(n)
        means.append(block["mean"])
        ci = block["ci95"]
        halves.append(ci[1] - block["mean"] if ci is not None else 0.0)
    ax.errorbar(ns, means, yerr=halves, fmt="o-", lw=1.0, ms=4, capsize=3,
                color="steelblue", label="sample mean (95% CI)")
    spread = [m - h for m, h in zip(means, halves)] + [m + h for m, h in zip(means, halves)]
    _draw_prediction(ax, doc["prediction"], min(spread), max(spread))
    ax.set_xlabel("intensity n")
    ax.set_ylabel(config["statistic"])
    _title(ax, config)
    ax.legend(loc="best", fontsize=8)


def _histogram(ax, doc: dict, rows: list[RawSample]):
    config = doc["config"]
    at = max(row.n for row in rows)
    values = [row.value for row in rows if row.n == at]
    integral = all(abs(v - round(v)) < 1e-9 for v in values)
    if integral:
        lo, hi = int(min(values)), int(max(values))
        edges = [k - 0.5 for k in range(lo, hi + 2)]
    else:
        bins = max(5, round(math.sqrt(len(values))))
        edges = bins
    ax.hist(values, bins=edges, density=True, color="steelblue", alpha=0.75,
            edgecolor="white", label=f"{len(values)} replications at n={at:g}")
    prediction = doc["prediction"]
    if config["statistic"] == "isolated_mean" and prediction.get("applicable", False):
        lam = prediction["value"]
        ks = list(range(0, max(int(max(values)), 3) + 2))
        pmf = [math.exp(-lam) * lam**k / math.factorial(k) for k in ks]
        ax.plot(ks, pmf, "o--", color="crimson", ms=4, lw=1.0,
                label=f"Poisson({lam:.4g}) mass")
    ax.set_xlabel(config["statistic"])
    ax.set_ylabel("relative frequency")
    _title(ax, config)
    ax.legend(loc="best", fontsize=8)


def _threshold_sweep(ax, doc: dict, rows: list[RawSample]):
    config = doc["config"]
    paths = defaultdict(list)
    for row in rows:
        paths[row.replication].append((row.n, row.value))
    first = True
    for rep in sorted(paths):
        walk = sorted(paths[rep])
        ax.plot([n for n, _ in walk], [v for _, v in walk], color="lightsteelblue",
                lw=0.6, alpha=0.7, label="trajectories" if first else None)
        first = False
    ns, medians = [], []
    for n, block in _aggregates(doc):
        ns.append(n)
        medians.append(block["median"])
    ax.plot(ns, medians, "o-", color="midnightblue", lw=1.6, ms=5, label="median")
    values = [row.value for row in rows]
    _draw_prediction(ax, doc["prediction"], min(values), max(values))
    ax.set_xlabel("intensity n")
    ax.set_ylabel(config["statistic"])
    _title(ax, config)
    ax.legend(loc="best", fontsize=8)
