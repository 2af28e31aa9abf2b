"""Factories that write small synthetic result files.

The renderer consumes only persisted files, so the tests fabricate
files with the same shape the harness writes: a raw CSV of samples
and a summary JSON with config echo, prediction, and per-intensity
aggregates kept consistent with the samples.
"""

import csv
import json
import statistics

import pytest


def _block(values):
    count = len(values)
    mean = statistics.fmean(values) if count else None
    out = {"count": count, "mean": mean, "median": None, "variance": None,
           "se": None, "ci95": None, "skipped": 0}
    if count:
        out["median"] = float(statistics.median(values))
    if count > 1:
        var = statistics.variance(values)
        se = (var / count) ** 0.5
        out.update(variance=var, se=se, ci95=[mean - 1.96 * se, mean + 1.96 * se])
    return out


@pytest.fixture
def make_files(tmp_path):
    """Write a consistent (summary, raw) pair; returns both paths."""

    def _make(statistic="isolated_mean", fn="exp:1", dim=2, ns=(200.0, 400.0),
              reps=8, seed=3, b=0.0, prediction=None, value_of=None, stem="case"):
        if value_of is None:
            value_of = lambda n, rep: float((rep + int(n)) % 3)
        raw_path = tmp_path / f"{stem}.raw.csv"
        with open(raw_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["statistic", "n", "replication", "value"])
            for n in ns:
                for rep in range(reps):
                    writer.writerow([statistic, repr(float(n)), rep, repr(value_of(n, rep))])
        per_n = {
            repr(float(n)): _block([value_of(n, rep) for rep in range(reps)]) for n in ns
        }
        doc = {
            "config": {"statistic": statistic, "fn": fn, "dim": dim,
                       "n_grid": [float(n) for n in ns], "replications": reps,
                       "seed": seed, "mode": "trunc:0.001", "b": b},
            "prediction": prediction
            or {"applicable": True, "value": 1.0, "claim": "exact_limit"},
            "per_n": per_n,
            "version": "0.1.0",
        }
        summary_path = tmp_path / f"{stem}.summary.json"
        with open(summary_path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return str(summary_path), str(raw_path)

    return _make
