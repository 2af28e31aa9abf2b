"""Readers for the result files the simulation harness persists.

Two artifacts arrive together: `<stem>.raw.csv` with one row per
(statistic, n, replication, value) sample, and `<stem>.summary.json`
with the configuration echo, the prediction block, and per-intensity
aggregates.  Everything validates before it returns; a figure built
from a half-parsed file helps nobody, so the first mismatch raises
with the offending field, column, or line number in the message.
"""

import csv
import json
from dataclasses import dataclass

RAW_HEADER = ("statistic", "n", "replication", "value")
SUMMARY_FIELDS = ("config", "prediction", "per_n", "version")
CONFIG_FIELDS = ("statistic", "fn", "dim", "n_grid", "replications", "seed", "mode")
BLOCK_FIELDS = ("count", "mean", "median", "variance", "se", "ci95", "skipped")

__all__ = [
    "RAW_HEADER",
    "RawSample",
    "SchemaError",
    "load_raw",
    "load_summary",
]


class SchemaError(ValueError):
    """An input file does not match the persisted-result schema."""


@dataclass(frozen=True)
class RawSample:
    statistic: str
    n: float
    replication: int
    value: float


def load_summary(path: str) -> dict:
    """Parse a summary JSON document and check every field a figure needs."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object at the top level")
    for name in SUMMARY_FIELDS:
        if name not in doc:
            raise SchemaError(f"{path}: missing summary field {name!r}")

    config = doc["config"]
    if not isinstance(config, dict):
        raise SchemaError(f"{path}: field 'config' must be an object")
    for name in CONFIG_FIELDS:
        if name not in config:
            raise SchemaError(f"{path}: missing config field 'config.{name}'")

    prediction = doc["prediction"]
    if not isinstance(prediction, dict) or "applicable" not in prediction:
        raise SchemaError(f"{path}: field 'prediction.applicable' is required")
    if prediction["applicable"]:
        for name in ("value", "claim"):
            if name not in prediction:
                raise SchemaError(f"{path}: missing prediction field 'prediction.{name}'")
        if prediction["claim"] == "band" and "band" not in prediction:
            raise SchemaError(f"{path}: missing prediction field 'prediction.band'")

    per_n = doc["per_n"]
    if not isinstance(per_n, dict) or not per_n:
        raise SchemaError(f"{path}: field 'per_n' must be a non-empty object")
    for key, block in per_n.items():
        try:
            float(key)
        except ValueError as exc:
            raise SchemaError(f"{path}: per-n key {key!r} is not an intensity") from exc
        if not isinstance(block, dict):
            raise SchemaError(f"{path}: field 'per_n.{key}' must be an object")
        for name in BLOCK_FIELDS:
            if name not in block:
                raise SchemaError(f"{path}: missing aggregate field 'per_n.{key}.{name}'")
    return doc


def load_raw(path: str) -> list[RawSample]:
    """Parse the raw CSV; every complaint names the offending line."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file, expected header {','.join(RAW_HEADER)}")
        if tuple(header) != RAW_HEADER:
            for got, want in zip(header, RAW_HEADER):
                if got != want:
                    raise SchemaError(f"{path}: header column {got!r} should be {want!r}")
            raise SchemaError(
                f"{path}: header has {len(header)} columns, expected {len(RAW_HEADER)}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RAW_HEADER):
                raise SchemaError(
                    f"{path}:{lineno}: expected {len(RAW_HEADER)} fields, got {len(row)}"
                )
            try:
                rows.append(RawSample(row[0], float(row[1]), int(row[2]), float(row[3])))
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no samples after the header")
    return rows
