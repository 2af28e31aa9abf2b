"""Brute-force reference implementations and the cross-check suite.

Everything here recomputes graph quantities from first principles: all
pairs, periodic distance by explicit image enumeration, connectivity by
a hand-rolled union-find, thresholds by bisection on monotone indicator
counts.  None of it shares code with the cell-grid engine, so agreement
between the two routes is meaningful evidence rather than a tautology.

Small instances only; everything is quadratic or worse by design.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .connection import ConnectionFunction, alpha, format_connection, g_eval
from .engine import (
    EXACT,
    BuildMode,
    build_graph,
    connectivity_threshold,
    count_isolated_at,
    is_connected_at,
    isolation_threshold,
    longest_edge_value,
)
from .ensemble import CoupledEnsemble


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.sets = n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.sets -= 1
        return True


def periodic_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Torus distance by trying every neighboring image explicitly."""
    best = math.inf
    for offset in itertools.product((-1.0, 0.0, 1.0), repeat=len(x)):
        best = min(best, float(np.linalg.norm(x - (y + np.asarray(offset)))))
    return best


@dataclass
class PairTable:
    """Cached per-pair data for one realization: distances and levels."""

    ids: np.ndarray
    points: np.ndarray
    first: np.ndarray  # positions, first < second
    second: np.ndarray
    dist: np.ndarray
    level: np.ndarray


def pair_table(ens: CoupledEnsemble, n: float) -> PairTable:
    ids, pts = ens.points_up_to(n)
    N = len(ids)
    first, second, dist, level = [], [], [], []
    for i in range(N):
        for j in range(i + 1, N):
            first.append(i)
            second.append(j)
            dist.append(periodic_distance(pts[i], pts[j]))
            level.append(ens.pair_uniform(int(ids[i]), int(ids[j])))
    return PairTable(
        ids,
        pts,
        np.asarray(first, dtype=np.int64),
        np.asarray(second, dtype=np.int64),
        np.asarray(dist),
        np.asarray(level),
    )


def edge_mask(table: PairTable, fn: ConnectionFunction, r: float) -> np.ndarray:
    if r <= 0.0:
        return np.zeros(len(table.dist), dtype=bool)
    return table.level <= g_eval(fn, table.dist / r)


def isolated_vertices(table: PairTable, fn: ConnectionFunction, r: float) -> int:
    touched = np.zeros(len(table.ids), dtype=bool)
    mask = edge_mask(table, fn, r)
    touched[table.first[mask]] = True
    touched[table.second[mask]] = True
    return int(len(table.ids) - touched.sum())


def connected(table: PairTable, fn: ConnectionFunction, r: float) -> bool:
    N = len(table.ids)
    if N <= 1:
        return True
    uf = UnionFind(N)
    mask = edge_mask(table, fn, r)
    for i, j in zip(table.first[mask], table.second[mask]):
        uf.union(int(i), int(j))
        if uf.sets == 1:
            return True
    return uf.sets == 1


def longest_edge_length(table: PairTable, fn: ConnectionFunction, r: float) -> float:
    mask = edge_mask(table, fn, r)
    return float(table.dist[mask].max()) if mask.any() else 0.0


def degree_vector(table: PairTable, fn: ConnectionFunction, r: float) -> np.ndarray:
    deg = np.zeros(len(table.ids), dtype=np.int64)
    mask = edge_mask(table, fn, r)
    np.add.at(deg, table.first[mask], 1)
    np.add.at(deg, table.second[mask], 1)
    return deg


def _bisect_radius(predicate, hi_start: float, rel: float = 1e-12) -> float:
    """Smallest r with predicate(r) true, for predicates monotone in r."""
    hi = hi_start
    for _ in range(200):
        if predicate(hi):
            break
        hi *= 2.0
    else:
        return math.inf
    lo = 0.0
    while hi - lo > rel * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def threshold_no_isolated(table: PairTable, fn: ConnectionFunction) -> float:
    if len(table.ids) < 2:
        return math.inf if len(table.ids) == 1 else 0.0
    return _bisect_radius(lambda r: isolated_vertices(table, fn, r) == 0, 0.25)


def threshold_connected(table: PairTable, fn: ConnectionFunction) -> float:
    if len(table.ids) <= 1:
        return 0.0
    return _bisect_radius(lambda r: connected(table, fn, r), 0.25)


# -- the cross-check suite ----------------------------------------------

SUITE_CONNECTIONS = ("indicator", "scaled_indicator:0.6", "exp:1", "pow:5", "gauss")


@dataclass
class SuiteReport:
    cases: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _expect(report: SuiteReport, condition: bool, message: str):
    report.checks += 1
    if not condition:
        report.failures.append(message)


def _radii_for(fn: ConnectionFunction, d: int, n: float) -> list[float]:
    base = (math.log(n) / (alpha(fn, d) * n)) ** (1.0 / d)
    return [base * factor for factor in (0.35, 0.7, 1.0, 1.4, 2.2)]


def check_instance(seed: int, fn: ConnectionFunction, n: float, d: int, report: SuiteReport):
    """Compare every engine route against the brute-force one on one draw."""
    ens = CoupledEnsemble(seed, d)
    table = pair_table(ens, n)
    tag = f"seed={seed} g={format_connection(fn)}"
    trunc = BuildMode("truncated", eps=1e-6)
    for r in _radii_for(fn, d, n):
        label = f"{tag} r={r:.6g}"
        snap = build_graph(ens, fn, n, r, EXACT)
        want = edge_mask(table, fn, r)
        got = {(int(a), int(b)) for a, b in snap.edges}
        expect = {
            (int(table.ids[i]), int(table.ids[j]))
            for i, j in zip(table.first[want], table.second[want])
        }
        _expect(report, got == expect, f"{label}: edge sets differ")
        _expect(
            report,
            np.array_equal(snap.degrees, degree_vector(table, fn, r)),
            f"{label}: degree vectors differ",
        )
        iso_direct = isolated_vertices(table, fn, r)
        _expect(
            report,
            int(np.count_nonzero(snap.degrees == 0)) == iso_direct,
            f"{label}: isolated counts differ",
        )
        fast_iso, _ = count_isolated_at(ens, fn, n, r, trunc)
        _expect(report, fast_iso == iso_direct, f"{label}: staged isolated count differs")
        conn_direct = connected(table, fn, r)
        fast_conn, conn_bound = is_connected_at(ens, fn, n, r, trunc)
        _expect(
            report,
            fast_conn == conn_direct or (not fast_conn and conn_bound > 0.0),
            f"{label}: connectivity verdicts differ beyond certificate",
        )
        if fast_conn:
            _expect(report, conn_direct, f"{label}: connected verdict not confirmed")
        long_direct = longest_edge_length(table, fn, r)
        long_fast, _ = longest_edge_value(ens, fn, n, r, EXACT)
        _expect(
            report,
            math.isclose(long_fast, long_direct, rel_tol=0.0, abs_tol=1e-12),
            f"{label}: longest-edge values differ",
        )
        # snapshot truncation must only drop pairs beyond the cutoff
        tsnap = build_graph(ens, fn, n, r, BuildMode("truncated", eps=1e-3))
        tgot = {(int(a), int(b)) for a, b in tsnap.edges}
        far_mask = table.dist > tsnap.cutoff
        far = {
            (int(table.ids[i]), int(table.ids[j]))
            for i, j in zip(table.first[far_mask], table.second[far_mask])
        }
        _expect(report, tgot <= expect, f"{label}: truncated build invented edges")
        _expect(
            report,
            (expect - tgot) <= far,
            f"{label}: truncated build dropped a pair inside its cutoff",
        )
    for mode in (EXACT, trunc):
        mode_tag = f"{tag} mode={mode.kind}"
        iso = isolation_threshold(ens, fn, n, mode)
        direct_iso = threshold_no_isolated(table, fn)
        _expect(
            report,
            math.isclose(iso.value, direct_iso, rel_tol=1e-9, abs_tol=1e-9),
            f"{mode_tag}: isolation thresholds differ "
            f"(engine {iso.value!r}, direct {direct_iso!r})",
        )
        conn = connectivity_threshold(ens, fn, n, mode)
        direct_conn = threshold_connected(table, fn)
        _expect(
            report,
            math.isclose(conn.value, direct_conn, rel_tol=1e-9, abs_tol=1e-9),
            f"{mode_tag}: connectivity thresholds differ "
            f"(engine {conn.value!r}, direct {direct_conn!r})",
        )
        _expect(
            report,
            conn.value >= iso.value - 1e-12 * max(1.0, iso.value),
            f"{mode_tag}: connectivity threshold below isolation threshold",
        )
    if math.isfinite(iso.value) and iso.value > 0.0:
        nudge = 1e-9 * iso.value
        below, _ = count_isolated_at(ens, fn, n, iso.value - nudge, trunc)
        at, _ = count_isolated_at(ens, fn, n, iso.value + nudge, trunc)
        _expect(report, below >= 1, f"{tag}: no isolated vertex just below the threshold")
        _expect(report, at == 0, f"{tag}: isolated vertex persists just above the threshold")
    report.cases += 1


def run_suite(seeds=range(100), n: float = 50.0, d: int = 2) -> SuiteReport:
    """Rotate the built-in connection functions across seeded instances."""
    from .connection import parse_connection

    report = SuiteReport()
    catalog = [parse_connection(text) for text in SUITE_CONNECTIONS]
    for k, seed in enumerate(seeds):
        check_instance(int(seed), catalog[k % len(catalog)], n, d, report)
    return report
