"""Graph engine checks: builds, truncation certificates, thresholds.

Small intensities throughout so the brute-force routes stay instant;
the scaling behavior is exercised by the acceptance suite instead.
"""

import math

import numpy as np
import pytest

from rcmlab.connection import (
    exponential,
    gaussian,
    indicator,
    parse_connection,
    power_law,
    scaled_indicator,
)
from rcmlab.engine import (
    EXACT,
    BuildMode,
    build_graph,
    component_count,
    connectivity_threshold,
    count_isolated_at,
    degree_stats,
    format_mode,
    incident_longest_edge,
    is_connected,
    is_connected_at,
    isolated_count,
    isolation_threshold,
    longest_edge,
    longest_edge_at,
    longest_edge_value,
    parse_mode,
)
from rcmlab.ensemble import CoupledEnsemble
from rcmlab.oracle import (
    connected,
    degree_vector,
    edge_mask,
    isolated_vertices,
    pair_table,
)

FNS = [indicator(), exponential(1.0), power_law(5.0), gaussian(), scaled_indicator(0.6)]

TRUNC = BuildMode("truncated", eps=1e-6)


def edge_set(graph):
    return {(int(a), int(b)) for a, b in graph.edges}


def table_edges(table, fn, r):
    mask = edge_mask(table, fn, r)
    return {
        (int(table.ids[i]), int(table.ids[j]))
        for i, j in zip(table.first[mask], table.second[mask])
    }


def radii(fn, n, d=2):
    base = (math.log(n) / n) ** (1.0 / d)
    return [base * f for f in (0.3, 0.7, 1.1, 1.8)]


def test_exact_build_matches_brute_force():
    for seed in range(10):
        fn = FNS[seed % len(FNS)]
        ens = CoupledEnsemble(seed, 2)
        table = pair_table(ens, 40.0)
        for r in radii(fn, 40.0):
            graph = build_graph(ens, fn, 40.0, r, EXACT)
            assert edge_set(graph) == table_edges(table, fn, r)
            assert np.array_equal(graph.degrees, degree_vector(table, fn, r))


def test_edges_monotone_in_radius():
    for seed in range(12):
        fn = FNS[seed % len(FNS)]
        ens = CoupledEnsemble(seed + 100, 2)
        previous = set()
        for r in sorted(radii(fn, 60.0)):
            current = edge_set(build_graph(ens, fn, 60.0, r, EXACT))
            assert previous <= current
            previous = current


def test_rgg_complete_beyond_diameter():
    ens = CoupledEnsemble(3, 2)
    graph = build_graph(ens, indicator(), 25.0, 0.9, EXACT)
    N = len(graph.ids)
    assert len(graph.edges) == N * (N - 1) // 2
    assert isolated_count(graph) == 0
    assert is_connected(graph)
    stats = degree_stats(graph, levels=(1, N - 1, N))
    assert stats.max_degree == stats.min_degree == N - 1
    assert stats.at_least[1.0] == N and stats.at_least[float(N)] == 0


def test_zero_radius_is_empty():
    ens = CoupledEnsemble(4, 3)
    graph = build_graph(ens, gaussian(), 30.0, 0.0, EXACT)
    assert len(graph.edges) == 0
    assert isolated_count(graph) == len(graph.ids)
    assert longest_edge(graph) == 0.0
    assert component_count(graph) == len(graph.ids)


def test_truncated_build_drops_nothing_observable():
    # expected omissions across all builds is under 1e-4, so any observed
    # discrepancy indicates a bookkeeping bug rather than bad luck
    missing = 0
    for seed in range(25):
        fn = FNS[seed % len(FNS)]
        ens = CoupledEnsemble(seed + 300, 2)
        for r in radii(fn, 50.0)[1:3]:
            exact = edge_set(build_graph(ens, fn, 50.0, r, EXACT))
            trunc = build_graph(ens, fn, 50.0, r, BuildMode("truncated", eps=1e-3))
            assert trunc.certified_bound <= 1e-3
            truncated = edge_set(trunc)
            assert truncated <= exact
            missing += len(exact - truncated)
    assert missing == 0


def test_refusal_reports_minimal_cutoff():
    ens = CoupledEnsemble(11, 2)
    fn = exponential(1.0)
    with pytest.raises(ValueError, match="admissible"):
        build_graph(ens, fn, 200.0, 0.08, BuildMode("truncated", eps=1e-9, cutoff=0.1))


def test_exact_mode_refuses_oversized_instances():
    ens = CoupledEnsemble(12, 2)
    with pytest.raises(ValueError, match="exact mode"):
        build_graph(ens, gaussian(), 400.0, 0.05, EXACT, exact_cap=100)
    with pytest.raises(ValueError, match="exact mode"):
        isolation_threshold(ens, gaussian(), 400.0, EXACT, exact_cap=100)
    with pytest.raises(ValueError, match="exact mode"):
        connectivity_threshold(ens, gaussian(), 400.0, EXACT, exact_cap=100)


def test_mode_spellings():
    assert parse_mode("exact").kind == "exact"
    assert parse_mode("trunc:1e-4").eps == 1e-4
    assert format_mode(parse_mode("trunc:0.001")) == "trunc:0.001"
    assert parse_mode(format_mode(EXACT)) == EXACT
    for bad in ("trunc", "trunc:", "trunc:frog", "approximate", ""):
        with pytest.raises(ValueError):
            parse_mode(bad)
    with pytest.raises(ValueError):
        BuildMode("truncated", eps=0.0)
    with pytest.raises(ValueError):
        BuildMode("truncated", cutoff=-1.0)


def test_degree_sum_is_twice_edge_count():
    for seed in range(8):
        fn = FNS[seed % len(FNS)]
        ens = CoupledEnsemble(seed + 40, 2)
        for r in radii(fn, 45.0):
            graph = build_graph(ens, fn, 45.0, r, EXACT)
            assert graph.degrees.sum() == 2 * len(graph.edges)
            assert len(graph.edge_lengths) == len(graph.edges)
            if len(graph.edges):
                assert graph.edge_lengths.max() == longest_edge(graph)


def test_staged_routes_match_full_builds():
    for seed in range(15):
        fn = FNS[seed % len(FNS)]
        ens = CoupledEnsemble(seed + 500, 2)
        for r in radii(fn, 55.0):
            graph = build_graph(ens, fn, 55.0, r, EXACT)
            fast_iso, iso_bound = count_isolated_at(ens, fn, 55.0, r, TRUNC)
            assert fast_iso == isolated_count(graph)
            assert iso_bound <= 1e-6
            fast_conn, _ = is_connected_at(ens, fn, 55.0, r, TRUNC)
            assert fast_conn == is_connected(graph)
            fast_long, _ = longest_edge_value(ens, fn, 55.0, r, EXACT)
            assert fast_long == longest_edge(graph)


def test_isolation_threshold_flips_isolation():
    for seed in range(12):
        fn = FNS[seed % 4]  # scaled_indicator handled separately below
        ens = CoupledEnsemble(seed + 700, 2)
        res = isolation_threshold(ens, fn, 45.0, EXACT)
        assert not res.infinite
        nudge = 1e-9 * res.value
        below, _ = count_isolated_at(ens, fn, 45.0, res.value - nudge, EXACT)
        above, _ = count_isolated_at(ens, fn, 45.0, res.value + nudge, EXACT)
        assert below >= 1
        assert above == 0


def test_connectivity_threshold_flips_connectivity():
    for seed in range(12):
        fn = FNS[seed % 4]
        ens = CoupledEnsemble(seed + 900, 2)
        res = connectivity_threshold(ens, fn, 45.0, EXACT)
        assert not res.infinite
        nudge = 1e-9 * res.value
        below, _ = is_connected_at(ens, fn, 45.0, res.value - nudge, EXACT)
        above, _ = is_connected_at(ens, fn, 45.0, res.value + nudge, EXACT)
        assert not below
        assert above


def test_connectivity_dominates_isolation():
    for seed in range(15):
        fn = FNS[seed % 4]
        ens = CoupledEnsemble(seed + 1100, 2)
        iso = isolation_threshold(ens, fn, 40.0, EXACT)
        conn = connectivity_threshold(ens, fn, 40.0, EXACT)
        assert conn.value >= iso.value - 1e-12


def test_rgg_threshold_is_extreme_nearest_neighbor():
    # with an indicator connection every pair level passes, so the
    # isolation threshold reduces to the largest nearest-neighbor distance
    for seed in range(6):
        ens = CoupledEnsemble(seed + 1300, 2)
        table = pair_table(ens, 35.0)
        N = len(table.ids)
        nearest = np.full(N, np.inf)
        np.minimum.at(nearest, table.first, table.dist)
        np.minimum.at(nearest, table.second, table.dist)
        res = isolation_threshold(ens, indicator(), 35.0, EXACT)
        assert math.isclose(res.value, float(nearest.max()), rel_tol=1e-12)


def test_exponential_threshold_closed_form():
    for seed in range(6):
        ens = CoupledEnsemble(seed + 1400, 2)
        c = 1.5
        table = pair_table(ens, 30.0)
        N = len(table.ids)
        rho = c * table.dist / (-np.log(table.level))
        best = np.full(N, np.inf)
        np.minimum.at(best, table.first, rho)
        np.minimum.at(best, table.second, rho)
        res = isolation_threshold(ens, exponential(c), 30.0, EXACT)
        assert math.isclose(res.value, float(best.max()), rel_tol=1e-12)


def test_two_point_threshold_is_the_pair_radius():
    found = 0
    for seed in range(200):
        ens = CoupledEnsemble(seed + 1500, 2)
        ids, _ = ens.points_up_to(2.0)
        if len(ids) != 2:
            continue
        found += 1
        table = pair_table(ens, 2.0)
        rho = float(1.0 * table.dist[0] / (-math.log(table.level[0])))
        iso = isolation_threshold(ens, exponential(1.0), 2.0, EXACT)
        conn = connectivity_threshold(ens, exponential(1.0), 2.0, EXACT)
        assert math.isclose(iso.value, rho, rel_tol=1e-12)
        assert math.isclose(conn.value, rho, rel_tol=1e-12)
        if found >= 5:
            break
    assert found >= 5


def test_unreachable_vertices_give_infinite_thresholds():
    # with g(0) = 1e-6 nearly every pair level exceeds the ceiling, so
    # some vertex has no finite critical radius at this tiny intensity
    fn = scaled_indicator(1e-6)
    ens = CoupledEnsemble(21, 2)
    iso = isolation_threshold(ens, fn, 6.0, EXACT)
    conn = connectivity_threshold(ens, fn, 6.0, EXACT)
    assert iso.infinite and math.isinf(iso.value)
    assert conn.infinite and math.isinf(conn.value)


def test_degenerate_point_counts():
    for seed in range(300):
        ens = CoupledEnsemble(seed + 1700, 2)
        ids, _ = ens.points_up_to(0.4)
        if len(ids) == 1:
            res = isolation_threshold(ens, indicator(), 0.4, EXACT)
            assert res.infinite
            conn = connectivity_threshold(ens, indicator(), 0.4, EXACT)
            assert conn.value == 0.0 and not conn.infinite
            graph = build_graph(ens, indicator(), 0.4, 0.3, EXACT)
            assert isolated_count(graph) == 1
            break
    else:
        pytest.fail("no singleton realization found")


def test_incident_longest_edge_matches_snapshot():
    for seed in range(8):
        fn = FNS[seed % len(FNS)]
        ens = CoupledEnsemble(seed + 1900, 2, palm=True)
        r = radii(fn, 40.0)[2]
        graph = build_graph(ens, fn, 40.0, r, EXACT)
        assert math.isclose(
            incident_longest_edge(ens, fn, 40.0, r, 0),
            longest_edge_at(graph, 0),
            rel_tol=0.0,
            abs_tol=1e-15,
        )
    with pytest.raises(ValueError, match="not present"):
        incident_longest_edge(CoupledEnsemble(5, 2), indicator(), 10.0, 0.1, 10**9)


def test_palm_origin_statistics():
    ens = CoupledEnsemble(31, 2, palm=True)
    assert np.allclose(ens.point(0), 0.0)
    fn = exponential(1.0)
    graph = build_graph(ens, fn, 50.0, 0.2, EXACT)
    table = pair_table(ens, 50.0)
    origin = 0
    mask = edge_mask(table, fn, 0.2)
    incident = [
        float(table.dist[k])
        for k in np.nonzero(mask)[0]
        if origin in (int(table.ids[table.first[k]]), int(table.ids[table.second[k]]))
    ]
    want = max(incident) if incident else 0.0
    assert math.isclose(longest_edge_at(graph, 0), want, rel_tol=0.0, abs_tol=1e-15)


def test_connected_verdicts_agree_with_brute_force():
    for seed in range(10):
        fn = FNS[seed % len(FNS)]
        ens = CoupledEnsemble(seed + 2100, 2)
        table = pair_table(ens, 45.0)
        for r in radii(fn, 45.0):
            verdict, bound = is_connected_at(ens, fn, 45.0, r, TRUNC)
            want = connected(table, fn, r)
            if verdict:
                assert want  # connected verdicts are exact
            else:
                assert (not want) or bound > 0.0
            fast, _ = count_isolated_at(ens, fn, 45.0, r, TRUNC)
            assert fast == isolated_vertices(table, fn, r)
