"""Graph realizations and threshold functionals over a coupled ensemble.

The edge rule is the direct evaluation U_ij <= g(delta_ij / r): it is
authoritative everywhere, including on plateaus of g where an edge holds
at exactly the plateau boundary.  The equivalent critical-radius form
rho_ij = delta_ij / s*(U_ij) (infinite when s* = 0) encodes the whole
coupled family at once and drives the threshold computations.

Two build disciplines exist.  Exact mode inspects every pair, either
literally or through the support bound when g vanishes beyond a finite
scaled distance, and refuses beyond EXACT_PAIR_LIMIT points otherwise.
Truncated mode restricts attention to pairs at distance <= L and carries
the certificate

    expected omitted edges <= (N^2 / 2) r^d tail_mass(g, d, L / r),

which must not exceed the configured budget eps.  Per-vertex variants of
the same bound let the adaptive threshold search stop expanding a vertex
once its current minimum cannot plausibly shrink.

Connectivity verdicts are asymmetric: a graph seen connected from a
partial edge set stays connected under more edges, so only disconnected
verdicts lean on the certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _sparse_components

from .connection import (
    ConnectionFunction,
    alpha,
    cutoff_for,
    g_eval,
    inverse_radius,
    tail_class,
    tail_mass,
    tail_mass_vec,
)

__all__ = [
    "EXACT",
    "EXACT_PAIR_LIMIT",
    "BuildMode",
    "DegreeStats",
    "GraphSnapshot",
    "ThresholdResult",
    "build_graph",
    "component_count",
    "connectivity_threshold",
    "count_isolated_at",
    "degree_stats",
    "format_mode",
    "incident_longest_edge",
    "is_connected",
    "is_connected_at",
    "isolated_count",
    "isolation_threshold",
    "longest_edge",
    "longest_edge_at",
    "longest_edge_value",
    "parse_mode",
]
from .ensemble import CoupledEnsemble
from .geometry import CellGrid

# Exact all-pair scans refuse beyond this many points (override per call).
EXACT_PAIR_LIMIT = 30_000


@dataclass(frozen=True)
class BuildMode:
    """How far pair enumeration reaches.

    kind "exact" inspects all pairs; "truncated" stops at an explicit or
    certificate-derived cutoff distance and accounts for the rest with a
    tail bound no larger than eps.
    """

    kind: str = "truncated"
    eps: float = 1e-3
    cutoff: float | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "truncated"):
            raise ValueError(f"build mode must be exact or truncated, got {self.kind!r}")
        if not (self.eps > 0.0):
            raise ValueError(f"truncation budget must be positive, got {self.eps}")
        if self.cutoff is not None and not (self.cutoff > 0.0):
            raise ValueError(f"cutoff must be positive when given, got {self.cutoff}")


EXACT = BuildMode("exact")


def parse_mode(text: str) -> BuildMode:
    """Parse the CLI spelling: ``exact`` or ``trunc:<eps>``."""
    if text == "exact":
        return BuildMode("exact")
    name, sep, arg = text.partition(":")
    if name == "trunc" and sep:
        try:
            return BuildMode("truncated", eps=float(arg))
        except ValueError as exc:
            raise ValueError(f"bad build mode {text!r}: {exc}") from None
    raise ValueError(f"bad build mode {text!r}; expected exact or trunc:<eps>")


def format_mode(mode: BuildMode) -> str:
    return "exact" if mode.kind == "exact" else f"trunc:{mode.eps:g}"


@dataclass
class GraphSnapshot:
    """One realized graph: vertices, edges with lengths, and provenance."""

    fn: ConnectionFunction
    dim: int
    n: float
    r: float
    ids: np.ndarray
    points: np.ndarray
    edges: np.ndarray  # (M, 2) vertex ids, first < second
    edge_lengths: np.ndarray
    degrees: np.ndarray
    mode: BuildMode
    cutoff: float
    certified_bound: float


@dataclass(frozen=True)
class ThresholdResult:
    value: float
    certified_bound: float
    infinite: bool = False


@dataclass(frozen=True)
class DegreeStats:
    max_degree: int
    min_degree: int
    at_least: dict = field(default_factory=dict)


def _diameter(d: int) -> float:
    return math.sqrt(d) / 2.0


def _cell_size(L: float, npts: int, d: int) -> float:
    # cells at a third of the scan radius keep the candidate superset
    # tight without outnumbering ~2x the points
    sparse = (1.0 / max(2 * npts, 8)) ** (1.0 / d)
    return max(L / 3.0, sparse, 1e-9)


def _axis_views(pts: np.ndarray) -> list[np.ndarray]:
    return [np.ascontiguousarray(pts[:, k]) for k in range(pts.shape[1])]


def _pair_dist2(axes: list[np.ndarray], ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
    d2 = None
    for ax in axes:
        w = ax[ii]
        w -= ax[jj]
        np.abs(w, out=w)
        flip = 1.0 - w
        np.minimum(w, flip, out=w)
        w *= w
        if d2 is None:
            d2 = w
        else:
            d2 += w
    return d2


def _edge_chunks(ens, fn, ids, pts, r, L, grid=None):
    """Yield realized edges (pos_i, pos_j, length) with length <= L, each once."""
    if len(ids) < 2 or r <= 0.0 or L <= 0.0:
        return
    if grid is None:
        grid = CellGrid(pts, _cell_size(L, len(ids), pts.shape[1]))
    axes = _axis_views(pts)
    L2 = L * L
    for ii, jj in grid.pair_chunks(L):
        d2 = _pair_dist2(axes, ii, jj)
        keep = d2 <= L2
        if not keep.any():
            continue
        ii, jj = ii[keep], jj[keep]
        length = np.sqrt(d2[keep])
        u = ens.pair_uniforms_ordered(ids[ii], ids[jj])
        hit = u <= g_eval(fn, length / r)
        if hit.any():
            yield ii[hit], jj[hit], length[hit]


def _incident_edge_chunks(ens, fn, ids, pts, grid, q_pos, r, L):
    """Yield realized edges (q_pos, other_pos, length) for a vertex subset."""
    if len(q_pos) == 0 or r <= 0.0 or L <= 0.0:
        return
    axes = _axis_views(pts)
    L2 = L * L
    for qi, pj in grid.query_chunks(pts[q_pos], L, q_index=q_pos):
        keep = qi != pj
        if not keep.any():
            continue
        qi, pj = qi[keep], pj[keep]
        d2 = _pair_dist2(axes, qi, pj)
        keep = d2 <= L2
        if not keep.any():
            continue
        qi, pj = qi[keep], pj[keep]
        length = np.sqrt(d2[keep])
        u = ens.pair_uniforms(ids[qi], ids[pj])
        hit = u <= g_eval(fn, length / r)
        if hit.any():
            yield qi[hit], pj[hit], length[hit]


def _pair_count_half(n_points: int) -> float:
    return 0.5 * n_points * n_points


def _truncation_bound(fn, d, n_points, r, L) -> float:
    if L >= _diameter(d) * (1.0 - 1e-12) or n_points < 2 or r <= 0.0:
        return 0.0
    return _pair_count_half(n_points) * r**d * tail_mass(fn, d, L / r)


def _window_for(fn, d, r, target) -> float:
    """Scan distance at scale r meeting the per-unit tail target, capped at full cover."""
    diam = _diameter(d)
    if r <= 0.0 or tail_mass(fn, d, diam / r) > target:
        return diam
    return min(r * cutoff_for(fn, d, target), diam)


def _auto_cutoff(fn, d, n_points, r, eps) -> float:
    """Smallest scan distance whose pair-level certificate fits in eps."""
    diam = _diameter(d)
    if n_points < 2 or r <= 0.0:
        return diam
    tc = tail_class(fn)
    if tc.kind == "bounded":
        return min(r * tc.support, diam)
    return _window_for(fn, d, r, eps / (_pair_count_half(n_points) * r**d))


def _resolve_cutoff(fn, d, n_points, r, mode: BuildMode, exact_cap: int):
    """Map a build mode to (scan distance, certified bound)."""
    diam = _diameter(d)
    tc = tail_class(fn)
    if mode.kind == "exact":
        L = min(r * tc.support, diam) if tc.kind == "bounded" else diam
        if L >= diam * (1.0 - 1e-12) and n_points > exact_cap:
            raise ValueError(
                f"exact mode would scan all pairs of {n_points} points "
                f"(limit {exact_cap}); use a truncated mode"
            )
        return L, 0.0
    if mode.cutoff is not None:
        L = min(mode.cutoff, diam)
        bound = _truncation_bound(fn, d, n_points, r, L)
        if bound > mode.eps:
            admissible = _auto_cutoff(fn, d, n_points, r, mode.eps)
            raise ValueError(
                f"cutoff {mode.cutoff:g} certifies an omitted-edge bound of {bound:.3g} "
                f"above the budget {mode.eps:g}; the smallest admissible cutoff is {admissible:.6g}"
            )
        return L, bound
    L = _auto_cutoff(fn, d, n_points, r, mode.eps)
    return L, _truncation_bound(fn, d, n_points, r, L)


def build_graph(
    ens: CoupledEnsemble,
    fn: ConnectionFunction,
    n: float,
    r: float,
    mode: BuildMode = EXACT,
    exact_cap: int = EXACT_PAIR_LIMIT,
) -> GraphSnapshot:
    """Materialize the graph at intensity n and radius r."""
    if not (r >= 0.0):
        raise ValueError(f"radius must be nonnegative, got {r}")
    ids, pts = ens.points_up_to(n)
    N = len(ids)
    d = ens.dim
    if N < 2 or r == 0.0:
        empty = np.empty(0, dtype=np.int64)
        return GraphSnapshot(
            fn, d, n, r, ids, pts, np.empty((0, 2), dtype=np.int64), np.empty(0),
            np.zeros(N, dtype=np.int64), mode, 0.0, 0.0,
        )
    L, bound = _resolve_cutoff(fn, d, N, r, mode, exact_cap)
    parts_i, parts_j, parts_len = [], [], []
    degrees = np.zeros(N, dtype=np.int64)
    for ii, jj, length in _edge_chunks(ens, fn, ids, pts, r, L):
        parts_i.append(ii)
        parts_j.append(jj)
        parts_len.append(length)
        degrees += np.bincount(ii, minlength=N)
        degrees += np.bincount(jj, minlength=N)
    if parts_i:
        pos_i = np.concatenate(parts_i)
        pos_j = np.concatenate(parts_j)
        edges = np.stack([ids[pos_i], ids[pos_j]], axis=1)
        lengths = np.concatenate(parts_len)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
        lengths = np.empty(0)
    return GraphSnapshot(fn, d, n, r, ids, pts, edges, lengths, degrees, mode, L, bound)


def isolated_count(graph: GraphSnapshot) -> int:
    """Number of degree-zero vertices."""
    return int(np.count_nonzero(graph.degrees == 0))


def degree_stats(graph: GraphSnapshot, levels: tuple[float, ...] = ()) -> DegreeStats:
    """Extreme degrees plus, per requested level k, the count of degree >= k."""
    if len(graph.degrees) == 0:
        return DegreeStats(0, 0, {float(k): 0 for k in levels})
    at_least = {float(k): int(np.count_nonzero(graph.degrees >= k)) for k in levels}
    return DegreeStats(int(graph.degrees.max()), int(graph.degrees.min()), at_least)


def longest_edge(graph: GraphSnapshot) -> float:
    """Length of the longest realized edge (0 for an edgeless graph)."""
    return float(graph.edge_lengths.max()) if graph.edge_lengths.size else 0.0


def longest_edge_at(graph: GraphSnapshot, vertex: int) -> float:
    """Longest edge incident to the given vertex id (0 when none)."""
    mask = (graph.edges[:, 0] == vertex) | (graph.edges[:, 1] == vertex)
    return float(graph.edge_lengths[mask].max()) if mask.any() else 0.0


def _component_count(n_vertices: int, pos_i: np.ndarray, pos_j: np.ndarray) -> int:
    if n_vertices == 0:
        return 0
    if len(pos_i) == 0:
        return n_vertices
    m = coo_matrix(
        (np.ones(len(pos_i), dtype=np.int8), (pos_i, pos_j)),
        shape=(n_vertices, n_vertices),
    )
    count, _ = _sparse_components(m, directed=False)
    return int(count)


def component_count(graph: GraphSnapshot) -> int:
    """Number of connected components (isolated vertices count singly)."""
    base = int(graph.ids[0]) if len(graph.ids) else 0
    return _component_count(len(graph.ids), graph.edges[:, 0] - base, graph.edges[:, 1] - base)


def is_connected(graph: GraphSnapshot) -> bool:
    return component_count(graph) <= 1


# -- critical radii ------------------------------------------------------


def _rho_from(fn, u: np.ndarray, length: np.ndarray) -> np.ndarray:
    """Critical radii length / s*(u), with +inf where s* vanishes."""
    s = inverse_radius(fn, u)
    out = np.full(length.shape, np.inf)
    np.divide(length, s, out=out, where=s > 0.0)
    return out


def _rho_chunks(ens, fn, ids, pts, L, grid=None):
    """Yield (pos_i, pos_j, rho) for all pairs at distance <= L, each once."""
    if len(ids) < 2 or L <= 0.0:
        return
    if grid is None:
        grid = CellGrid(pts, _cell_size(L, len(ids), pts.shape[1]))
    axes = _axis_views(pts)
    L2 = L * L
    for ii, jj in grid.pair_chunks(L):
        d2 = _pair_dist2(axes, ii, jj)
        keep = d2 <= L2
        if not keep.any():
            continue
        ii, jj = ii[keep], jj[keep]
        length = np.sqrt(d2[keep])
        u = ens.pair_uniforms_ordered(ids[ii], ids[jj])
        yield ii, jj, _rho_from(fn, u, length)


def isolation_threshold(
    ens: CoupledEnsemble,
    fn: ConnectionFunction,
    n: float,
    mode: BuildMode = BuildMode(),
    exact_cap: int = EXACT_PAIR_LIMIT,
) -> ThresholdResult:
    """Smallest radius at which no vertex is isolated.

    Computed as the largest per-vertex minimum critical radius.  The
    adaptive search widens each vertex's scan window until the per-vertex
    certificate n m_i^d tail_mass(L / m_i) drops below eps / N, so the
    total expected number of overlooked minimum-lowering pairs stays
    within eps.
    """
    ids, pts = ens.points_up_to(n)
    N = len(ids)
    d = ens.dim
    diam = _diameter(d)
    if N == 0:
        return ThresholdResult(0.0, 0.0)
    if N == 1:
        return ThresholdResult(math.inf, 0.0, infinite=True)
    exact = mode.kind == "exact"
    if exact:
        if N > exact_cap:
            raise ValueError(
                f"exact mode would scan all pairs of {N} points (limit {exact_cap}); "
                "use a truncated mode"
            )
        L = diam
    else:
        # start near the high quantiles of the per-vertex minimum
        m_ref = (2.0 / (alpha(fn, d) * n)) ** (1.0 / d)
        L = min(max(_window_for(fn, d, m_ref, (mode.eps / N) / (n * m_ref**d)), m_ref), diam)
    m = np.full(N, np.inf)
    resolved = np.zeros(N, dtype=bool)
    bound_parts = np.zeros(N)
    per_vertex_budget = mode.eps / N
    first = True
    grid = CellGrid(pts, _cell_size(L, N, d))
    while True:
        if first:
            for ii, jj, rho in _rho_chunks(ens, fn, ids, pts, L, grid=grid):
                np.minimum.at(m, ii, rho)
                np.minimum.at(m, jj, rho)
            first = False
        else:
            axes = _axis_views(pts)
            pending = np.nonzero(~resolved)[0]
            L2 = L * L
            for qi, pj in grid.query_chunks(pts[pending], L, q_index=pending):
                keep = qi != pj
                qi, pj = qi[keep], pj[keep]
                d2 = _pair_dist2(axes, qi, pj)
                keep = d2 <= L2
                qi, pj = qi[keep], pj[keep]
                u = ens.pair_uniforms(ids[qi], ids[pj])
                rho = _rho_from(fn, u, np.sqrt(d2[keep]))
                np.minimum.at(m, qi, rho)
        covered = L >= diam * (1.0 - 1e-12)
        if covered:
            newly = ~resolved
            bound_parts[newly] = 0.0
        else:
            finite = np.isfinite(m)
            cert = np.full(N, np.inf)
            scaled = np.divide(L, m, out=np.zeros(N), where=finite & (m > 0))
            cert[finite] = n * m[finite] ** d * tail_mass_vec(fn, d, scaled[finite])
            ok = finite & (cert <= per_vertex_budget) & (m > 0)
            newly = ok & ~resolved
            bound_parts[newly] = cert[newly]
        resolved |= newly
        if resolved.all():
            break
        L = min(2.0 * L, diam)
        grid = CellGrid(pts, _cell_size(L, N, d))
    top = float(m.max())
    return ThresholdResult(top, float(bound_parts.sum()), infinite=not math.isfinite(top))


def _bottleneck_radius(N, pos_i, pos_j, rho) -> float | None:
    """Max edge weight on the minimum spanning tree, or None if disconnected.

    Processes edges in increasing rho order, collapsing components after
    each block so that only component-merging edges reach the final
    one-at-a-time pass.
    """
    order = np.argsort(rho, kind="stable")
    labels = np.arange(N)
    block = 65536
    for start in range(0, len(order), block):
        sel = order[start : start + block]
        a = labels[pos_i[sel]]
        b = labels[pos_j[sel]]
        live = a != b
        if not live.any():
            continue
        m = coo_matrix(
            (np.ones(int(live.sum()), dtype=np.int8), (a[live], b[live])), shape=(N, N)
        )
        _, lab = _sparse_components(m, directed=False)
        merged = lab[labels]
        if len(np.unique(merged)) > 1:
            labels = merged
            continue
        # this block finishes the merge; replay it edge by edge
        parent = np.arange(N)

        def find(x):
            root = x
            while parent[root] != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        sets = len(np.unique(labels))
        for a_k, b_k, idx in zip(a.tolist(), b.tolist(), sel.tolist()):
            ra, rb = find(a_k), find(b_k)
            if ra == rb:
                continue
            parent[rb] = ra
            sets -= 1
            if sets == 1:
                return float(rho[idx])
        raise AssertionError("component collapse disagreed with the replay")
    return None


def connectivity_threshold(
    ens: CoupledEnsemble,
    fn: ConnectionFunction,
    n: float,
    mode: BuildMode = BuildMode(),
    exact_cap: int = EXACT_PAIR_LIMIT,
) -> ThresholdResult:
    """Smallest radius at which the graph is connected.

    This is the bottleneck of the minimum spanning tree under the pair
    weights rho: the last weight Kruskal's merge needs.  Truncation is
    accepted once the pair certificate at the found value fits eps.
    """
    ids, pts = ens.points_up_to(n)
    N = len(ids)
    d = ens.dim
    diam = _diameter(d)
    if N <= 1:
        return ThresholdResult(0.0, 0.0)
    exact = mode.kind == "exact"
    if exact and N > exact_cap:
        raise ValueError(
            f"exact mode would scan all pairs of {N} points (limit {exact_cap}); "
            "use a truncated mode"
        )
    if exact:
        L = diam
    else:
        # open with a window already certified for the anticipated value
        guess = ((math.log(max(n, 2.0)) + 3.0) / (alpha(fn, d) * n)) ** (1.0 / d)
        win = _window_for(fn, d, guess, mode.eps / (_pair_count_half(N) * guess**d))
        L = min(max(1.15 * win, 2.0 * guess), diam)
    while True:
        parts_i, parts_j, parts_rho = [], [], []
        for ii, jj, rho in _rho_chunks(ens, fn, ids, pts, L):
            finite = np.isfinite(rho)
            parts_i.append(ii[finite])
            parts_j.append(jj[finite])
            parts_rho.append(rho[finite])
        covered = L >= diam * (1.0 - 1e-12)
        if parts_i:
            pos_i = np.concatenate(parts_i)
            pos_j = np.concatenate(parts_j)
            rho = np.concatenate(parts_rho)
        else:
            pos_i = pos_j = np.empty(0, dtype=np.int64)
            rho = np.empty(0)
        value = _bottleneck_radius(N, pos_i, pos_j, rho)
        if value is None:
            if covered:
                return ThresholdResult(math.inf, 0.0, infinite=True)
            L = min(2.0 * L, diam)
            continue
        bound = 0.0 if covered else _truncation_bound(fn, d, N, value, L)
        if covered or bound <= mode.eps:
            return ThresholdResult(value, bound)
        L = min(2.0 * L, diam)


# -- staged fast paths ---------------------------------------------------


def count_isolated_at(
    ens: CoupledEnsemble,
    fn: ConnectionFunction,
    n: float,
    r: float,
    mode: BuildMode = BuildMode(),
) -> tuple[int, float]:
    """Isolated-vertex count at radius r without materializing all edges.

    Equals isolated_count(build_graph(...)) but prunes: a cheap scan over
    the bulk of the connection mass settles most vertices, and only the
    still-edgeless ones are rechecked out to the certified window.
    """
    if not (r >= 0.0):
        raise ValueError(f"radius must be nonnegative, got {r}")
    ids, pts = ens.points_up_to(n)
    N = len(ids)
    d = ens.dim
    diam = _diameter(d)
    if N == 0:
        return 0, 0.0
    if r == 0.0 or N == 1:
        return N, 0.0
    tc = tail_class(fn)
    exact = mode.kind == "exact"
    if tc.kind == "bounded":
        L_full = min(r * tc.support, diam)
        has_edge = np.zeros(N, dtype=bool)
        for ii, jj, _ in _edge_chunks(ens, fn, ids, pts, r, L_full):
            has_edge[ii] = True
            has_edge[jj] = True
        return int(N - np.count_nonzero(has_edge)), 0.0
    stage = min(r * cutoff_for(fn, d, 0.5 * alpha(fn, d)), diam)
    has_edge = np.zeros(N, dtype=bool)
    grid = CellGrid(pts, _cell_size(stage, N, d))
    for ii, jj, _ in _edge_chunks(ens, fn, ids, pts, r, stage, grid=grid):
        has_edge[ii] = True
        has_edge[jj] = True
    pending = np.nonzero(~has_edge)[0]
    if len(pending) == 0:
        return 0, 0.0
    if exact:
        L = diam
    else:
        L = _window_for(fn, d, r, mode.eps / (len(pending) * n * r**d))
    if L > stage:
        grid = CellGrid(pts, _cell_size(L, N, d))
        for qi, pj, _ in _incident_edge_chunks(ens, fn, ids, pts, grid, pending, r, L):
            has_edge[qi] = True
    count = int(N - np.count_nonzero(has_edge))
    covered = L >= diam * (1.0 - 1e-12)
    bound = 0.0 if covered else len(pending) * n * r**d * tail_mass(fn, d, L / r)
    return count, bound


def is_connected_at(
    ens: CoupledEnsemble,
    fn: ConnectionFunction,
    n: float,
    r: float,
    mode: BuildMode = BuildMode(),
) -> tuple[bool, float]:
    """Connectivity verdict at radius r.

    A connected verdict is exact (edges only accumulate); a disconnected
    one carries the certified bound on overlooked merging edges.
    """
    if not (r >= 0.0):
        raise ValueError(f"radius must be nonnegative, got {r}")
    ids, pts = ens.points_up_to(n)
    N = len(ids)
    d = ens.dim
    diam = _diameter(d)
    if N <= 1:
        return True, 0.0
    if r == 0.0:
        return False, 0.0
    tc = tail_class(fn)
    exact = mode.kind == "exact"
    if tc.kind == "bounded":
        L_full = min(r * tc.support, diam)
        parts_i, parts_j = [], []
        for ii, jj, _ in _edge_chunks(ens, fn, ids, pts, r, L_full):
            parts_i.append(ii)
            parts_j.append(jj)
        pos_i = np.concatenate(parts_i) if parts_i else np.empty(0, dtype=np.int64)
        pos_j = np.concatenate(parts_j) if parts_j else np.empty(0, dtype=np.int64)
        return _component_count(N, pos_i, pos_j) <= 1, 0.0
    stage = min(r * cutoff_for(fn, d, 0.1 * alpha(fn, d)), diam)
    parts_i, parts_j = [], []
    for ii, jj, _ in _edge_chunks(ens, fn, ids, pts, r, stage):
        parts_i.append(ii)
        parts_j.append(jj)
    pos_i = np.concatenate(parts_i) if parts_i else np.empty(0, dtype=np.int64)
    pos_j = np.concatenate(parts_j) if parts_j else np.empty(0, dtype=np.int64)
    if _component_count(N, pos_i, pos_j) <= 1:
        return True, 0.0
    # chase the vertices outside the largest component out to the window
    labels = _component_labels(N, pos_i, pos_j)
    sizes = np.bincount(labels)
    pending = np.nonzero(labels != sizes.argmax())[0]
    if exact:
        L = diam
    else:
        L = _window_for(fn, d, r, mode.eps / (len(pending) * n * r**d))
    if L > stage:
        grid = CellGrid(pts, _cell_size(L, N, d))
        for qi, pj, _ in _incident_edge_chunks(ens, fn, ids, pts, grid, pending, r, L):
            parts_i.append(qi)
            parts_j.append(pj)
        pos_i = np.concatenate(parts_i)
        pos_j = np.concatenate(parts_j)
    connected = _component_count(N, pos_i, pos_j) <= 1
    covered = L >= diam * (1.0 - 1e-12)
    bound = 0.0 if connected or covered else len(pending) * n * r**d * tail_mass(fn, d, L / r)
    return connected, bound


def _component_labels(n_vertices: int, pos_i: np.ndarray, pos_j: np.ndarray) -> np.ndarray:
    if len(pos_i) == 0:
        return np.arange(n_vertices)
    m = coo_matrix(
        (np.ones(len(pos_i), dtype=np.int8), (pos_i, pos_j)),
        shape=(n_vertices, n_vertices),
    )
    _, labels = _sparse_components(m, directed=False)
    return labels


def longest_edge_value(
    ens: CoupledEnsemble,
    fn: ConnectionFunction,
    n: float,
    r: float,
    mode: BuildMode = BuildMode(),
    exact_cap: int = EXACT_PAIR_LIMIT,
) -> tuple[float, float]:
    """Longest realized edge length at radius r, without keeping edges."""
    if not (r >= 0.0):
        raise ValueError(f"radius must be nonnegative, got {r}")
    ids, pts = ens.points_up_to(n)
    N = len(ids)
    d = ens.dim
    if N < 2 or r == 0.0:
        return 0.0, 0.0
    L, bound = _resolve_cutoff(fn, d, N, r, mode, exact_cap)
    best = 0.0
    for _, _, length in _edge_chunks(ens, fn, ids, pts, r, L):
        best = max(best, float(length.max()))
    return best, bound


def incident_longest_edge(
    ens: CoupledEnsemble,
    fn: ConnectionFunction,
    n: float,
    r: float,
    vertex: int,
) -> float:
    """Longest edge at one vertex by an exact linear scan over all points."""
    if not (r > 0.0):
        raise ValueError(f"radius must be positive, got {r}")
    ids, pts = ens.points_up_to(n)
    if len(ids) == 0:
        return 0.0
    where = np.nonzero(ids == vertex)[0]
    if len(where) == 0:
        raise ValueError(f"vertex {vertex} is not present at intensity {n}")
    pos = int(where[0])
    axes = _axis_views(pts)
    others = np.concatenate([np.arange(pos), np.arange(pos + 1, len(ids))])
    if len(others) == 0:
        return 0.0
    here = np.full(len(others), pos)
    dist = np.sqrt(_pair_dist2(axes, here, others))
    u = ens.pair_uniforms(np.full(len(others), vertex), ids[others])
    hit = u <= g_eval(fn, dist / r)
    return float(dist[hit].max()) if hit.any() else 0.0
