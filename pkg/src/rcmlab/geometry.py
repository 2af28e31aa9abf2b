"""Geometry of the unit torus.

Everything downstream lives on S = (-1/2, 1/2]^d with the wraparound
metric, so distances never exceed sqrt(d)/2.  This module owns coordinate
canonicalization, the minimum-image displacement rule, and a uniform cell
grid used to generate neighbour candidates without touching all pairs.

The grid promises supersets only: a radius-L query returns every point
within toroidal distance L of the query, possibly plus extras.  Exact
distance filtering is the caller's job.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

# Cell enumeration is exponential in d; higher-dimensional boxes are out
# of scope for the whole artifact, not just the grid.
MAX_DIM = 8

# Upper bound on lattice cells so the bucket tables stay a few tens of MB.
_MAX_CELLS = 4_000_000

# Pair chunks are capped so transient arrays stay well under a GB.
_CHUNK_PAIRS = 4_000_000


def check_dim(d: int) -> int:
    """Validate a torus dimension, returning it unchanged."""
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise ValueError(f"dimension must be an integer, got {d!r}")
    if d < 2 or d > MAX_DIM:
        raise ValueError(f"dimension must be in [2, {MAX_DIM}], got {d}")
    return int(d)


def unit_ball_volume(d: int) -> float:
    """Volume of the Euclidean unit ball in dimension d."""
    check_dim(d)
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def wrap(x: np.ndarray) -> np.ndarray:
    """Map arbitrary coordinates to canonical representatives in (-1/2, 1/2].

    Accepts any real array; the wrap acts componentwise.
    """
    x = np.asarray(x, dtype=float)
    y = x - np.floor(x + 0.5)
    # floor leaves the boundary at -1/2; the canonical representative is +1/2.
    if y.ndim == 0:
        return np.asarray(0.5) if y == -0.5 else y
    y[y == -0.5] = 0.5
    return y


def min_image(delta: np.ndarray) -> np.ndarray:
    """Shortest displacement congruent to delta on the torus, componentwise.

    Input must be a difference of canonical coordinates (entries in (-1, 1));
    the result lies in [-1/2, 1/2].
    """
    delta = np.asarray(delta, dtype=float)
    return delta - np.round(delta)


def toroidal_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Wraparound Euclidean distance between two canonical points."""
    w = min_image(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return float(np.sqrt(np.sum(w * w)))


def distances_to(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Toroidal distances from each row of ``points`` to the single point q."""
    w = min_image(points - np.asarray(q, dtype=float))
    return np.sqrt(np.einsum("ij,ij->i", w, w))


def pair_distances(points: np.ndarray, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
    """Toroidal distances between rows ii and jj of ``points``."""
    w = min_image(points[ii] - points[jj])
    return np.sqrt(np.einsum("ij,ij->i", w, w))


def _concat_ranges(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Concatenation of arange(s, s + c) for each start/count pair.

    All counts must be positive; callers filter empty groups first.
    """
    total = int(counts.sum())
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    bounds = np.cumsum(counts)[:-1]
    out[bounds] = starts[1:] - (starts[:-1] + counts[:-1] - 1)
    return np.cumsum(out)


class CellGrid:
    """Uniform wraparound bucketing of torus points.

    The lattice has m = floor(1/cell_size) cells per axis (at least 1), so
    every cell spans at least ``cell_size``.  A query of radius L inspects
    the centred block of cells of half-width floor(L*m) + 1, which covers
    every point within toroidal distance L of the query point.
    """

    def __init__(self, points: np.ndarray, cell_size: float):
        pts = np.ascontiguousarray(points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        n, d = pts.shape
        check_dim(d)
        if not (cell_size > 0.0):
            raise ValueError(f"cell_size must be positive, got {cell_size}")
        m = max(1, int(1.0 / cell_size))
        # Keep the flat bucket table enumerable regardless of cell_size.
        while m > 1 and m**d > _MAX_CELLS:
            m -= 1
        self.points = pts
        self.dim = d
        self.width = m
        self.cell_size = 1.0 / m
        v = np.floor((pts + 0.5) * m).astype(np.int64) % m
        strides = m ** np.arange(d - 1, -1, -1, dtype=np.int64)
        self._flat = v @ strides
        self._order = np.argsort(self._flat, kind="stable")
        counts = np.bincount(self._flat, minlength=m**d)
        self._starts = np.concatenate(([0], np.cumsum(counts)))
        self._counts = counts
        self._strides = strides

    def cells(self) -> dict[tuple[int, ...], list[int]]:
        """Cell coordinate -> point index lists (small instances only)."""
        out: dict[tuple[int, ...], list[int]] = {}
        for flat in np.nonzero(self._counts)[0]:
            coords = []
            rem = int(flat)
            for s in self._strides:
                coords.append(rem // int(s))
                rem %= int(s)
            lo, hi = self._starts[flat], self._starts[flat + 1]
            out[tuple(coords)] = self._order[lo:hi].tolist()
        return out

    def _offsets(self, radius: float):
        reach = int(math.floor(radius * self.width)) + 1
        if 2 * reach + 1 >= self.width:
            # Wraparound would revisit cells; enumerate each class once.
            axis = range(self.width)
        else:
            axis = range(-reach, reach + 1)
        return itertools.product(axis, repeat=self.dim)

    def query_chunks(self, q_points: np.ndarray, radius: float, q_index: np.ndarray | None = None):
        """Yield (qi, pj) candidate index chunks for a batch of query points.

        qi indexes into the query batch (or carries q_index values when
        given); pj indexes rows of the gridded point set.  Every point
        within toroidal distance ``radius`` of query q appears among that
        q's candidates; self-matches are not removed.
        """
        q = np.atleast_2d(np.asarray(q_points, dtype=float))
        k = q.shape[0]
        if k == 0:
            return
        qcell = np.floor((q + 0.5) * self.width).astype(np.int64) % self.width
        qflat = qcell @ self._strides
        qi_base = np.arange(k, dtype=np.int64) if q_index is None else np.asarray(q_index, dtype=np.int64)
        for off in self._offsets(radius):
            shift = (qcell + np.asarray(off, dtype=np.int64)) % self.width
            nf = shift @ self._strides
            cnt = self._counts[nf]
            live = cnt > 0
            if not live.any():
                continue
            qi_live = qi_base[live]
            s_live = self._starts[nf[live]]
            c_live = cnt[live]
            # Split the offset batch so no chunk exceeds the pair cap.
            cum = np.cumsum(c_live)
            lo = 0
            while lo < len(c_live):
                base = cum[lo - 1] if lo > 0 else 0
                hi = max(lo + 1, int(np.searchsorted(cum, base + _CHUNK_PAIRS, side="right")))
                sel = slice(lo, hi)
                pj = self._order[_concat_ranges(s_live[sel], c_live[sel])]
                qi = np.repeat(qi_live[sel], c_live[sel])
                yield qi, pj
                lo = hi

    def pair_chunks(self, radius: float):
        """Yield (ii, jj) candidate pair chunks with ii < jj.

        Covers every point pair at toroidal distance <= radius at least
        once; duplicates are not produced.
        """
        for qi, pj in self.query_chunks(self.points, radius):
            keep = qi < pj
            if keep.any():
                yield qi[keep], pj[keep]
