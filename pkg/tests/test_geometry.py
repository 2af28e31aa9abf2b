"""Torus geometry against brute-force oracles."""

import math

import numpy as np
import pytest

from rcmlab.geometry import (
    CellGrid,
    check_dim,
    distances_to,
    min_image,
    pair_distances,
    toroidal_distance,
    unit_ball_volume,
    wrap,
)


def brute_distance(x, y):
    """Minimum over all integer translates of the Euclidean distance."""
    d = len(x)
    best = math.inf
    for z in np.ndindex(*(3,) * d):
        shift = np.asarray(z) - 1
        best = min(best, float(np.linalg.norm(x - y + shift)))
    return best


def test_wrap_examples():
    assert wrap(np.array([0.75]))[0] == pytest.approx(-0.25)
    assert wrap(np.array([1.25]))[0] == pytest.approx(0.25)
    assert wrap(np.array([-0.5]))[0] == 0.5
    assert wrap(np.array([0.5]))[0] == 0.5
    assert float(wrap(-2.5)) == 0.5
    x = np.array([0.3, -0.49, 0.5])
    assert np.allclose(wrap(x), x)


def test_wrap_range_random():
    rng = np.random.default_rng(7)
    x = rng.uniform(-40, 40, size=(2000, 3))
    y = wrap(x)
    assert np.all(y > -0.5)
    assert np.all(y <= 0.5)
    # congruent mod 1
    assert np.allclose(np.mod(y - x, 1.0) % 1.0, 0.0, atol=1e-9)


def test_unit_ball_volume_known_values():
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    assert unit_ball_volume(4) == pytest.approx(math.pi**2 / 2, rel=1e-14)
    assert unit_ball_volume(8) == pytest.approx(math.pi**4 / 24, rel=1e-14)


def test_dimension_validation():
    for bad in (1, 0, -3, 9, 2.0, "2"):
        with pytest.raises(ValueError):
            check_dim(bad)
    assert check_dim(2) == 2
    assert check_dim(8) == 8


def test_distance_matches_offset_oracle():
    rng = np.random.default_rng(11)
    for d in (2, 3, 4):
        for _ in range(400):
            x = wrap(rng.uniform(-0.5, 0.5, size=d))
            y = wrap(rng.uniform(-0.5, 0.5, size=d))
            assert toroidal_distance(x, y) == pytest.approx(brute_distance(x, y), abs=1e-12)


def test_distance_symmetry_and_bound():
    rng = np.random.default_rng(13)
    for d in (2, 5, 8):
        x = wrap(rng.uniform(-0.5, 0.5, size=(500, d)))
        y = wrap(rng.uniform(-0.5, 0.5, size=(500, d)))
        for a, b in zip(x, y):
            dab = toroidal_distance(a, b)
            assert dab == pytest.approx(toroidal_distance(b, a), abs=1e-15)
            assert dab <= math.sqrt(d) / 2 + 1e-12
        assert toroidal_distance(x[0], x[0]) == 0.0


def test_triangle_inequality():
    rng = np.random.default_rng(17)
    for d in (2, 3):
        x, y, z = (wrap(rng.uniform(-0.5, 0.5, size=(5000, d))) for _ in range(3))
        for a, b, c in zip(x, y, z):
            assert toroidal_distance(a, c) <= (
                toroidal_distance(a, b) + toroidal_distance(b, c) + 1e-12
            )


def test_translation_invariance():
    rng = np.random.default_rng(19)
    for d in (2, 4):
        for _ in range(2000):
            x = wrap(rng.uniform(-0.5, 0.5, size=d))
            y = wrap(rng.uniform(-0.5, 0.5, size=d))
            t = rng.uniform(-3, 3, size=d)
            assert toroidal_distance(wrap(x + t), wrap(y + t)) == pytest.approx(
                toroidal_distance(x, y), abs=1e-12
            )


def test_min_image_magnitude():
    rng = np.random.default_rng(23)
    delta = rng.uniform(-1, 1, size=(1000, 3))
    w = min_image(delta)
    assert np.all(np.abs(w) <= 0.5 + 1e-15)
    # same congruence class
    assert np.allclose(np.mod(w - delta, 1.0) % 1.0, 0.0, atol=1e-9)


def test_vectorized_distances_agree_scalar():
    rng = np.random.default_rng(29)
    pts = wrap(rng.uniform(-0.5, 0.5, size=(200, 3)))
    q = pts[17]
    dv = distances_to(pts, q)
    for i in range(200):
        assert dv[i] == pytest.approx(toroidal_distance(pts[i], q), abs=1e-14)
    ii = rng.integers(0, 200, size=300)
    jj = rng.integers(0, 200, size=300)
    dp = pair_distances(pts, ii, jj)
    for k in range(300):
        assert dp[k] == pytest.approx(toroidal_distance(pts[ii[k]], pts[jj[k]]), abs=1e-14)


def _collect_query(grid, q, radius):
    got = set()
    for qi, pj in grid.query_chunks(q, radius):
        got.update(zip(qi.tolist(), pj.tolist()))
    return got


def test_grid_query_superset():
    rng = np.random.default_rng(31)
    for case in range(100):
        d = int(rng.integers(2, 4))
        n = int(rng.integers(1, 300))
        pts = wrap(rng.uniform(-0.5, 0.5, size=(n, d)))
        cell = float(rng.uniform(0.02, 0.6))
        radius = float(rng.uniform(0.01, 0.55))
        grid = CellGrid(pts, cell)
        q = wrap(rng.uniform(-0.5, 0.5, size=(5, d)))
        got = _collect_query(grid, q, radius)
        for a in range(5):
            dv = distances_to(pts, q[a])
            for j in np.nonzero(dv <= radius)[0]:
                assert (a, int(j)) in got


def test_grid_pairs_cover_and_do_not_repeat():
    rng = np.random.default_rng(37)
    for case in range(60):
        d = int(rng.integers(2, 4))
        n = int(rng.integers(2, 250))
        pts = wrap(rng.uniform(-0.5, 0.5, size=(n, d)))
        cell = float(rng.uniform(0.03, 0.5))
        radius = float(rng.uniform(0.01, 0.6))
        grid = CellGrid(pts, cell)
        seen = []
        for ii, jj in grid.pair_chunks(radius):
            assert np.all(ii < jj)
            seen.extend(zip(ii.tolist(), jj.tolist()))
        assert len(seen) == len(set(seen))
        seen = set(seen)
        for i in range(n):
            dv = distances_to(pts, pts[i])
            for j in np.nonzero(dv <= radius)[0]:
                if i < j:
                    assert (i, int(j)) in seen


def test_grid_cell_size_floor():
    rng = np.random.default_rng(41)
    pts = wrap(rng.uniform(-0.5, 0.5, size=(50, 2)))
    grid = CellGrid(pts, 0.26)
    assert grid.width == 3
    assert grid.cell_size >= 0.26
    # every point is registered in exactly one cell
    members = sorted(i for cell in grid.cells().values() for i in cell)
    assert members == list(range(50))


def test_grid_rejects_bad_input():
    pts = np.zeros((4, 2))
    with pytest.raises(ValueError):
        CellGrid(pts, 0.0)
    with pytest.raises(ValueError):
        CellGrid(np.zeros(4), 0.1)
