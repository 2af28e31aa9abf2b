"""Coupled random ensembles driven by counter-based hashing.

Every random quantity is a pure function of (seed, role, counter):

  * arrival times  -- cumulative unit exponentials; the realized count
    N_n is the number of arrivals at or below the intensity n,
  * point i        -- one uniform torus coordinate per axis, keyed by the
    vertex id i >= 1,
  * pair level U_ij -- one uniform per unordered vertex pair.

Because nothing is drawn sequentially, growing n only appends points
(every earlier point and pair level is bitwise unchanged), and the same
ensemble can be interrogated at any collection of intensities to expose
one coupled trajectory.  A typical-vertex view inserts the origin as
vertex 0 without touching any other value.

The hash is a chained splitmix-style finalizer on 64-bit words.  Scalar
and vectorized paths are kept bit-identical; the scalar path works in
plain Python integers because numpy scalar arithmetic warns on the
intentional wraparound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import check_dim

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

# role separators, arbitrary odd 64-bit constants
_TAG_POINTS = 0xA0761D6478BD642F
_TAG_PAIRS = 0xE7037ED1A0B428DB
_TAG_ARRIVALS = 0x8EBC6AF09C88C6E3
_TAG_FORK = 0x589965CC75374CC3

_U_GAMMA = np.uint64(_GAMMA)
_U_MULT1 = np.uint64(_MULT1)
_U_MULT2 = np.uint64(_MULT2)
_UNIT = 2.0**-53


def _chain_int(h: int, w: int) -> int:
    """Absorb one word into a running 64-bit hash (Python-int path)."""
    x = ((h ^ (w & _MASK)) + _GAMMA) & _MASK
    x = ((x ^ (x >> 30)) * _MULT1) & _MASK
    x = ((x ^ (x >> 27)) * _MULT2) & _MASK
    return x ^ (x >> 31)


def _chain_vec(h, w) -> np.ndarray:
    """Vectorized twin of _chain_int; h and w broadcast as uint64 arrays."""
    x = (np.asarray(h, dtype=np.uint64) ^ np.asarray(w, dtype=np.uint64)) + _U_GAMMA
    x = (x ^ (x >> 30)) * _U_MULT1
    x = (x ^ (x >> 27)) * _U_MULT2
    return x ^ (x >> 31)


def _unit_int(h: int) -> float:
    """Map a 64-bit hash to a uniform in the open interval (0, 1)."""
    return ((h >> 11) + 0.5) * _UNIT


def _unit_vec(h: np.ndarray) -> np.ndarray:
    return ((h >> 11).astype(np.float64) + 0.5) * _UNIT


# initial arrival block; grows geometrically when a larger n is probed
_FIRST_BLOCK = 1 << 10


@dataclass
class CoupledEnsemble:
    """One realization of the coupled point-and-levels family.

    ``palm`` switches on the typical-vertex view: vertex 0 sits at the
    origin and participates in pair levels like any other id, while the
    arrival-driven vertices keep ids 1, 2, ...
    """

    seed: int
    dim: int
    palm: bool = False
    _key_points: int = field(init=False, repr=False)
    _key_pairs: int = field(init=False, repr=False)
    _key_arrivals: int = field(init=False, repr=False)
    _arrivals: np.ndarray = field(init=False, repr=False)
    _coords: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        self.seed = int(self.seed) & _MASK
        self.dim = check_dim(self.dim)
        self._key_points = _chain_int(self.seed, _TAG_POINTS)
        self._key_pairs = _chain_int(self.seed, _TAG_PAIRS)
        self._key_arrivals = _chain_int(self.seed, _TAG_ARRIVALS)
        self._arrivals = np.empty(0)
        self._coords = np.empty((0, self.dim))

    def __getstate__(self):
        return {"seed": self.seed, "dim": self.dim, "palm": self.palm}

    def __setstate__(self, state):
        self.__init__(state["seed"], state["dim"], state["palm"])

    # -- arrivals ---------------------------------------------------------

    def _ensure_arrivals(self, n: float):
        target = n + 8.0 * np.sqrt(n + 1.0) + 64.0
        while self._arrivals.size == 0 or self._arrivals[-1] <= n:
            start = self._arrivals.size
            block = max(_FIRST_BLOCK, int(target) - start, start)
            idx = np.arange(start, start + block, dtype=np.uint64)
            gaps = -np.log(_unit_vec(_chain_vec(self._key_arrivals, idx)))
            tail = np.cumsum(gaps)
            if start:
                tail += self._arrivals[-1]
                self._arrivals = np.concatenate([self._arrivals, tail])
            else:
                self._arrivals = tail

    def count_at(self, n: float) -> int:
        """Realized vertex count N_n (excludes the origin in palm mode)."""
        if not (n >= 0.0):
            raise ValueError(f"intensity must be nonnegative, got {n}")
        if n == 0.0:
            return 0
        self._ensure_arrivals(float(n))
        return int(np.searchsorted(self._arrivals, n, side="right"))

    # -- points -----------------------------------------------------------

    def _ensure_coords(self, count: int):
        have = self._coords.shape[0]
        if count <= have:
            return
        grow = max(count, 2 * have, 256)
        ids = np.arange(have + 1, grow + 1, dtype=np.uint64)
        base = _chain_vec(self._key_points, ids)
        fresh = np.empty((ids.size, self.dim))
        for k in range(self.dim):
            fresh[:, k] = _unit_vec(_chain_vec(base, np.uint64(k))) - 0.5
        self._coords = np.concatenate([self._coords, fresh]) if have else fresh
        self._coords.setflags(write=False)

    def point(self, i: int) -> np.ndarray:
        """Coordinates of vertex i (i >= 1; vertex 0 exists in palm mode)."""
        if i == 0:
            if not self.palm:
                raise ValueError("vertex 0 exists only in the typical-vertex view")
            return np.zeros(self.dim)
        if i < 0:
            raise ValueError(f"vertex id must be nonnegative, got {i}")
        self._ensure_coords(i)
        return self._coords[i - 1].copy()

    def points_up_to(self, n: float) -> tuple[np.ndarray, np.ndarray]:
        """Vertex ids and coordinates present at intensity n.

        Ids are 1..N_n, preceded by 0 in palm mode.  The coordinate rows
        align with the ids and are read-only views of the internal cache.
        """
        count = self.count_at(n)
        self._ensure_coords(count)
        body = self._coords[:count]
        if self.palm:
            ids = np.arange(0, count + 1, dtype=np.int64)
            pts = np.concatenate([np.zeros((1, self.dim)), body])
            pts.setflags(write=False)
            return ids, pts
        return np.arange(1, count + 1, dtype=np.int64), body

    # -- pair levels ------------------------------------------------------

    def pair_uniform(self, i: int, j: int) -> float:
        """Latent uniform of the unordered pair {i, j}, in (0, 1)."""
        if i == j:
            raise ValueError(f"pair needs two distinct vertices, got {i} twice")
        if i < 0 or j < 0:
            raise ValueError(f"vertex ids must be nonnegative, got ({i}, {j})")
        a, b = (i, j) if i < j else (j, i)
        return _unit_int(_chain_int(_chain_int(self._key_pairs, a), b))

    def pair_uniforms(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        """Vectorized pair levels; ii and jj are id arrays of equal shape."""
        ii = np.asarray(ii)
        jj = np.asarray(jj)
        if np.any(ii == jj):
            raise ValueError("pair needs two distinct vertices")
        a = np.minimum(ii, jj).astype(np.uint64)
        b = np.maximum(ii, jj).astype(np.uint64)
        return _unit_vec(_chain_vec(_chain_vec(self._key_pairs, a), b))

    def pair_uniforms_ordered(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        """Hot-path twin of pair_uniforms for pre-sorted distinct ids.

        Callers must guarantee ii < jj elementwise; no validation runs.
        The arithmetic is kept in place to halve the temporaries on large
        batches, but the values are bit-identical to pair_uniforms.
        """
        key = np.uint64(self._key_pairs)
        x = key ^ np.ascontiguousarray(ii).view(np.uint64)
        x += _U_GAMMA
        x ^= x >> np.uint64(30)
        x *= _U_MULT1
        x ^= x >> np.uint64(27)
        x *= _U_MULT2
        x ^= x >> np.uint64(31)
        x ^= np.ascontiguousarray(jj).view(np.uint64)
        x += _U_GAMMA
        x ^= x >> np.uint64(30)
        x *= _U_MULT1
        x ^= x >> np.uint64(27)
        x *= _U_MULT2
        x ^= x >> np.uint64(31)
        x >>= np.uint64(11)
        u = x.astype(np.float64)
        u += 0.5
        u *= _UNIT
        return u

    # -- derived ensembles ------------------------------------------------

    def fork_replication(self, k: int) -> "CoupledEnsemble":
        """Independent child ensemble for replication index k.

        The derived seed is injective in k, so distinct replications never
        share a stream.
        """
        if k < 0:
            raise ValueError(f"replication index must be nonnegative, got {k}")
        child = _chain_int(_chain_int(self.seed, _TAG_FORK), k)
        return CoupledEnsemble(child, self.dim, self.palm)

    def with_palm(self, palm: bool = True) -> "CoupledEnsemble":
        """Same underlying randomness, toggled typical-vertex view."""
        return CoupledEnsemble(self.seed, self.dim, palm)
