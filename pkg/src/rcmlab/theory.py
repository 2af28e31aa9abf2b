"""Limit predictions for soft random geometric graphs on the torus.

The scaling regimes are parametrized through the radial mass alpha of the
connection function g in dimension d:

  isolation radius      r_iso(n, b)^d   = (log n + b) / (alpha n)
  connectivity radius   r_hat(n, ga)^d  = ga log n / (alpha n)

At r_iso the expected number of isolated vertices stabilizes at e^{-b};
r_hat sweeps multiples ga of the isolation scale.  The connectivity
constant beta is the smallest x whose one-hop renormalization
x g(alpha / (x th)) exceeds one; graphs at ga > beta are connected with
probability tending to one, and beta = 1 for the hard disc.

Degree extremes are governed by the unit-mean Poisson rate function

  H(x) = 1 - x + x log x,  H(0) = 1,

which falls from 1 to 0 on [0, 1] and rises thereafter; its two branch
inverses convert tail levels back into degree ratios.

``predict`` packages all of this: given a statistic kind and its
parameters it returns the limiting value together with the claim class
(exact limit, one-sided bound, or a two-sided band), or raises
``NotApplicableError`` naming the hypothesis the configuration violates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .connection import ConnectionFunction, alpha, g_eval, tail_class, tail_mass
from .geometry import check_dim, unit_ball_volume

STATISTICS = (
    "isolated_mean",
    "isolated_dispersion",
    "dn_ratio",
    "connectivity_fraction",
    "connectivity_gamma_threshold",
    "typical_longest_edge",
    "longest_edge_ratio",
    "degree_tail",
    "max_degree_ratio",
    "min_degree_ratio",
)


class NotApplicableError(ValueError):
    """No limit claim covers the requested configuration."""


@dataclass(frozen=True)
class PredictedLimit:
    value: float
    claim: str  # exact_limit | upper_bound | lower_bound | band
    band: tuple[float, float] | None = None
    note: str | None = None


def r_hat(n: float, gamma: float, fn: ConnectionFunction, d: int) -> float:
    """Connection radius at gamma times the isolation scale."""
    if not (n > 1.0):
        raise ValueError(f"intensity must exceed 1, got {n}")
    if not (gamma > 0.0):
        raise ValueError(f"gamma must be positive, got {gamma}")
    return (gamma * math.log(n) / (alpha(fn, d) * n)) ** (1.0 / d)


def r_iso(n: float, b: float, fn: ConnectionFunction, d: int) -> float:
    """Radius at which the expected isolated-vertex count approaches e^{-b}."""
    if not (n > 1.0):
        raise ValueError(f"intensity must exceed 1, got {n}")
    if not (math.log(n) + b > 0.0):
        raise ValueError(f"log n + b must be positive, got n={n}, b={b}")
    return ((math.log(n) + b) / (alpha(fn, d) * n)) ** (1.0 / d)


def beta_solve(fn: ConnectionFunction, d: int, tol: float = 1e-12) -> float:
    """Connectivity constant: smallest x with x g(alpha/(x th)) > 1.

    The left side never exceeds x, so the constant is at least 1; it is
    exactly 1 for the hard disc.  Bisection on the exceedance predicate
    handles jump discontinuities of g.
    """
    check_dim(d)
    if fn.kind == "indicator":
        return 1.0
    if fn.kind == "scaled_indicator":
        # x g(p/x) jumps to x p at x = p, so the exceedance point is 1/p
        return 1.0 / fn.param
    a = alpha(fn, d)
    th = unit_ball_volume(d)

    def exceeds(x: float) -> bool:
        return x * g_eval(fn, a / (x * th)) > 1.0

    lo, hi = 1.0, 2.0
    while not exceeds(hi):
        hi *= 2.0
        if hi > 1e9:
            raise RuntimeError("connectivity constant search diverged")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if exceeds(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def solve_a_n(n: float, gamma: float, beta_prime: float, fn: ConnectionFunction, d: int, tol: float = 1e-10) -> float:
    """Scaled comparison length a with n r_hat^d tail_mass(a) = e^{-beta_prime}.

    The longest edge at a typical vertex falls below a * r_hat with
    probability near exp(-e^{-beta_prime}).  Solved by bisection on the
    defect; fails when even a = 0 cannot reach the target level.
    """
    r = r_hat(n, gamma, fn, d)
    m = n * r**d
    target = math.exp(-beta_prime)
    if m * alpha(fn, d) <= target:
        raise ValueError(
            f"no admissible comparison length: n r^d alpha = {m * alpha(fn, d):g} "
            f"does not exceed exp(-beta_prime) = {target:g}"
        )

    def defect(a: float) -> float:
        return m * tail_mass(fn, d, a) - target

    lo, hi = 0.0, 1.0
    while defect(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("comparison length search diverged")
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if defect(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if abs(defect(mid)) <= tol and hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def chernoff(x: float) -> float:
    """Unit-mean Poisson rate function H(x) = 1 - x + x log x, H(0) = 1."""
    if x < 0.0:
        raise ValueError(f"rate function argument must be nonnegative, got {x}")
    if x == 0.0:
        return 1.0
    return 1.0 - x + x * math.log(x)


def chernoff_upper_inv(y: float, tol: float = 1e-12) -> float:
    """Inverse of H restricted to [1, inf); maps [0, inf) onto [1, inf)."""
    if y < 0.0:
        raise ValueError(f"upper inverse needs a nonnegative level, got {y}")
    if y == 0.0:
        return 1.0
    lo, hi = 1.0, 2.0
    while chernoff(hi) < y:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("rate function inverse diverged")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chernoff(mid) < y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def chernoff_lower_inv(y: float, tol: float = 1e-12) -> float:
    """Inverse of H restricted to [0, 1]; maps [0, 1] onto [1, 0]."""
    if not (0.0 <= y <= 1.0):
        raise ValueError(f"lower inverse needs a level in [0, 1], got {y}")
    if y == 0.0:
        return 1.0
    if y == 1.0:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chernoff(mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def normal_cdf(t: float) -> float:
    """Standard normal distribution function via the complementary error function."""
    return 0.5 * math.erfc(-t / math.sqrt(2.0))


def degree_threshold(n: float, gamma: float, fn: ConnectionFunction, d: int, t: float) -> float:
    """Degree level alpha n r_hat^d + t sqrt(alpha n r_hat^d)."""
    m = alpha(fn, d) * n * r_hat(n, gamma, fn, d) ** d
    return m + t * math.sqrt(m)


def longest_edge_scale(fn: ConnectionFunction) -> str:
    """Which normalization the longest-edge law uses for this tail."""
    return "log_ratio" if tail_class(fn).kind == "polynomial" else "ratio"


def _need(name: str, value):
    if value is None:
        raise ValueError(f"statistic requires parameter {name!r}")
    return value


def predict(
    kind: str,
    fn: ConnectionFunction,
    d: int,
    b: float | None = None,
    gamma: float | None = None,
    beta_prime: float | None = None,
    t: float | None = None,
) -> PredictedLimit:
    """Limit claim for a statistic kind under connection function fn.

    Raises NotApplicableError when no stated hypothesis covers the
    configuration (for example a polynomial tail too heavy for the
    two-sided isolation band).
    """
    check_dim(d)
    if kind not in STATISTICS:
        raise ValueError(f"unknown statistic kind {kind!r}")
    tc = tail_class(fn)
    poly = tc.kind == "polynomial"

    if kind == "isolated_mean":
        b = _need("b", b)
        return PredictedLimit(math.exp(-b), "exact_limit")

    if kind == "isolated_dispersion":
        _need("b", b)
        return PredictedLimit(1.0, "exact_limit", note="variance-to-mean of the isolated count")

    if kind == "dn_ratio":
        if not poly:
            return PredictedLimit(1.0, "exact_limit")
        c = tc.rate
        if c > 3 * d:
            lo = (c - 3 * d) / (c - d)
            return PredictedLimit(lo, "band", band=(lo, 1.0), note="two-sided band for a polynomial tail")
        return PredictedLimit(1.0, "upper_bound", note=f"lower band edge needs tail exponent above {3 * d}, got {c:g}")

    if kind == "connectivity_fraction":
        gamma = _need("gamma", gamma)
        beta = beta_solve(fn, d)
        if gamma > beta:
            return PredictedLimit(1.0, "exact_limit", note=f"gamma above the connectivity constant {beta:.6g}")
        if fn.kind == "indicator" and gamma < beta:
            return PredictedLimit(0.0, "exact_limit", note="hard disc threshold is sharp")
        raise NotApplicableError(
            f"connectivity claim needs gamma above the connectivity constant {beta:.6g}, got {gamma:g}"
        )

    if kind == "connectivity_gamma_threshold":
        return PredictedLimit(beta_solve(fn, d), "exact_limit")

    if kind == "typical_longest_edge":
        _need("gamma", gamma)
        beta_prime = _need("beta_prime", beta_prime)
        return PredictedLimit(math.exp(-math.exp(-beta_prime)), "exact_limit")

    if kind == "longest_edge_ratio":
        _need("gamma", gamma)
        if not poly:
            c = tc.rate
            limit = 0.0 if tc.kind == "bounded" or math.isinf(c) else 1.0 / c
            return PredictedLimit(limit, "upper_bound", note="longest edge over r_hat log n")
        c = tc.rate
        if c <= 2 * d:
            raise NotApplicableError(
                f"longest-edge decay bound needs tail exponent above {2 * d}, got {c:g}"
            )
        return PredictedLimit(-(c - 2 * d) / (d * (c - d)), "upper_bound", note="log longest edge over log n")

    if kind == "degree_tail":
        _need("gamma", gamma)
        t = _need("t", t)
        return PredictedLimit(1.0 - normal_cdf(t), "exact_limit")

    if kind == "max_degree_ratio":
        gamma = _need("gamma", gamma)
        top = gamma * chernoff_upper_inv(1.0 / gamma)
        if not poly:
            return PredictedLimit(top, "exact_limit")
        c = tc.rate
        if c > 3 * d:
            lo = gamma * chernoff_upper_inv((c - 3 * d) / (gamma * (c - d)))
            return PredictedLimit(top, "band", band=(lo, top), note="two-sided band for a polynomial tail")
        return PredictedLimit(top, "upper_bound", note=f"lower band edge needs tail exponent above {3 * d}, got {c:g}")

    gamma = _need("gamma", gamma)  # min_degree_ratio
    if gamma <= 1.0:
        if poly:
            raise NotApplicableError(
                "minimum-degree claims below gamma = 1 need an exponentially decaying tail"
            )
        return PredictedLimit(0.0, "exact_limit", note="isolated vertices persist below gamma = 1")
    bottom = gamma * chernoff_lower_inv(1.0 / gamma)
    if not poly:
        return PredictedLimit(bottom, "exact_limit")
    c = tc.rate
    if c > 3 * d and gamma > (c - 3 * d) / (c - d):
        hi = gamma * chernoff_lower_inv((c - 3 * d) / (gamma * (c - d)))
        return PredictedLimit(bottom, "band", band=(bottom, hi), note="two-sided band for a polynomial tail")
    return PredictedLimit(bottom, "lower_bound", note=f"upper band edge needs tail exponent above {3 * d}, got {c:g}")
