"""Connection functions and their radial calculus.

A connection function g maps a scaled distance s >= 0 to an edge
probability in [0, 1] and never increases.  Graphs downstream link two
points at toroidal distance delta with probability g(delta / r).

Built-in families (CLI spelling in brackets):

  indicator          [indicator]           g = 1 on [0, 1], 0 beyond
  scaled_indicator   [scaled_indicator:p]  g = p on [0, 1], 0 beyond
  exponential        [exp:c]               g(s) = exp(-c s)
  power_law          [pow:c]               g(s) = min(1, s^-c), needs c > d
  gaussian           [gauss]               g(s) = exp(-s^2)

For dimension d with th = unit_ball_volume(d) the radial mass is

  alpha(g, d)      = d th int_0^inf s^(d-1) g(s) ds
  tail_mass(g, d, a) = d th int_a^inf s^(d-1) g(s) ds

alpha is the asymptotic mean-degree density: a unit-intensity environment
contributes alpha r^d expected neighbours at connection radius r.  Every
built-in has a closed form; an adaptive quadrature route exists purely as
a cross-check and must agree to high accuracy.

inverse_radius(g, u) is the generalized inverse sup{s : g(s) >= u} with
sup of the empty set taken as 0.  It converts a pair's latent uniform
into the critical scaled distance below which the pair is linked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .geometry import check_dim, unit_ball_volume

KINDS = ("indicator", "scaled_indicator", "exponential", "power_law", "gaussian")


@dataclass(frozen=True)
class ConnectionFunction:
    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown connection function kind {self.kind!r}")
        if self.kind in ("indicator", "gaussian"):
            if self.param is not None:
                raise ValueError(f"{self.kind} takes no parameter")
        elif self.kind == "scaled_indicator":
            if self.param is None or not (0.0 < self.param <= 1.0):
                raise ValueError(f"scaled_indicator needs p in (0, 1], got {self.param}")
        else:
            if self.param is None or not (self.param > 0.0) or not math.isfinite(self.param):
                raise ValueError(f"{self.kind} needs a positive finite parameter, got {self.param}")


@dataclass(frozen=True)
class TailClass:
    kind: str  # bounded | exponential | polynomial
    rate: float | None = None
    support: float | None = None


def indicator() -> ConnectionFunction:
    return ConnectionFunction("indicator")


def scaled_indicator(p: float) -> ConnectionFunction:
    return ConnectionFunction("scaled_indicator", float(p))


def exponential(c: float) -> ConnectionFunction:
    return ConnectionFunction("exponential", float(c))


def power_law(c: float) -> ConnectionFunction:
    return ConnectionFunction("power_law", float(c))


def gaussian() -> ConnectionFunction:
    return ConnectionFunction("gaussian")


def parse_connection(text: str) -> ConnectionFunction:
    """Parse the CLI spelling of a connection function."""
    name, sep, arg = text.partition(":")
    name = name.strip()
    try:
        if name == "indicator" and not sep:
            return indicator()
        if name == "gauss" and not sep:
            return gaussian()
        if name == "scaled_indicator" and sep:
            return scaled_indicator(float(arg))
        if name == "exp" and sep:
            return exponential(float(arg))
        if name == "pow" and sep:
            return power_law(float(arg))
    except ValueError as exc:
        raise ValueError(f"bad connection function {text!r}: {exc}") from None
    raise ValueError(
        f"bad connection function {text!r}; expected one of "
        "indicator, scaled_indicator:p, exp:c, pow:c, gauss"
    )


def format_connection(fn: ConnectionFunction) -> str:
    short = {"indicator": "indicator", "gaussian": "gauss", "scaled_indicator": "scaled_indicator", "exponential": "exp", "power_law": "pow"}[fn.kind]
    if fn.param is None:
        return short
    return f"{short}:{fn.param:g}"


def g_eval(fn: ConnectionFunction, s):
    """Evaluate g at scaled distance s (scalar or array, all entries >= 0)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("scaled distance must be nonnegative")
    if fn.kind == "indicator":
        out = np.where(s <= 1.0, 1.0, 0.0)
    elif fn.kind == "scaled_indicator":
        out = np.where(s <= 1.0, fn.param, 0.0)
    elif fn.kind == "exponential":
        out = np.exp(-fn.param * s)
    elif fn.kind == "power_law":
        with np.errstate(divide="ignore"):
            out = np.minimum(1.0, s ** (-fn.param))
    else:
        out = np.exp(-s * s)
    return out if out.ndim else float(out)


def tail_class(fn: ConnectionFunction) -> TailClass:
    if fn.kind in ("indicator", "scaled_indicator"):
        return TailClass("bounded", support=1.0)
    if fn.kind == "exponential":
        return TailClass("exponential", rate=fn.param)
    if fn.kind == "gaussian":
        return TailClass("exponential", rate=math.inf)
    return TailClass("polynomial", rate=fn.param)


def _check_power_dim(fn: ConnectionFunction, d: int):
    if fn.kind == "power_law" and fn.param <= d:
        raise ValueError(
            f"power_law exponent must exceed the dimension for a finite radial mass; got c={fn.param:g}, d={d}"
        )


def alpha(fn: ConnectionFunction, d: int) -> float:
    """Radial mass of g in dimension d, by closed form."""
    check_dim(d)
    _check_power_dim(fn, d)
    th = unit_ball_volume(d)
    if fn.kind == "indicator":
        return th
    if fn.kind == "scaled_indicator":
        return th * fn.param
    if fn.kind == "exponential":
        return th * math.factorial(d) / fn.param**d
    if fn.kind == "power_law":
        return th * fn.param / (fn.param - d)
    return th * math.gamma(d / 2 + 1)


def tail_mass(fn: ConnectionFunction, d: int, a: float) -> float:
    """Radial mass of g beyond scaled distance a, by closed form."""
    check_dim(d)
    _check_power_dim(fn, d)
    if not (a >= 0.0):
        raise ValueError(f"tail start must be nonnegative, got {a}")
    th = unit_ball_volume(d)
    if fn.kind in ("indicator", "scaled_indicator"):
        p = 1.0 if fn.kind == "indicator" else fn.param
        return p * th * (1.0 - a**d) if a < 1.0 else 0.0
    if fn.kind == "exponential":
        x = fn.param * a
        head = sum(x**k / math.factorial(k) for k in range(d))
        return alpha(fn, d) * math.exp(-x) * head
    if fn.kind == "power_law":
        c = fn.param
        if a >= 1.0:
            return d * th * a ** (d - c) / (c - d)
        return alpha(fn, d) - th * a**d
    # gaussian: upper incomplete gamma of order d/2 at a^2
    return (d * th / 2.0) * special.gammaincc(d / 2, a * a) * math.gamma(d / 2)


def tail_mass_vec(fn: ConnectionFunction, d: int, a: np.ndarray) -> np.ndarray:
    """Vectorized tail_mass over an array of tail starts."""
    check_dim(d)
    _check_power_dim(fn, d)
    a = np.asarray(a, dtype=float)
    if np.any(a < 0.0):
        raise ValueError("tail start must be nonnegative")
    th = unit_ball_volume(d)
    if fn.kind in ("indicator", "scaled_indicator"):
        p = 1.0 if fn.kind == "indicator" else fn.param
        return p * th * np.clip(1.0 - a**d, 0.0, None) * (a < 1.0)
    if fn.kind == "exponential":
        x = fn.param * a
        head = np.ones_like(x)
        term = np.ones_like(x)
        for k in range(1, d):
            term = term * x / k
            head += term
        return alpha(fn, d) * np.exp(-x) * head
    if fn.kind == "power_law":
        c = fn.param
        inner = alpha(fn, d) - th * np.minimum(a, 1.0) ** d
        with np.errstate(divide="ignore"):
            outer = d * th * np.maximum(a, 1.0) ** (d - c) / (c - d)
        return np.where(a >= 1.0, outer, inner)
    return (d * th / 2.0) * special.gammaincc(d / 2, a * a) * math.gamma(d / 2)


def _quad_upper_cut(fn: ConnectionFunction, a: float) -> float:
    """Finite integration endpoint beyond which the analytic tail takes over."""
    tc = tail_class(fn)
    if tc.kind == "bounded":
        return tc.support
    if fn.kind == "exponential":
        return a + 120.0 / fn.param
    if fn.kind == "gaussian":
        return math.sqrt(a * a + 120.0)
    return max(a, 1.0) * 8.0


def tail_mass_quadrature(fn: ConnectionFunction, d: int, a: float) -> float:
    """Adaptive-quadrature route for tail_mass; cross-check only.

    Integrates d th s^(d-1) g(s) over [a, A] and closes with an analytic
    remainder: exact for the power law, vanishing below 1e-40 of the head
    for the exponential-type tails by the choice of A.
    """
    check_dim(d)
    _check_power_dim(fn, d)
    if not (a >= 0.0):
        raise ValueError(f"tail start must be nonnegative, got {a}")
    th = unit_ball_volume(d)
    upper = _quad_upper_cut(fn, a)
    if upper <= a:
        return 0.0

    def integrand(s):
        return d * th * s ** (d - 1) * g_eval(fn, s)

    breaks = [b for b in (1.0,) if a < b < upper]
    value, _ = integrate.quad(integrand, a, upper, points=breaks or None, epsabs=1e-14, epsrel=1e-12, limit=300)
    if fn.kind == "power_law":
        c = fn.param
        value += d * th * upper ** (d - c) / (c - d)
    return value


def alpha_quadrature(fn: ConnectionFunction, d: int) -> float:
    """Adaptive-quadrature route for alpha; cross-check only."""
    return tail_mass_quadrature(fn, d, 0.0)


def inverse_radius(fn: ConnectionFunction, u):
    """Generalized inverse sup{s >= 0 : g(s) >= u} for u in (0, 1].

    Scalar or array.  A zero means no positive distance connects at level
    u (possible only when g tops out below 1).
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u > 1.0):
        raise ValueError("threshold level must lie in (0, 1]")
    if fn.kind == "indicator":
        out = np.ones_like(u)
    elif fn.kind == "scaled_indicator":
        out = np.where(u <= fn.param, 1.0, 0.0)
    elif fn.kind == "exponential":
        out = -np.log(u) / fn.param
    elif fn.kind == "power_law":
        out = u ** (-1.0 / fn.param)
    else:
        out = np.sqrt(-np.log(u))
    return out if out.ndim else float(out)


def cutoff_for(fn: ConnectionFunction, d: int, bound: float) -> float:
    """Smallest scaled distance a with tail_mass(fn, d, a) <= bound."""
    check_dim(d)
    _check_power_dim(fn, d)
    if not (bound > 0.0):
        raise ValueError(f"tail bound must be positive, got {bound}")
    if tail_mass(fn, d, 0.0) <= bound:
        return 0.0
    tc = tail_class(fn)
    if tc.kind == "bounded":
        hi = tc.support
    else:
        hi = 1.0
        while tail_mass(fn, d, hi) > bound:
            hi *= 2.0
            if hi > 1e12:
                raise RuntimeError("tail cutoff search diverged")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tail_mass(fn, d, mid) <= bound:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return hi
