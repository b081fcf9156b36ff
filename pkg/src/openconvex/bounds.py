"""Two-point inequalities for smooth convex functions on open sets.

Implements the descent gaps, the co-coercivity gap, the locality predicate,
chain discretization, the weight family behind the global bound, its sum
identity, and the admissible-value intervals used for region comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DimensionMismatch, RangeError


@dataclass(frozen=True)
class PointData:
    """A (location, value, gradient) triple; the atom of every check."""

    x: np.ndarray
    f: float
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float))
        if self.x.shape != self.g.shape or self.x.ndim != 1 or self.x.size < 1:
            raise DimensionMismatch(
                f"location shape {self.x.shape} vs gradient shape {self.g.shape}"
            )


@dataclass(frozen=True)
class ChainConfig:
    x: np.ndarray
    y: np.ndarray
    N: int

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.x.shape != self.y.shape:
            raise DimensionMismatch("x and y dimensions differ")
        if np.array_equal(self.x, self.y):
            raise DegenerateError("chain endpoints coincide")
        if self.N < 1:
            raise RangeError("N must be a positive integer")


@dataclass(frozen=True)
class AlphaWeights:
    N: int
    xi: float
    alpha: np.ndarray
    N1: int


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    empty: bool = False

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return not self.empty and self.lo - tol <= v <= self.hi + tol

    def width(self) -> float:
        return 0.0 if self.empty else self.hi - self.lo


def _check_pair(px: PointData, py: PointData) -> None:
    if px.x.shape != py.x.shape:
        raise DimensionMismatch("point dimensions differ")


def descent_gap(L: float, px: PointData, py: PointData) -> tuple[float, float]:
    """Slack of both sides of the descent inequality for the data pair.

    lower_gap >= 0 iff the convexity inequality holds, upper_gap >= 0 iff
    the quadratic upper bound holds.
    """
    _check_pair(px, py)
    d = py.x - px.x
    lower = py.f - px.f - float(px.g @ d)
    upper = 0.5 * L * float(d @ d) - lower
    return lower, upper


def cocoercivity_gap(L: float, px: PointData, py: PointData) -> float:
    """RHS minus LHS of the co-coercivity inequality; >= 0 iff it holds."""
    _check_pair(px, py)
    d = py.x - px.x
    dg = px.g - py.g
    return py.f - px.f - float(px.g @ d) - float(dg @ dg) / (2.0 * L)


def global_bound_interval(L: float, px: PointData, py: PointData) -> Interval:
    """Admissible interval for f(y) from the strengthened two-sided bound.

    Applies the directional-gradient inequality in both directions
    (lower from x, upper with the roles of x and y switched).
    """
    _check_pair(px, py)
    d = py.x - px.x
    dd = float(d @ d)
    if dd == 0.0:
        raise DegenerateError("global bound requires distinct points")
    cross = float((py.g - px.g) @ d)
    quad = cross * cross / (2.0 * L * dd)
    lo = px.f + float(px.g @ d) + quad
    hi = px.f + float(py.g @ d) - quad
    return Interval(lo, hi)


def local_condition(x, y, dist_y: float) -> bool:
    """True iff ||x-y|| < dist_y, the locality guarantee for co-coercivity."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.linalg.norm(x - y)) < dist_y


def min_chain_length(x, y, dist_x: float, dist_y: float) -> int:
    """Smallest N with N > ||y-x|| / min(dist_x, dist_y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ratio = float(np.linalg.norm(y - x)) / min(dist_x, dist_y)
    return int(np.floor(ratio)) + 1


def make_chain(cfg: ChainConfig) -> list[np.ndarray]:
    """Equally spaced points x_i = x + (i/N)(y - x), i = 0..N."""
    return [cfg.x + (i / cfg.N) * (cfg.y - cfg.x) for i in range(cfg.N + 1)]


def alpha_weights(N: int, xi: float) -> AlphaWeights:
    """alpha_i = max(0, xi - i - 1, i - xi) for i = 0..N-1."""
    if N < 1:
        raise RangeError("N must be a positive integer")
    if not 0.0 <= xi <= N:
        raise RangeError(f"xi = {xi} outside [0, {N}]")
    i = np.arange(N, dtype=float)
    alpha = np.maximum(0.0, np.maximum(xi - i - 1.0, i - xi))
    N1 = int(np.flatnonzero(alpha == 0.0)[0])
    return AlphaWeights(N=N, xi=xi, alpha=alpha, N1=N1)


def sum_identity(N: int, xi: float) -> tuple[float, float]:
    """Direct weighted sum versus its closed form (xi - N)^2."""
    w = alpha_weights(N, xi)
    i = np.arange(N, dtype=float)
    num = (w.alpha - xi + i + 1.0) ** 2
    direct = float(np.sum(num / (2.0 * w.alpha + 1.0)))
    closed = (xi - N) ** 2
    return direct, closed


def analytical_region(t: float) -> tuple[Interval, Interval]:
    """Admissible f(y)-f(x) region versus the plain descent region.

    Normalization: L = 1, zero gradient at x, unit squared distance;
    t is the directional derivative <f'(y), y-x>.  Returns (inner, outer)
    with inner a subset of outer for every t in [0, 1].
    """
    if not 0.0 <= t <= 1.0:
        raise RangeError(f"t = {t} outside [0, 1]")
    inner = Interval(0.5 * t * t, t - 0.5 * t * t)
    outer = Interval(max(0.0, t - 0.5), min(0.5, t))
    return inner, outer
