"""Seeded empirical checks of the two-point bounds on the spline.

These sample random point pairs in the spline's open half-plane domain and
measure how well the analytical inequalities hold on its float-converted
values and gradients.
"""

from __future__ import annotations

import math

import numpy as np

from . import spline
from .bounds import PointData, cocoercivity_gap, global_bound_interval

X0_RANGE = (-2.0, 3.0)
X1_RANGE = (spline.DOMAIN_BOUND_F + 1e-6, 2.0)


def _sample_points(rng: np.random.Generator, n: int) -> np.ndarray:
    x0 = rng.uniform(*X0_RANGE, size=n)
    x1 = rng.uniform(*X1_RANGE, size=n)
    return np.column_stack([x0, x1])


def _point_data(x0: float, x1: float) -> PointData:
    return PointData(
        x=np.array([x0, x1]),
        f=spline.eval_F_float(x0, x1),
        g=np.array(spline.grad_F_float(x0, x1)),
    )


def global_bound_max_excursion(n_pairs: int, seed: int = 0) -> float:
    """Worst distance of f(y) from its admissible interval over n random pairs.

    Nonpositive (up to float noise) iff the strengthened two-sided bound
    holds on every sampled pair.
    """
    rng = np.random.default_rng(seed)
    xs = _sample_points(rng, n_pairs)
    ys = _sample_points(rng, n_pairs)
    worst = -math.inf
    for (a0, a1), (b0, b1) in zip(xs, ys):
        if a0 == b0 and a1 == b1:
            continue
        px = _point_data(a0, a1)
        py = _point_data(b0, b1)
        iv = global_bound_interval(1.0, px, py)
        worst = max(worst, iv.lo - py.f, py.f - iv.hi)
    return worst


def local_cocoercivity_min_gap(n_pairs: int, seed: int = 0) -> float:
    """Smallest co-coercivity gap over pairs satisfying the locality condition.

    y is sampled in the domain, x uniformly in the open ball around y of
    radius dist(y, complement), which the half-plane geometry gives exactly
    as y_1 + 23/240.
    """
    rng = np.random.default_rng(seed)
    ys = _sample_points(rng, n_pairs)
    worst = math.inf
    for b0, b1 in ys:
        dist_y = b1 - spline.DOMAIN_BOUND_F
        theta = rng.uniform(0.0, 2.0 * math.pi)
        radius = dist_y * math.sqrt(rng.uniform(0.0, 1.0)) * (1.0 - 1e-6)
        a0 = b0 + radius * math.cos(theta)
        a1 = b1 + radius * math.sin(theta)
        px = _point_data(a0, a1)
        py = _point_data(b0, b1)
        worst = min(worst, cocoercivity_gap(1.0, px, py))
    return worst
