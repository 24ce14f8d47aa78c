"""Forward minisum (Fermat-Weber) solvers for the three supported norms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Instance, NormTag, Point, objective, weighted_cost

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000
_SITE_HIT = 1e-12


@dataclass(frozen=True)
class MedianResult:
    location: Point
    value: float
    iterations: int = 0
    # objective after every Weiszfeld step, starting point first
    trace: tuple[float, ...] = field(default=(), repr=False)


def centroid(instance: Instance) -> Point:
    total = instance.require_weight()
    w = instance.weights
    return Point.from_array(w @ instance.coords / total)


def weighted_median(instance: Instance) -> Point:
    """Coordinate-wise lower weighted median; exact for the rectilinear objective."""
    instance.require_weight()
    w = instance.weights
    return Point(_lower_median(instance.coords[:, 0], w), _lower_median(instance.coords[:, 1], w))


def _lower_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    # 2*cum >= total avoids the rounding of total/2
    k = int(np.searchsorted(2.0 * cum, cum[-1], side="left"))
    return float(values[order][min(k, len(values) - 1)])


def weiszfeld(instance: Instance, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> MedianResult:
    """Weiszfeld fixed-point iteration started at the weighted centroid.

    When an iterate lands on a site, the site is accepted if it satisfies the
    vertex optimality test (resultant pull of the other sites no larger than
    its own weight); otherwise the iterate is nudged by ``tol`` along +x.
    """
    instance.require_weight()
    coords = instance.coords
    w = instance.weights
    active = w > 0
    coords, w = coords[active], w[active]

    x = w @ coords / w.sum()
    f = weighted_cost(NormTag.EUCLIDEAN, x, coords, w)
    trace = [f]
    it = 0
    while it < max_iter:
        diff = coords - x
        d = np.hypot(diff[:, 0], diff[:, 1])
        hit = d < _SITE_HIT
        if hit.any():
            if _site_is_optimal(coords, w, hit):
                break
            x = x + np.array([tol, 0.0])
            f = weighted_cost(NormTag.EUCLIDEAN, x, coords, w)
            trace.append(f)
            it += 1
            continue
        inv = w / d
        x_new = inv @ coords / inv.sum()
        f_new = weighted_cost(NormTag.EUCLIDEAN, x_new, coords, w)
        it += 1
        step = float(np.hypot(*(x_new - x)))
        x, f = x_new, f_new
        trace.append(f)
        if step < tol:
            break

    loc = Point.from_array(x)
    return MedianResult(loc, objective(instance, loc), it, tuple(trace))


def _site_is_optimal(coords, w, hit) -> bool:
    k = int(np.flatnonzero(hit)[0])
    others = ~hit
    if not others.any():
        return True
    diff = coords[others] - coords[k]
    d = np.hypot(diff[:, 0], diff[:, 1])
    pull = (w[others] / d) @ diff
    return float(np.hypot(*pull)) <= w[hit].sum()


def solve_median(instance: Instance, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> MedianResult:
    norm = instance.norm
    if norm is NormTag.SQUARED_EUCLIDEAN:
        loc = centroid(instance)
        return MedianResult(loc, objective(instance, loc), 0)
    if norm is NormTag.RECTILINEAR:
        loc = weighted_median(instance)
        return MedianResult(loc, objective(instance, loc), 0)
    return weiszfeld(instance, tol, max_iter)
