"""Row-generation solvers for the inverse minisum problem with variable coordinates.

``isflp1`` keeps every median found so far as a dominance constraint,
``isflp2`` keeps only the latest one. ``baseline_sqeuclid`` is the exact
single-LP answer for the squared-Euclidean norm, where the target is optimal
exactly when it is the weighted centroid of the modified sites.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import subproblem
from .core import Instance, Modification, NormTag, Point, displacement_cost, modification_cost, objective
from .errors import (
    InvalidArgumentError,
    SolverFailureError,
    SubproblemFailureError,
    SubproblemInfeasibleError,
)
from .forward import DEFAULT_MAX_ITER, DEFAULT_TOL, solve_median
from .linprog import LinearProgram, LpStatus, solve_lp

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER_INVERSE = 500
EXACT_REL_TOL = 1e-9


class StopKind(enum.Enum):
    RELATIVE_GAP = "gap"
    TARGET_DISTANCE = "dist"
    COORDINATE_FIXPOINT = "fixpoint"


class StopReason(enum.Enum):
    GAP_MET = "GapMet"
    FIXPOINT = "Fixpoint"
    TARGET_HIT = "TargetHit"
    MAX_ITERATIONS = "MaxIterations"
    SUBPROBLEM_FAILED = "SubproblemFailed"


@dataclass(frozen=True)
class StopRule:
    kind: StopKind
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidArgumentError("stop epsilon must be positive")


@dataclass(frozen=True, eq=False)
class IterationRecord:
    k: int
    median: Point
    median_value: float
    target_value: float
    coords: np.ndarray
    step_cost: float
    gap: float
    target: Point | None = None


@dataclass(eq=False)
class SolveReport:
    initial: Instance
    target: Point
    final_coords: np.ndarray
    accumulated_cost: float
    net_cost: float
    iterations: list[IterationRecord]
    stop_reason: StopReason
    elapsed_seconds: float
    message: str = ""
    modifications: list[Modification] = field(default_factory=list, repr=False)

    @property
    def final_instance(self) -> Instance:
        return self.initial.with_coords(self.final_coords)

    @property
    def final_points(self) -> list[Point]:
        return [Point.from_array(p) for p in self.final_coords]

    @property
    def last(self) -> IterationRecord | None:
        return self.iterations[-1] if self.iterations else None

    @property
    def num_iterations(self) -> int:
        """Inverse iterations performed (records after the initial one)."""
        return max(len(self.iterations) - 1, 0)


def relative_gap(target_value: float, median_value: float) -> float:
    diff = abs(target_value - median_value)
    if target_value == 0:
        return 0.0 if diff == 0 else math.inf
    return diff / abs(target_value)


def check_stop(rule: StopRule, record: IterationRecord, prev_coords=None) -> bool:
    if rule.kind is StopKind.RELATIVE_GAP:
        return relative_gap(record.target_value, record.median_value) <= rule.epsilon
    if rule.kind is StopKind.TARGET_DISTANCE:
        if record.target is None:
            raise InvalidArgumentError("record carries no target point")
        dx = record.target.x - record.median.x
        dy = record.target.y - record.median.y
        return math.hypot(dx, dy) <= rule.epsilon
    if prev_coords is None:
        raise InvalidArgumentError("fixpoint test needs the previous coordinates")
    prev = np.asarray(prev_coords, dtype=float).reshape(-1, 2)
    step = np.hypot(*(np.asarray(record.coords) - prev).T)
    return float(step.max(initial=0.0)) <= rule.epsilon


def _is_exact(target_value: float, median_value: float) -> bool:
    return abs(target_value - median_value) <= EXACT_REL_TOL * max(abs(target_value), 1e-300)


def _record(k, instance, target, med, step_cost) -> IterationRecord:
    f_target = objective(instance, target)
    return IterationRecord(
        k=k,
        median=med.location,
        median_value=med.value,
        target_value=f_target,
        coords=instance.coords.copy(),
        step_cost=step_cost,
        gap=relative_gap(f_target, med.value),
        target=target,
    )


def _run(
    instance: Instance,
    target: Point,
    stop: StopRule,
    max_iter: int,
    keep_all: bool,
    seed: int = 0,
    forward_tol: float = DEFAULT_TOL,
    forward_max_iter: int = DEFAULT_MAX_ITER,
    box: float | None = None,
    on_spec: Callable[[subproblem.SubproblemSpec], None] | None = None,
) -> SolveReport:
    t0 = time.perf_counter()
    instance.require_weight()
    if max_iter < 1:
        raise InvalidArgumentError("max_iter must be positive")
    if box is None:
        box = subproblem.default_box(instance, target)
    costs = instance.cost_matrix

    current = instance
    med = solve_median(current, forward_tol, forward_max_iter)
    records: list[IterationRecord] = []
    mods: list[Modification] = []
    accumulated = 0.0

    def report(reason, message=""):
        final = current.coords.copy()
        net = displacement_cost(costs, final - instance.coords)
        return SolveReport(instance, target, final, accumulated, net, records, reason,
                           time.perf_counter() - t0, message, mods)

    first = _record(0, current, target, med, 0.0)
    if _is_exact(first.target_value, first.median_value):
        return report(StopReason.TARGET_HIT)
    records.append(first)

    references = [med.location]
    prev_mod: Modification | None = None
    k = 0
    while True:
        if k >= max_iter:
            return report(StopReason.MAX_ITERATIONS)
        refs = references if keep_all else references[-1:]
        spec = subproblem.SubproblemSpec.build(current, target, refs, box)
        if on_spec is not None:
            on_spec(spec)
        start = None if prev_mod is None else _warm_start(prev_mod)
        try:
            sol = subproblem.solve(spec, start, seed + k)
        except (SubproblemFailureError, SubproblemInfeasibleError, SolverFailureError) as exc:
            log.warning("subproblem failed at iteration %d: %s", k, exc)
            return report(StopReason.SUBPROBLEM_FAILED, str(exc))
        prev_mod = sol.modification
        mods.append(sol.modification)
        prev_coords = current.coords
        current = current.with_coords(prev_coords + sol.modification.displacement)
        accumulated += sol.cost
        k += 1
        med = solve_median(current, forward_tol, forward_max_iter)
        rec = _record(k, current, target, med, sol.cost)
        records.append(rec)
        log.debug("iter %d median=(%.6f, %.6f) gap=%.3g step_cost=%.6g",
                  k, med.location.x, med.location.y, rec.gap, sol.cost)
        if check_stop(stop, rec, prev_coords):
            return report(_reason_for(stop.kind))
        if _is_exact(rec.target_value, rec.median_value):
            return report(StopReason.TARGET_HIT)
        references.append(med.location)


def _warm_start(prev: Modification) -> Modification:
    return prev


def _reason_for(kind: StopKind) -> StopReason:
    return {
        StopKind.RELATIVE_GAP: StopReason.GAP_MET,
        StopKind.TARGET_DISTANCE: StopReason.TARGET_HIT,
        StopKind.COORDINATE_FIXPOINT: StopReason.FIXPOINT,
    }[kind]


def isflp1(instance: Instance, target: Point, stop: StopRule,
           max_iter: int = DEFAULT_MAX_ITER_INVERSE, **kwargs) -> SolveReport:
    """Row generation keeping a dominance constraint for every median found so far."""
    return _run(instance, target, stop, max_iter, keep_all=True, **kwargs)


def isflp2(instance: Instance, target: Point, stop: StopRule,
           max_iter: int = DEFAULT_MAX_ITER_INVERSE, **kwargs) -> SolveReport:
    """Same as :func:`isflp1` but each subproblem only sees the latest median."""
    return _run(instance, target, stop, max_iter, keep_all=False, **kwargs)


def build_baseline_lp(instance: Instance, target: Point, box: float | None = None) -> LinearProgram:
    """Cheapest move making ``target`` the weighted centroid of the sites."""
    n = len(instance)
    w = instance.weights
    total = instance.require_weight()
    if box is None:
        box = subproblem.default_box(instance, target)
    a = np.zeros((2, 4 * n))
    for axis in range(2):
        a[axis, axis::4] = w
        a[axis, 2 + axis::4] = -w
    shift = total * target.as_array() - w @ instance.coords
    return LinearProgram(instance.cost_matrix.reshape(-1).copy(), a, ("=", "="), shift,
                         np.zeros(4 * n), np.full(4 * n, box))


def baseline_sqeuclid(instance: Instance, target: Point, box: float | None = None) -> SolveReport:
    if instance.norm is not NormTag.SQUARED_EUCLIDEAN:
        raise InvalidArgumentError("baseline requires squared-Euclidean norm")
    t0 = time.perf_counter()
    lp = build_baseline_lp(instance, target, box)
    sol = solve_lp(lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise SolverFailureError(f"baseline LP returned {sol.status.value}")
    v = np.maximum(sol.values.reshape(-1, 4), 0.0)
    mod = Modification.from_displacement(v[:, :2] - v[:, 2:])
    final = instance.coords + mod.displacement
    cost = modification_cost(instance.cost_matrix, mod)
    moved = instance.with_coords(final)
    med = solve_median(moved)
    rec = _record(0, moved, target, med, cost)
    return SolveReport(instance, target, final, cost, cost, [rec], StopReason.TARGET_HIT,
                       time.perf_counter() - t0, "", [mod])


def probe_feasibility(instance: Instance, target: Point, probes: int = 1000, seed: int = 0,
                      extra: Sequence[Point] = ()) -> float:
    """Largest ``F(target) - F(x)`` over random probe points x (<= 0 means no probe beats the target)."""
    rng = np.random.default_rng(seed)
    coords = instance.coords
    lo = np.minimum(coords.min(axis=0), target.as_array()) - 1.0
    hi = np.maximum(coords.max(axis=0), target.as_array()) + 1.0
    pts = rng.uniform(lo, hi, size=(probes, 2))
    near = target.as_array() + rng.normal(scale=0.05 * float(np.max(hi - lo)), size=(probes // 4, 2))
    pts = np.vstack([pts, near, coords] + [np.array([[p.x, p.y]]) for p in extra])
    f_target = objective(instance, target)
    values = np.array([objective(instance, p) for p in pts])
    return float(f_target - values.min())
