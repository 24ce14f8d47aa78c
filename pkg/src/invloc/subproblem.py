"""Per-iteration inverse subproblems: cheapest move of the sites so that the
target beats a finite set of reference points.

Squared-Euclidean dominance constraints are linear in the modified
coordinates and go straight to the LP engine. Euclidean and rectilinear
constraints are differences of convex functions; they are handled by a
convex-concave procedure (CCP) whose rounds are LPs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    CostVector,
    Instance,
    Modification,
    NormTag,
    Point,
    distances,
    modification_cost,
)
from .errors import (
    InvalidArgumentError,
    SolverFailureError,
    SubproblemFailureError,
    SubproblemInfeasibleError,
)
from .linprog import LinearProgram, LpStatus, LpWorkspace, solve_lp

log = logging.getLogger(__name__)

FEAS_TOL = 1e-6
CCP_TOL = 1e-8
MAX_ROUNDS = 200
MAX_CUTS_PER_SITE = 500
CUT_TOL = 1e-6
PRUNE_TOL = 1e-3
_TIE = 1e-12
RESTARTS = 3


@dataclass(frozen=True, eq=False)
class DominanceConstraint:
    """``sum_i w_i (d(target, P^_i) - d(reference, P^_i)) <= 0`` with ``P^ = base + r - s``."""

    target: Point
    reference: Point
    weights: np.ndarray
    base_coords: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        base = np.asarray(self.base_coords, dtype=float).reshape(-1, 2)
        if w.size != base.shape[0]:
            raise InvalidArgumentError("weights and base coordinates differ in length")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "base_coords", base)

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True, eq=False)
class SubproblemSpec:
    norm: NormTag
    constraints: tuple[DominanceConstraint, ...]
    costs: np.ndarray
    box: float

    def __post_init__(self):
        cons = tuple(self.constraints)
        if not cons:
            raise InvalidArgumentError("a subproblem needs at least one constraint")
        n = len(cons[0])
        if any(len(c) != n for c in cons):
            raise InvalidArgumentError("constraints disagree on the number of sites")
        costs = self.costs
        if not isinstance(costs, np.ndarray):
            costs = np.array([c.as_tuple() for c in costs], dtype=float)
        costs = np.asarray(costs, dtype=float).reshape(-1, 4)
        if costs.shape[0] != n:
            raise InvalidArgumentError("cost vectors do not match the number of sites")
        if not self.box > 0:
            raise InvalidArgumentError("box must be positive")
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "costs", costs)

    @property
    def n(self) -> int:
        return len(self.constraints[0])

    @property
    def base_coords(self) -> np.ndarray:
        return self.constraints[0].base_coords

    @property
    def target(self) -> Point:
        return self.constraints[0].target

    @property
    def scale(self) -> float:
        """Magnitude of the constraint values: the target objective at the base, at least 1.

        Tolerances on constraint values are taken relative to this so that a
        75-site instance with distances in the hundreds is held to the same
        relative accuracy as a 4-site toy.
        """
        c = self.constraints[0]
        d = distances(self.norm, self.target.as_array(), c.base_coords)
        return max(1.0, float(c.weights @ d))

    @classmethod
    def build(cls, instance: Instance, target: Point, references: Sequence[Point], box: float | None = None):
        """Constraints for each reference point, all anchored at the instance's coordinates."""
        if box is None:
            box = default_box(instance, target)
        cons = tuple(
            DominanceConstraint(target, ref, instance.weights, instance.coords) for ref in references
        )
        return cls(instance.norm, cons, instance.cost_matrix, box)


@dataclass(frozen=True, eq=False)
class SubproblemSolution:
    modification: Modification
    cost: float
    feasibility_residual: float
    inner_iterations: int = 0
    # surrogate LP objective of every CCP round (empty for the exact LP)
    surrogate_trace: tuple[float, ...] = field(default=(), repr=False)


def default_box(instance: Instance, target: Point) -> float:
    coords = instance.coords
    spread = float(np.max(coords.max(axis=0) - coords.min(axis=0)))
    w = instance.weights
    total = w.sum()
    center = w @ coords / total if total > 0 else coords.mean(axis=0)
    gap = float(np.hypot(*(target.as_array() - center)))
    return 100.0 * max(spread + gap, 1.0)


def constraint_value(c: DominanceConstraint, norm: NormTag, m: Modification | None = None) -> float:
    moved = c.base_coords if m is None else c.base_coords + m.displacement
    return _value_at(c, norm, moved)


def _value_at(c: DominanceConstraint, norm: NormTag, moved: np.ndarray) -> float:
    to_target = distances(norm, c.target.as_array(), moved)
    to_ref = distances(norm, c.reference.as_array(), moved)
    return float(c.weights @ (to_target - to_ref))


def residual(spec: SubproblemSpec, m: Modification) -> float:
    return max(constraint_value(c, spec.norm, m) for c in spec.constraints)


def _finish(spec: SubproblemSpec, delta: np.ndarray, inner: int = 0, trace=()) -> SubproblemSolution:
    m = Modification.from_displacement(delta)
    return SubproblemSolution(m, modification_cost(spec.costs, m), residual(spec, m), inner, tuple(trace))


def _split_costs(costs: np.ndarray) -> np.ndarray:
    """LP cost vector in the per-site layout (r_x, r_y, s_x, s_y)."""
    return costs.reshape(-1).copy()


def _delta_from(values: np.ndarray, n: int) -> np.ndarray:
    v = np.maximum(values[: 4 * n].reshape(n, 4), 0.0)
    return v[:, 0:2] - v[:, 2:4]


# ---------------------------------------------------------------------------
# squared Euclidean: exact LP
# ---------------------------------------------------------------------------

def _sq_row(c: DominanceConstraint) -> tuple[np.ndarray, float]:
    """Coefficients on (r_x, r_y, s_x, s_y) per site and the constraint value at zero move."""
    t = c.target.as_array()
    ref = c.reference.as_array()
    grad = -2.0 * np.outer(c.weights, t - ref)  # d value / d P^_i
    coeffs = np.hstack([grad, -grad]).reshape(-1)
    w_total = c.weights.sum()
    base = w_total * (t @ t - ref @ ref) - 2.0 * (t - ref) @ (c.weights @ c.base_coords)
    return coeffs, float(base)


def build_sqeuclid_lp(spec: SubproblemSpec, box: float | None = None) -> LinearProgram:
    n = spec.n
    rows = []
    rhs = []
    for c in spec.constraints:
        coeffs, base = _sq_row(c)
        rows.append(coeffs)
        rhs.append(-base)
    box = spec.box if box is None else box
    return LinearProgram(_split_costs(spec.costs), np.array(rows), ("<=",) * len(rows), rhs,
                         np.zeros(4 * n), np.full(4 * n, box))


def solve_sqeuclid(spec: SubproblemSpec) -> SubproblemSolution:
    if spec.norm is not NormTag.SQUARED_EUCLIDEAN:
        raise InvalidArgumentError("solve_sqeuclid needs the squared-Euclidean norm")
    box = spec.box
    for attempt in range(2):
        sol = solve_lp(build_sqeuclid_lp(spec, box))
        if sol.status is LpStatus.OPTIMAL:
            return _finish(spec, _delta_from(sol.values, spec.n), 1)
        if sol.status is LpStatus.INFEASIBLE:
            if attempt == 0:
                box *= 10.0
                continue
            raise SubproblemInfeasibleError("no modification within the box satisfies the constraints")
        if attempt == 0:
            log.warning("unbounded subproblem LP, growing box to %g", box * 10)
            box *= 10.0
            continue
        raise SolverFailureError("subproblem LP unbounded even after growing the box")
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# Euclidean / rectilinear: convex-concave procedure
# ---------------------------------------------------------------------------

class _RectilinearModel:
    """Surrogate LP of one CCP round for the rectilinear norm.

    Column layout: 4 per site (r_x, r_y, s_x, s_y), then one column per
    site-axis whose base lies off the target's coordinate (the leg that first
    closes the gap, bounded by the gap), then one penalty slack per dominance
    constraint. With these legs |t - P^_i| is exactly linear: moving toward
    the target is paid back by the closing leg, anything beyond is overshoot.
    """

    def __init__(self, spec: SubproblemSpec, penalty: float):
        self.spec = spec
        self.n = spec.n
        self.penalty = penalty
        self.t = spec.target.as_array()
        self.base = spec.base_coords
        self.w = spec.constraints[0].weights
        gap = self.t[None, :] - self.base  # (n, 2)
        self.gap = gap
        self.close_axes = [(i, a) for i in range(self.n) for a in range(2) if abs(gap[i, a]) > _TIE]
        self.lp_solves = 0

    def _convex_terms(self, ncols_base):
        """Coefficients of sum_i w_i |t - P^_i|_1 on the columns, plus its constant part."""
        coef = np.zeros(ncols_base + len(self.close_axes))
        const = 0.0
        for i in range(self.n):
            for a in range(2):
                wi = self.w[i]
                coef[4 * i + a] += wi
                coef[4 * i + 2 + a] += wi
                const += wi * abs(self.gap[i, a]) if abs(self.gap[i, a]) > _TIE else 0.0
        for k, (i, _) in enumerate(self.close_axes):
            coef[ncols_base + k] = -self.w[i]
        return coef, const

    def build(self, point: np.ndarray) -> tuple[LinearProgram, np.ndarray]:
        """Surrogate LP linearised at the modified coordinates ``point``; also returns the move map."""
        spec = self.spec
        n = self.n
        base_cols = 4 * n
        cost = list(_split_costs(spec.costs))
        lower = [0.0] * base_cols
        upper = [spec.box] * base_cols
        move = np.zeros((n, 2, base_cols + len(self.close_axes)))
        for i in range(n):
            for a in range(2):
                move[i, a, 4 * i + a] = 1.0
                move[i, a, 4 * i + 2 + a] = -1.0
        for k, (i, a) in enumerate(self.close_axes):
            sign = 1.0 if self.gap[i, a] > 0 else -1.0
            c = spec.costs[i, a] if sign > 0 else spec.costs[i, 2 + a]
            cost.append(c)
            lower.append(0.0)
            upper.append(abs(self.gap[i, a]))
            move[i, a, base_cols + k] = sign
        ncols = base_cols + len(self.close_axes)
        convex_coef, convex_const = self._convex_terms(base_cols)

        n_cons = len(spec.constraints)
        rows = []
        rhs = []
        for ci, c in enumerate(spec.constraints):
            ref = c.reference.as_array()
            conc_coef = np.zeros(ncols)
            conc_const = 0.0
            for i in range(n):
                val, g = _concave_linearization(NormTag.RECTILINEAR, ref, point[i])
                # d(ref, P^_i) ~ val + g . (base_i + move_i - point_i)
                conc_coef += self.w[i] * (g[0] * move[i, 0] + g[1] * move[i, 1])
                conc_const += self.w[i] * (val + g @ (self.base[i] - point[i]))
            row = np.zeros(ncols + n_cons)
            row[:ncols] = convex_coef - conc_coef
            row[ncols + ci] = -1.0  # penalty slack
            rows.append(row)
            rhs.append(conc_const - convex_const)
        cost.extend([self.penalty] * n_cons)
        lower.extend([0.0] * n_cons)
        upper.extend([np.inf] * n_cons)
        lp = LinearProgram(np.array(cost), np.array(rows), ("<=",) * len(rows), rhs,
                           np.array(lower), np.array(upper))
        return lp, move

    def round(self, point: np.ndarray) -> tuple[float, np.ndarray]:
        lp, move = self.build(point)
        sol = solve_lp(lp)
        self.lp_solves += 1
        if sol.status is not LpStatus.OPTIMAL:
            raise SolverFailureError(f"CCP surrogate LP returned {sol.status.value}")
        x = sol.values[: move.shape[2]]
        return sol.objective, np.einsum("iak,k->ia", move, x)


class _EuclideanModel:
    """Surrogate LPs of the CCP rounds for the Euclidean norm, kept in one warm workspace.

    Columns: 4 move columns per site, one free epigraph column per site
    holding ``tau_i - |base_i - t|`` (so every cut row has a nonnegative
    right-hand side and the all-slack basis is feasible), then one penalty
    slack per dominance row. Each round appends freshly linearised dominance
    rows and retires the previous ones; within a round, Kelley cuts
    ``tau_i >= g . (P^_i - t)`` are appended until the cut model is accurate
    at the LP solution.
    """

    def __init__(self, spec: SubproblemSpec, penalty: float, cut_tol: float):
        self.spec = spec
        n = self.n = spec.n
        self.penalty = penalty
        self.cut_tol = cut_tol
        self.t = spec.target.as_array()
        self.base = spec.base_coords
        self.w = spec.constraints[0].weights
        self.d0 = np.hypot(*(self.base - self.t).T)
        self.cuts: dict[int, tuple[int, np.ndarray]] = {}  # row handle -> (site, gradient)
        self.dominance: list[tuple[list[int], list[int]]] = []  # (row handles, slack vars)
        self.lp_solves = 0
        cost = np.concatenate([_split_costs(spec.costs), np.zeros(n)])
        lower = np.concatenate([np.zeros(4 * n), np.full(n, -np.inf)])
        upper = np.concatenate([np.full(4 * n, spec.box), np.full(n, np.inf)])
        self.ws = LpWorkspace(LinearProgram(cost, np.zeros((0, 5 * n)), (), [], lower, upper))

    def _move_row(self, i: int, g: np.ndarray) -> np.ndarray:
        row = np.zeros(self.ws.num_vars)
        row[4 * i: 4 * i + 4] = (g[0], g[1], -g[0], -g[1])
        return row

    def _site_cuts(self, i: int) -> tuple[list[int], np.ndarray]:
        hs = [h for h, (site, _) in self.cuts.items() if site == i]
        return hs, np.array([self.cuts[h][1] for h in hs]).reshape(-1, 2)

    def add_cut(self, i: int, g: np.ndarray) -> bool:
        hs, grads = self._site_cuts(i)
        if len(hs) >= MAX_CUTS_PER_SITE or (grads.size and np.abs(grads - g).max(axis=1).min() <= 1e-12):
            return False
        row = self._move_row(i, g)
        row[4 * self.n + i] = -1.0
        (h,) = self.ws.add_rows(row[None, :], [self.d0[i] - g @ (self.base[i] - self.t)])
        self.cuts[h] = (i, g.copy())
        return True

    def model_values(self, moved: np.ndarray) -> np.ndarray:
        out = np.full(self.n, -np.inf)
        for i, g in self.cuts.values():
            out[i] = max(out[i], g @ (moved[i] - self.t))
        return out

    def _unit(self, v: np.ndarray) -> np.ndarray:
        d = float(np.hypot(*v))
        return np.zeros(2) if d <= _TIE else v / d

    def start_round(self, point: np.ndarray) -> None:
        protected = set()
        for i in range(self.n):
            g = self._unit(point[i] - self.t)
            if not g.any():
                g = np.array([1.0, 0.0])  # any unit vector is a valid cut at the target itself
            self.add_cut(i, g)
            # the anchor cuts: a cut whose slope equals the concave slope is exact
            # where the site's term bottoms out, so the model cannot over-promise
            for c in self.spec.constraints:
                _, gr = _concave_linearization(NormTag.EUCLIDEAN, c.reference.as_array(), point[i])
                if gr.any():
                    self.add_cut(i, gr)
        conc = [[_concave_linearization(NormTag.EUCLIDEAN, c.reference.as_array(), point[i])[1]
                 for c in self.spec.constraints] for i in range(self.n)]
        for h, (i, g) in self.cuts.items():
            exact = abs(g @ (point[i] - self.t) - np.hypot(*(point[i] - self.t))) <= 1e-9 * (1 + self.d0[i])
            if exact or any(np.abs(g - gr).max() <= 1e-12 for gr in conc[i]):
                protected.add(h)

        # fresh dominance rows linearised at ``point``
        n = self.n
        handles, slacks = [], []
        for c in self.spec.constraints:
            (sv,) = self.ws.add_variables([self.penalty], [0.0], [np.inf])
            ref = c.reference.as_array()
            row = np.zeros(self.ws.num_vars)
            rhs = -float(self.w @ self.d0)
            row[4 * n: 5 * n] = self.w
            for i in range(n):
                val, g = _concave_linearization(NormTag.EUCLIDEAN, ref, point[i])
                row -= self.w[i] * self._move_row(i, g)[: self.ws.num_vars]
                rhs += self.w[i] * (val + g @ (self.base[i] - point[i]))
            row[sv] = -1.0
            handles.extend(self.ws.add_rows(row[None, :], [rhs]))
            slacks.append(sv)
        old = self.dominance
        self.dominance = [(handles, slacks)]
        if old:
            self._solve()
            for hs, vs in old:
                for v in vs:
                    self.ws.set_cost(v, 0.0)
            self._solve()
            for hs, vs in old:
                dropped = self.ws.drop_rows(hs, vs)
                left = [h for h in hs if h not in dropped]
                if left:
                    self.dominance.append((left, vs))
        # inactive cuts that are not needed to anchor the model go away
        self.protected = protected
        stale = [h for h in self.cuts if h not in protected]
        if stale:
            for h in self.ws.drop_rows(stale):
                del self.cuts[h]

    def _solve(self):
        sol = self.ws.solve()
        self.lp_solves += 1
        if sol.status is not LpStatus.OPTIMAL:
            raise SolverFailureError(f"CCP surrogate LP returned {sol.status.value}")
        return sol

    def round(self, point: np.ndarray) -> tuple[float, np.ndarray]:
        self.start_round(point)
        n = self.n
        while True:
            sol = self._solve()
            v = sol.values[: 4 * n].reshape(n, 4)
            delta = v[:, :2] - v[:, 2:]
            moved = self.base + delta
            true = np.hypot(*(moved - self.t).T)
            gap = self.w * (true - self.model_values(moved))
            added = False
            for i in np.flatnonzero(gap > self.cut_tol):
                added |= self.add_cut(i, self._unit(moved[i] - self.t))
            if not added:
                return sol.objective, delta
            self._drop_slack_cuts(moved)

    def _drop_slack_cuts(self, moved: np.ndarray) -> None:
        """Forget cuts that are clearly loose at ``moved`` so the tableau stays small."""
        top = self.model_values(moved)
        loose = [h for h, (i, g) in self.cuts.items()
                 if h not in self.protected and g @ (moved[i] - self.t) < top[i] - PRUNE_TOL * (1.0 + top[i])]
        for h in self.ws.drop_rows(loose):
            del self.cuts[h]


def _concave_linearization(norm: NormTag, ref: np.ndarray, p: np.ndarray) -> tuple[float, np.ndarray]:
    """Value and a subgradient (w.r.t. the site) of d(ref, site) at ``p``."""
    diff = p - ref
    if norm is NormTag.EUCLIDEAN:
        d = float(np.hypot(*diff))
        if d <= _TIE:
            return d, np.zeros(2)
        return d, diff / d
    g = np.where(np.abs(diff) <= _TIE, 0.0, np.sign(diff))
    return float(np.abs(diff).sum()), g


def _penalty(spec: SubproblemSpec) -> float:
    w = spec.constraints[0].weights
    pos = w[w > 0]
    min_w = float(pos.min()) if pos.size else 1.0
    return 1e3 * (float(spec.costs.max(initial=0.0)) + 1.0) / min_w


def solve_ccp(
    spec: SubproblemSpec,
    start: Modification | None = None,
    ccp_tol: float = CCP_TOL,
    max_rounds: int = MAX_ROUNDS,
    feas_tol: float = FEAS_TOL,
) -> SubproblemSolution:
    """Local solution of a Euclidean/rectilinear subproblem by convex-concave rounds."""
    if spec.norm is NormTag.SQUARED_EUCLIDEAN:
        raise InvalidArgumentError("solve_ccp handles the Euclidean and rectilinear norms only")
    n = spec.n
    base = spec.base_coords
    if start is not None and len(start) != n:
        raise InvalidArgumentError("start modification has the wrong length")
    delta = np.zeros((n, 2)) if start is None else start.displacement.copy()

    feas_tol = feas_tol * spec.scale
    zero = _finish(spec, np.zeros((n, 2)))
    if zero.feasibility_residual <= feas_tol:
        return zero

    if spec.norm is NormTag.EUCLIDEAN:
        # the cut model may undershoot by at most a tenth of the feasibility tolerance
        model = _EuclideanModel(spec, _penalty(spec), 0.1 * CUT_TOL * spec.scale / max(n, 1))
    else:
        model = _RectilinearModel(spec, _penalty(spec))

    best: SubproblemSolution | None = None
    best_resid = np.inf
    trace = []
    prev_cost = np.inf
    for _ in range(max_rounds):
        objective, new_delta = model.round(base + delta)
        trace.append(objective)
        cand = _finish(spec, new_delta, model.lp_solves, trace)
        best_resid = min(best_resid, cand.feasibility_residual)
        feasible = cand.feasibility_residual <= feas_tol
        if feasible and (best is None or cand.cost < best.cost):
            best = cand
        moved = float(np.max(np.abs(new_delta - delta)))
        delta = new_delta
        if feasible and abs(prev_cost - cand.cost) < ccp_tol * max(1.0, cand.cost):
            break
        if feasible and moved <= 1e-12:
            break
        prev_cost = cand.cost if feasible else np.inf

    if best is None:
        raise SubproblemFailureError(
            f"CCP found no feasible modification in {max_rounds} rounds", best_resid
        )
    return SubproblemSolution(best.modification, best.cost, best.feasibility_residual,
                              model.lp_solves, tuple(trace))


def solve(spec: SubproblemSpec, start: Modification | None = None, seed: int = 0) -> SubproblemSolution:
    """Dispatch on the norm; a failed CCP is retried from seeded random starts."""
    if spec.norm is NormTag.SQUARED_EUCLIDEAN:
        return solve_sqeuclid(spec)
    try:
        return solve_ccp(spec, start)
    except SubproblemFailureError as exc:
        last = exc
    for k in range(RESTARTS):
        log.info("CCP failed (residual %.3g), restart %d from a random start", last.best_residual, k + 1)
        try:
            return solve_ccp(spec, random_start(spec, seed + k))
        except SubproblemFailureError as exc:
            last = exc
    raise last


def random_start(spec: SubproblemSpec, seed: int) -> Modification:
    """Move each site a random fraction of the way toward the target."""
    rng = np.random.default_rng(seed)
    frac = rng.uniform(0.0, 1.0, size=(spec.n, 1))
    delta = frac * (spec.target.as_array() - spec.base_coords)
    return Modification.from_displacement(delta)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def oracle_grid(spec: SubproblemSpec, resolution: float, radius: float) -> SubproblemSolution:
    """Exhaustive search over per-site net displacements on a square grid (n <= 2)."""
    n = spec.n
    if n > 2:
        raise InvalidArgumentError("oracle_grid supports at most two sites")
    k = int(np.floor(radius / resolution + 1e-9))
    steps = np.arange(-k, k + 1) * resolution
    gx, gy = np.meshgrid(steps, steps, indexing="ij")
    offsets = np.column_stack([gx.ravel(), gy.ravel()])

    per_site_cost = []
    per_site_terms = []  # (n_constraints, n_offsets)
    for i in range(n):
        c = spec.costs[i]
        cost = (np.maximum(offsets, 0) @ c[:2]) + (np.maximum(-offsets, 0) @ c[2:])
        moved = spec.base_coords[i] + offsets
        terms = []
        for con in spec.constraints:
            dt = distances(spec.norm, con.target.as_array(), moved)
            dr = distances(spec.norm, con.reference.as_array(), moved)
            terms.append(con.weights[i] * (dt - dr))
        per_site_cost.append(cost)
        per_site_terms.append(np.array(terms))

    best_cost = np.inf
    best_idx = None
    if n == 1:
        ok = np.all(per_site_terms[0] <= 0.0, axis=0)
        if ok.any():
            costs = np.where(ok, per_site_cost[0], np.inf)
            j = int(np.argmin(costs))
            best_cost, best_idx = costs[j], (j,)
    else:
        t0, t1 = per_site_terms
        c0, c1 = per_site_cost
        order = np.argsort(c0, kind="stable")
        for j in order:
            if c0[j] >= best_cost:
                break
            ok = np.all(t0[:, j : j + 1] + t1 <= 0.0, axis=0)
            if not ok.any():
                continue
            costs = np.where(ok, c0[j] + c1, np.inf)
            m = int(np.argmin(costs))
            if costs[m] < best_cost:
                best_cost, best_idx = costs[m], (int(j), m)
    if best_idx is None:
        raise SubproblemInfeasibleError("no grid point satisfies the constraints")
    delta = np.array([offsets[j] for j in best_idx])
    return _finish(spec, delta)
