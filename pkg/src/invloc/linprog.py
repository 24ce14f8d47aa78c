"""Dense two-phase primal simplex with bounded variables and Bland's rule.

Variables are shifted/reflected so that every column lives in ``[0, u]``;
finite upper bounds are handled by bound flipping rather than extra rows, so
the tableau only has one row per linear constraint.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import InvalidArgumentError, SolverFailureError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
MAX_PIVOTS = 1_000_000
REFACTOR_EVERY = 100

_RELATIONS = {"<=": "<=", "≤": "<=", "=": "=", "==": "=", ">=": ">=", "≥": ">="}


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize ``cost @ x`` subject to ``a[i] @ x (rel) rhs[i]`` and ``lower <= x <= upper``.

    Bounds default to ``0 <= x < inf``.
    """

    cost: np.ndarray
    a: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=float).ravel()
        n = cost.size
        if n < 1:
            raise InvalidArgumentError("an LP needs at least one variable")
        a = np.asarray(self.a, dtype=float)
        if a.size == 0:
            a = a.reshape(0, n)
        if a.ndim != 2 or a.shape[1] != n:
            raise InvalidArgumentError(f"constraint matrix has shape {a.shape}, expected (m, {n})")
        rhs = np.asarray(self.rhs, dtype=float).ravel()
        relations = tuple(self.relations)
        if rhs.size != a.shape[0] or len(relations) != a.shape[0]:
            raise InvalidArgumentError("rhs/relations do not match the number of rows")
        try:
            relations = tuple(_RELATIONS[r] for r in relations)
        except KeyError as exc:
            raise InvalidArgumentError(f"unknown relation {exc.args[0]!r}") from None
        lower = _bound_vector(self.lower, n, 0.0)
        upper = _bound_vector(self.upper, n, np.inf)
        if np.any(lower > upper):
            raise InvalidArgumentError("lower bound exceeds upper bound")
        if np.any(np.isnan(a)) or np.any(np.isnan(cost)) or np.any(np.isnan(rhs)):
            raise InvalidArgumentError("NaN in LP data")
        for name, val in (("cost", cost), ("a", a), ("relations", relations), ("rhs", rhs),
                          ("lower", lower), ("upper", upper)):
            object.__setattr__(self, name, val)

    @property
    def num_vars(self) -> int:
        return self.cost.size

    @classmethod
    def from_rows(cls, cost, rows: Iterable[tuple[Sequence[float], str, float]], lower=None, upper=None):
        cost = np.asarray(cost, dtype=float)
        rows = list(rows)
        for coeffs, _, _ in rows:
            if len(coeffs) != cost.size:
                raise InvalidArgumentError(
                    f"row has {len(coeffs)} coefficients, LP has {cost.size} variables"
                )
        a = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), cost.size)
        return cls(cost, a, tuple(r[1] for r in rows), [r[2] for r in rows], lower, upper)

    def row_activity(self, x) -> np.ndarray:
        return self.a @ np.asarray(x, dtype=float)

    def max_violation(self, x) -> float:
        """Largest row or bound violation of ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        act = self.row_activity(x)
        viol = [0.0]
        for rel, lhs, b in zip(self.relations, act, self.rhs):
            if rel == "<=":
                viol.append(lhs - b)
            elif rel == ">=":
                viol.append(b - lhs)
            else:
                viol.append(abs(lhs - b))
        viol.append(float(np.max(self.lower - x, initial=0.0)))
        viol.append(float(np.max(x - self.upper, initial=0.0)))
        return max(viol)

    def dump(self, sink: TextIO) -> None:
        """Plain-text layout: cost row, one line per constraint, then bounds as comments."""
        sink.write(" ".join(_fmt(v) for v in self.cost) + "\n")
        for coeffs, rel, b in zip(self.a, self.relations, self.rhs):
            sink.write(" ".join(_fmt(v) for v in coeffs) + f" {rel} {_fmt(b)}\n")
        sink.write("# lower " + " ".join(_fmt(v) for v in self.lower) + "\n")
        sink.write("# upper " + " ".join(_fmt(v) for v in self.upper) + "\n")


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    values: np.ndarray
    objective: float
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _fmt(v: float) -> str:
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _bound_vector(v, n, default):
    if v is None:
        return np.full(n, default)
    arr = np.asarray(v, dtype=float).ravel()
    if arr.size == 1 and n != 1:
        arr = np.full(n, float(arr[0]))
    if arr.size != n:
        raise InvalidArgumentError(f"bound vector has length {arr.size}, expected {n}")
    return arr


def solve_lp(lp: LinearProgram, max_pivots: int = MAX_PIVOTS) -> LpSolution:
    std = _Standardized(lp)
    solver = _BoundedSimplex(std.a, std.b, std.upper, max_pivots)
    status = solver.run(std.cost)
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, np.full(lp.num_vars, np.nan),
                          np.inf if status is LpStatus.INFEASIBLE else -np.inf, solver.pivots)
    x = std.recover(solver.values())
    return LpSolution(LpStatus.OPTIMAL, x, float(lp.cost @ x), solver.pivots)


class LpWorkspace:
    """An LP that stays factorised between solves.

    Rows (always ``<=``) and new variables can be appended, rows retired and
    costs changed; :meth:`solve` then re-optimises from the previous basis
    instead of starting over. Every variable needs a finite lower bound or
    must be free. Row handles returned by :meth:`add_rows` stay valid until
    the row is dropped.
    """

    def __init__(self, lp: LinearProgram, max_pivots: int = MAX_PIVOTS):
        self.max_pivots = max_pivots
        self._cost = list(lp.cost)
        self._lower = list(lp.lower)
        self._upper = list(lp.upper)
        self._rows: dict[int, tuple[np.ndarray, str, float]] = {}
        for coeffs, rel, b in zip(lp.a, lp.relations, lp.rhs):
            self._rows[len(self._rows)] = (coeffs.copy(), rel, float(b))
        self._next_row = len(self._rows)
        self._solver: _BoundedSimplex | None = None
        self.pivots = 0

    @property
    def num_vars(self) -> int:
        return len(self._cost)

    def current_lp(self) -> LinearProgram:
        n = self.num_vars
        rows = [(np.pad(c, (0, n - c.size)), rel, b) for c, rel, b in self._rows.values()]
        return LinearProgram.from_rows(self._cost, rows, self._lower, self._upper)

    # -- edits ------------------------------------------------------------
    def add_variables(self, cost, lower, upper) -> list[int]:
        """New variables that may only appear in rows added afterwards."""
        cost = np.atleast_1d(np.asarray(cost, dtype=float))
        lower = np.broadcast_to(np.asarray(lower, dtype=float), cost.shape)
        upper = np.broadcast_to(np.asarray(upper, dtype=float), cost.shape)
        first = self.num_vars
        self._cost.extend(cost)
        self._lower.extend(lower)
        self._upper.extend(upper)
        self._pending_vars = getattr(self, "_pending_vars", []) + list(range(first, self.num_vars))
        return list(range(first, self.num_vars))

    def add_rows(self, rows, rhs) -> list[int]:
        """Append ``rows @ x <= rhs``; returns one handle per row."""
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if rows.shape[1] != self.num_vars or rhs.size != rows.shape[0]:
            raise InvalidArgumentError("row shape does not match the workspace")
        handles = []
        for coeffs, b in zip(rows, rhs):
            self._rows[self._next_row] = (coeffs.copy(), "<=", float(b))
            handles.append(self._next_row)
            self._next_row += 1
        if self._solver is not None:
            self._push_rows(rows, rhs, handles)
        return handles

    def set_cost(self, var: int, value: float) -> None:
        self._cost[var] = float(value)
        if self._solver is not None:
            for col, sign in self._var_cols[var]:
                self._solver.set_cost(col, sign * value)

    def drop_rows(self, handles: Sequence[int], private_vars: Sequence[int] = ()) -> list[int]:
        """Retire rows whose slack or one of ``private_vars`` is basic in them.

        ``private_vars`` must only appear in the dropped rows; they are fixed
        at zero afterwards. Rows that cannot be removed without a pivot are
        kept; the handles actually dropped are returned.
        """
        handles = [h for h in handles if h in self._rows]
        if self._solver is None:
            for h in handles:
                del self._rows[h]
            for v in private_vars:
                self._retire_var(v)
            return handles
        sol = self._solver
        priv_cols = {c for v in private_vars for c, _ in self._var_cols.get(v, [])}
        basic_pos = {int(col): r for r, col in enumerate(sol.basis)}
        # a row can go once some column living only in the dropped rows is
        # basic somewhere: that tableau row leaves together with the column
        drop_orig, drop_tab, drop_c, dropped = [], [], set(), []
        spare = sorted(c for c in priv_cols if c in basic_pos)
        for h in handles:
            slack = self._slack_col[h]
            if slack in basic_pos:
                owner = slack
            elif spare:
                owner = spare.pop()
            else:
                continue
            drop_orig.append(self._row_pos[h])
            drop_tab.append(basic_pos[owner])
            dropped.append(h)
            drop_c.update((owner, slack))
        drop_c.discard(-1)
        drop_pos = set(drop_orig)
        for c in priv_cols:
            touching = np.flatnonzero(np.abs(sol.a0[:, c]) > 0)
            if set(touching.tolist()) <= drop_pos and (c not in basic_pos or basic_pos[c] in drop_tab):
                drop_c.add(c)
        if any(c in basic_pos and basic_pos[c] not in drop_tab for c in drop_c):
            raise SolverFailureError("row drop would remove a basic column")
        if not drop_orig:
            return []
        sol.drop_rows(sorted(drop_orig), sorted(drop_tab), sorted(drop_c))
        self._reindex_after_drop(sorted(drop_orig), sorted(drop_c))
        for h in dropped:
            del self._rows[h]
        for v in private_vars:
            if all(c in drop_c for c, _ in self._var_cols.get(v, [])):
                self._retire_var(v)
        return dropped

    # -- solving ----------------------------------------------------------
    def solve(self) -> LpSolution:
        if self._solver is None:
            return self._cold()
        before = self._solver.pivots
        try:
            status = self._solver.reoptimize()
        except (SolverFailureError, np.linalg.LinAlgError):
            return self._cold()
        self.pivots += self._solver.pivots - before
        if status is not LpStatus.OPTIMAL:
            return self._cold()
        return self._solution()

    def _cold(self) -> LpSolution:
        lp = self.current_lp()
        std = _Standardized(lp)
        solver = _BoundedSimplex(std.a, std.b, std.upper, self.max_pivots)
        status = solver.run(std.cost)
        self.pivots += solver.pivots
        self._pending_vars = []
        if status is not LpStatus.OPTIMAL:
            self._solver = None
            return LpSolution(status, np.full(lp.num_vars, np.nan),
                              np.inf if status is LpStatus.INFEASIBLE else -np.inf, solver.pivots)
        self._solver = solver
        self._shift = std.shift.copy()
        self._col_var = np.full(solver.tab.shape[1], -1, dtype=int)
        self._col_sign = np.zeros(solver.tab.shape[1])
        self._var_cols = {}
        for c, (j, sign) in enumerate(std.cols):
            self._col_var[c] = j
            self._col_sign[c] = sign
            self._var_cols.setdefault(j, []).append((c, sign))
        # slack of row k sits after the structural columns; equality rows have none
        handles = list(self._rows)
        self._slack_col = {}
        c = len(std.cols)
        for h in handles:
            if self._rows[h][1] != "=":
                self._slack_col[h] = c
                c += 1
            else:
                self._slack_col[h] = -1
        self._row_pos = {}
        for pos, orig in enumerate(solver.rows_alive):
            self._row_pos[handles[orig]] = pos
        for h in handles:
            if h not in self._row_pos:  # redundant row removed in phase 1
                del self._rows[h]
        return self._solution()

    def _solution(self) -> LpSolution:
        y = self._solver.values()
        x = self._shift.copy()
        mask = self._col_var >= 0
        np.add.at(x, self._col_var[mask], self._col_sign[mask] * y[mask])
        cost = np.array(self._cost)
        return LpSolution(LpStatus.OPTIMAL, x, float(cost @ x), self.pivots)

    # -- bookkeeping --------------------------------------------------------
    def _push_rows(self, rows, rhs, handles) -> None:
        sol = self._solver
        new_vars = [v for v in getattr(self, "_pending_vars", [])]
        self._pending_vars = []
        n_old = sol.tab.shape[1]
        # map new variables to new columns (free ones need two)
        new_cols = []
        for v in new_vars:
            lo, hi = self._lower[v], self._upper[v]
            if np.isfinite(lo):
                self._shift = np.append(self._shift, lo)
                new_cols.append((v, 1.0, hi - lo))
            elif np.isfinite(hi):
                raise InvalidArgumentError("workspace variables need a finite lower bound or none")
            else:
                self._shift = np.append(self._shift, 0.0)
                new_cols.append((v, 1.0, np.inf))
                new_cols.append((v, -1.0, np.inf))
        if len(self._shift) < self.num_vars:
            self._shift = np.concatenate([self._shift, np.zeros(self.num_vars - len(self._shift))])
        m_new = rows.shape[0]
        old_part = np.zeros((m_new, n_old))
        mask = self._col_var >= 0
        old_part[:, mask] = rows[:, self._col_var[mask]] * self._col_sign[mask]
        new_part = np.zeros((m_new, len(new_cols)))
        for k, (v, sign, _) in enumerate(new_cols):
            new_part[:, k] = rows[:, v] * sign
        b = rhs - rows @ self._shift
        sol.add(old_part, b, new_part,
                np.array([self._cost[v] * sign for v, sign, _ in new_cols]),
                np.array([ub for _, _, ub in new_cols]))
        self._col_var = np.concatenate([self._col_var, np.array([v for v, _, _ in new_cols], dtype=int),
                                        np.full(m_new, -1, dtype=int)])
        self._col_sign = np.concatenate([self._col_sign, np.array([s for _, s, _ in new_cols], dtype=float),
                                         np.zeros(m_new)])
        for k, (v, sign, _) in enumerate(new_cols):
            self._var_cols.setdefault(v, []).append((n_old + k, sign))
        first_row = sol.tab.shape[0] - m_new
        first_slack = n_old + len(new_cols)
        for k, h in enumerate(handles):
            self._row_pos[h] = first_row + k
            self._slack_col[h] = first_slack + k

    def _reindex_after_drop(self, rows, cols) -> None:
        keep_c = np.setdiff1d(np.arange(self._col_var.size), cols)
        remap = np.full(self._col_var.size, -1, dtype=int)
        remap[keep_c] = np.arange(keep_c.size)
        self._col_var = self._col_var[keep_c]
        self._col_sign = self._col_sign[keep_c]
        for v, lst in list(self._var_cols.items()):
            self._var_cols[v] = [(int(remap[c]), s) for c, s in lst if remap[c] >= 0]
        rows = np.asarray(rows)
        for h, pos in list(self._row_pos.items()):
            if pos in rows:
                del self._row_pos[h]
            else:
                self._row_pos[h] = pos - int(np.sum(rows < pos))
        for h, c in list(self._slack_col.items()):
            self._slack_col[h] = int(remap[c]) if c >= 0 else -1

    def _retire_var(self, v: int) -> None:
        self._cost[v] = 0.0
        self._lower[v] = 0.0
        self._upper[v] = 0.0


class _Standardized:
    """Rewrites the LP as ``A y = b, 0 <= y <= u, b >= 0`` with slack columns appended."""

    def __init__(self, lp: LinearProgram):
        n = lp.num_vars
        cols = []  # (original index, sign)
        shift = np.zeros(n)
        upper = []
        for j in range(n):
            lo, hi = lp.lower[j], lp.upper[j]
            if np.isfinite(lo):
                shift[j] = lo
                cols.append((j, 1.0))
                upper.append(hi - lo)
            elif np.isfinite(hi):
                shift[j] = hi
                cols.append((j, -1.0))
                upper.append(np.inf)
            else:
                cols.append((j, 1.0))
                upper.append(np.inf)
                cols.append((j, -1.0))
                upper.append(np.inf)
        self.n_orig = n
        self.cols = cols
        self.shift = shift
        idx = np.array([c[0] for c in cols], dtype=int)
        sgn = np.array([c[1] for c in cols])

        m = lp.a.shape[0]
        a_struct = lp.a[:, idx] * sgn
        b = lp.rhs - lp.a @ shift
        slack_rows = [i for i, rel in enumerate(lp.relations) if rel != "="]
        a_slack = np.zeros((m, len(slack_rows)))
        for k, i in enumerate(slack_rows):
            a_slack[i, k] = 1.0 if lp.relations[i] == "<=" else -1.0
        a = np.hstack([a_struct, a_slack])
        neg = b < 0
        a[neg] *= -1.0
        b = np.where(neg, -b, b)

        self.a = a
        self.b = b
        self.upper = np.concatenate([np.array(upper, dtype=float), np.full(len(slack_rows), np.inf)])
        cost = np.zeros(a.shape[1])
        cost[: len(cols)] = lp.cost[idx] * sgn
        self.cost = cost
        self._idx = idx
        self._sgn = sgn

    def recover(self, y: np.ndarray) -> np.ndarray:
        x = self.shift.copy()
        np.add.at(x, self._idx, self._sgn * y[: len(self.cols)])
        return x


class _BoundedSimplex:
    """Tableau simplex on ``A y = b, 0 <= y <= u``.

    After :meth:`run` the object stays usable: rows and columns can be
    appended, rows retired and costs edited, and :meth:`reoptimize` restores
    optimality from the current basis (dual simplex, then primal).
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, upper: np.ndarray, max_pivots: int):
        self.m, self.n = a.shape
        self.max_pivots = max_pivots
        self.pivots = 0

        # a row whose slack has coefficient +1 starts with that slack basic
        basis = np.full(self.m, -1, dtype=int)
        for j in range(self.n):
            if not np.isinf(upper[j]):
                continue
            col = a[:, j]
            nz = np.flatnonzero(col)
            if nz.size == 1 and col[nz[0]] == 1.0 and basis[nz[0]] == -1:
                basis[nz[0]] = j
        need_art = np.flatnonzero(basis < 0)
        self.n_struct = self.n
        self.n_art = need_art.size
        art = np.zeros((self.m, self.n_art))
        for k, i in enumerate(need_art):
            art[i, k] = 1.0
            basis[i] = self.n + k
        self.tab = np.hstack([a, art])
        self.a0 = self.tab.copy()
        self.b0 = np.asarray(b, dtype=float).copy()
        self.upper = np.concatenate([upper, np.full(self.n_art, np.inf)])
        self.at_upper = np.zeros(self.tab.shape[1], dtype=bool)
        self.basis = basis
        self.beta = self.b0.copy()
        self.rows_alive = np.arange(self.m)
        self.cost = np.zeros(self.tab.shape[1])
        self._since_refactor = 0

    # -- driver -----------------------------------------------------------
    def run(self, cost: np.ndarray) -> LpStatus:
        if self.n_art:
            c1 = np.zeros(self.tab.shape[1])
            c1[self.n_struct:] = 1.0
            status = self._iterate(c1)
            if status is LpStatus.UNBOUNDED:  # cannot happen for phase 1, kept as a guard
                raise SolverFailureError("phase 1 reported unbounded")
            infeas = float(self.beta[self.basis >= self.n_struct].sum())
            scale = max(1.0, float(np.max(np.abs(self.b0), initial=0.0)))
            if infeas > FEAS_TOL * scale:
                return LpStatus.INFEASIBLE
            self._drive_out_artificials()
        self.cost = np.asarray(cost, dtype=float).copy()
        return self._iterate(self.cost)

    def values(self) -> np.ndarray:
        """Values of all columns, with basic values re-solved from scratch."""
        n = self.tab.shape[1]
        y = np.where(self.at_upper, self.upper, 0.0)
        y[np.isinf(y)] = 0.0
        basis = self.basis
        y[basis] = 0.0
        a = self.a0
        try:
            y_b = np.linalg.solve(a[:, basis], self.b0 - a @ y)
        except np.linalg.LinAlgError:
            y_b = self.beta
        y[basis] = y_b
        y = np.clip(y, 0.0, self.upper[:n])
        return y

    # -- incremental edits ------------------------------------------------
    def add(self, rows: np.ndarray, rhs: np.ndarray, new_cols: np.ndarray,
            new_cost: np.ndarray, new_upper: np.ndarray) -> None:
        """Append ``<=`` rows (over the existing columns) plus columns private to them.

        ``new_cols`` has one column per new variable with entries for the new
        rows only. Each row gets its own slack, which starts basic (possibly
        at a negative value that :meth:`reoptimize` repairs).
        """
        k = rows.shape[0]
        p = new_cols.shape[1]
        n_old = self.tab.shape[1]
        y = self.values()
        activity = rows @ y
        # columns: old | new variables | new slacks
        self.a0 = np.block([
            [self.a0, np.zeros((self.a0.shape[0], p + k))],
            [rows, new_cols, np.eye(k)],
        ])
        self.b0 = np.concatenate([self.b0, rhs])
        self.tab = np.hstack([self.tab, np.zeros((self.tab.shape[0], p + k))])
        # express the new rows in the current basis
        full = np.hstack([rows, new_cols, np.eye(k)])
        coef = full[:, self.basis]
        full = full - coef @ self.tab
        self.tab = np.vstack([self.tab, full])
        self.upper = np.concatenate([self.upper, new_upper, np.full(k, np.inf)])
        self.at_upper = np.concatenate([self.at_upper, np.zeros(p + k, dtype=bool)])
        self.cost = np.concatenate([self.cost, new_cost, np.zeros(k)])
        self.basis = np.concatenate([self.basis, n_old + p + np.arange(k)])
        self.beta = np.concatenate([self.beta, rhs - activity])

    def set_cost(self, j: int, value: float) -> None:
        self.cost[j] = value

    def drop_rows(self, rows: Sequence[int], tab_rows: Sequence[int], cols: Sequence[int]) -> None:
        """Delete original ``rows`` together with columns that only appear in them.

        ``tab_rows`` are the tableau rows where the dropped basic columns
        sit; the remaining basis then still spans the kept rows.
        """
        keep_r = np.setdiff1d(np.arange(self.tab.shape[0]), rows)
        keep_t = np.setdiff1d(np.arange(self.tab.shape[0]), tab_rows)
        keep_c = np.setdiff1d(np.arange(self.tab.shape[1]), cols)
        remap = np.full(self.tab.shape[1], -1, dtype=int)
        remap[keep_c] = np.arange(keep_c.size)
        self.tab = self.tab[np.ix_(keep_t, keep_c)]
        self.a0 = self.a0[np.ix_(keep_r, keep_c)]
        self.b0 = self.b0[keep_r]
        self.beta = self.beta[keep_t]
        self.basis = remap[self.basis[keep_t]]
        if np.any(self.basis < 0):
            raise SolverFailureError("dropped a column that is basic in a kept row")
        self.upper = self.upper[keep_c]
        self.at_upper = self.at_upper[keep_c]
        self.cost = self.cost[keep_c]
        self._refactor()

    def reoptimize(self) -> LpStatus:
        status = self._dual_iterate()
        if status is not LpStatus.OPTIMAL:
            return status
        return self._iterate(self.cost)

    # -- core loop --------------------------------------------------------
    def _reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        d = cost - cost[self.basis] @ self.tab
        d[self.basis] = 0.0
        return d

    def _iterate(self, cost: np.ndarray) -> LpStatus:
        ncol = self.tab.shape[1]
        cost = np.concatenate([cost, np.zeros(ncol - cost.size)]) if cost.size < ncol else cost
        while True:
            if self.pivots >= self.max_pivots:
                raise SolverFailureError(f"simplex exceeded {self.max_pivots} pivots")
            d = self._reduced_costs(cost)
            # reduced costs carry rounding noise proportional to the cost scale
            dtol = PIVOT_TOL * max(1.0, float(np.abs(cost).max(initial=0.0)))
            eligible = np.where(self.at_upper, d > dtol, d < -dtol)
            eligible[self.basis] = False
            cand = np.flatnonzero(eligible)
            if cand.size == 0:
                return LpStatus.OPTIMAL
            j = int(cand[0])
            direction = -1.0 if self.at_upper[j] else 1.0
            col = self.tab[:, j]
            alpha = direction * col

            theta = self.upper[j]
            leave = -1
            leave_to_upper = False
            # pivots tiny relative to the column would wreck the basis conditioning
            tol = PIVOT_TOL * max(1.0, float(np.abs(alpha).max(initial=0.0)))
            dec = alpha > tol
            inc = alpha < -tol
            ratios = np.full(self.tab.shape[0], np.inf)
            ratios[dec] = np.maximum(self.beta[dec], 0.0) / alpha[dec]
            ub_b = self.upper[self.basis]
            inc_fin = inc & np.isfinite(ub_b)
            ratios[inc_fin] = np.maximum(ub_b[inc_fin] - self.beta[inc_fin], 0.0) / -alpha[inc_fin]
            best = float(ratios.min()) if ratios.size else np.inf
            if best < theta:
                ties = np.flatnonzero(ratios <= best + 1e-12)
                leave = int(ties[np.argmin(self.basis[ties])])
                theta = best
                leave_to_upper = bool(inc[leave])
            if np.isinf(theta):
                if self._since_refactor and self._refactor():
                    continue  # re-test with a clean tableau before giving up
                return LpStatus.UNBOUNDED

            self.pivots += 1
            self._since_refactor += 1
            self.beta -= theta * alpha
            if leave < 0:
                self.at_upper[j] = not self.at_upper[j]
                continue
            start = self.upper[j] if self.at_upper[j] else 0.0
            self._pivot(leave, j)
            old = self.basis[leave]
            self.basis[leave] = j
            self.beta[leave] = start + direction * theta
            self.at_upper[old] = leave_to_upper
            self.at_upper[j] = False
            if self._since_refactor >= REFACTOR_EVERY:
                self._refactor()

    def _dual_iterate(self) -> LpStatus:
        """Bounded dual simplex: repair infeasible basic values while keeping reduced costs signed."""
        while True:
            if self.pivots >= self.max_pivots:
                raise SolverFailureError(f"simplex exceeded {self.max_pivots} pivots")
            ub_b = self.upper[self.basis]
            scale = np.maximum(1.0, np.abs(self.beta))
            below = -self.beta
            above = np.where(np.isfinite(ub_b), self.beta - ub_b, -np.inf)
            infeas = np.maximum(below, above) / scale
            r = int(np.argmax(infeas)) if infeas.size else -1
            if r < 0 or infeas[r] <= FEAS_TOL:
                return LpStatus.OPTIMAL
            to_upper = above[r] > below[r]
            row = self.tab[r]
            d = self._reduced_costs(self.cost)
            direction = np.where(self.at_upper, -1.0, 1.0)
            movable = self.upper > 0
            movable[self.basis] = False
            tol = PIVOT_TOL * max(1.0, float(np.abs(row).max(initial=0.0)))
            step = row * direction
            ok = movable & ((step > tol) if to_upper else (step < -tol))
            cand = np.flatnonzero(ok)
            if cand.size == 0:
                if self._since_refactor and self._refactor():
                    continue
                return LpStatus.INFEASIBLE
            ratios = np.maximum(d[cand] * direction[cand], 0.0) / np.abs(row[cand])
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12]
            j = int(ties[np.argmax(np.abs(row[ties]))])

            target = ub_b[r] if to_upper else 0.0
            t = (self.beta[r] - target) / step[j]
            start = self.upper[j] if self.at_upper[j] else 0.0
            self.pivots += 1
            self._since_refactor += 1
            self.beta -= self.tab[:, j] * direction[j] * t
            self._pivot(r, j)
            old = self.basis[r]
            self.basis[r] = j
            self.beta[r] = start + direction[j] * t
            self.at_upper[old] = bool(to_upper)
            self.at_upper[j] = False
            if self._since_refactor >= REFACTOR_EVERY:
                self._refactor()

    def _refactor(self) -> bool:
        """Rebuild the tableau and basic values from the original rows."""
        self._since_refactor = 0
        a = self.a0[:, : self.tab.shape[1]]
        bmat = a[:, self.basis]
        try:
            tab = np.linalg.solve(bmat, a)
        except np.linalg.LinAlgError:
            return False
        ub = np.where(self.at_upper, self.upper, 0.0)
        ub[self.basis] = 0.0
        ub[np.isinf(ub)] = 0.0
        self.tab = tab
        self.beta = np.linalg.solve(bmat, self.b0 - a @ ub)
        return True

    def _pivot(self, r: int, j: int) -> None:
        tab = self.tab
        tab[r] /= tab[r, j]
        col = tab[:, j].copy()
        col[r] = 0.0
        rows = np.flatnonzero(col)
        if rows.size:
            tab[rows] -= np.outer(col[rows], tab[r])
        tab[:, j] = 0.0
        tab[r, j] = 1.0

    def _drive_out_artificials(self) -> None:
        keep = []
        for r in range(self.tab.shape[0]):
            if self.basis[r] < self.n_struct:
                keep.append(r)
                continue
            row = self.tab[r, : self.n_struct].copy()
            row[self.basis[self.basis < self.n_struct]] = 0.0
            cand = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            if cand.size == 0:
                continue  # redundant row
            j = int(cand[np.argmax(np.abs(row[cand]))])
            value = self.upper[j] if self.at_upper[j] else 0.0
            self._pivot(r, j)
            self.basis[r] = j
            self.beta[r] = value
            self.at_upper[j] = False
            keep.append(r)
        keep = np.array(keep, dtype=int)
        n = self.n_struct
        self.tab = self.tab[keep][:, :n]
        self.a0 = self.a0[keep][:, :n]
        self.b0 = self.b0[keep]
        self.beta = self.beta[keep]
        self.basis = self.basis[keep]
        self.rows_alive = self.rows_alive[keep]
        self.upper = self.upper[:n]
        self.at_upper = self.at_upper[:n]
