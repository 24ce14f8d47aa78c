import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invloc.core import Instance, Modification, NormTag, Point, apply, objective
from invloc.errors import SubproblemFailureError, SubproblemInfeasibleError
from invloc.forward import centroid
from invloc import subproblem as sp

from conftest import example1, random_instance


def one_site(norm, base, target, ref, costs=(1, 1, 1, 1), weight=1.0, box=None):
    inst = Instance.from_arrays([base], [weight], [costs], norm)
    return sp.SubproblemSpec.build(inst, Point(*target), [Point(*ref)], box)


def test_constraint_value_identical_points_is_zero():
    spec = sp.SubproblemSpec.build(example1(), Point(2, 2), [Point(2, 2)])
    assert sp.constraint_value(spec.constraints[0], spec.norm) == 0.0


def test_constraint_value_example1_positive():
    inst = example1()
    ref = centroid(inst)
    c = sp.SubproblemSpec.build(inst, Point(0, 1), [ref]).constraints[0]
    v = sp.constraint_value(c, inst.norm)
    assert v > 0
    assert v == pytest.approx(objective(inst, Point(0, 1)) - objective(inst, ref), rel=1e-9)


def test_constraint_value_near_feasible_at_table_row():
    coords = np.array([[1.3333, 0.0], [-5, 3], [7, 2], [0.0, 0.498]])
    inst = example1().with_coords(coords)
    c = sp.SubproblemSpec.build(inst, Point(0, 1), [Point(0, 0.9997)]).constraints[0]
    assert sp.constraint_value(c, inst.norm) <= 1e-3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(NormTag)))
def test_constraint_value_matches_objectives(seed, norm):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 5, norm)
    t, ref = Point(*rng.normal(size=2)), Point(*rng.normal(size=2))
    m = Modification.from_displacement(rng.normal(size=(5, 2)))
    c = sp.SubproblemSpec.build(inst, t, [ref]).constraints[0]
    moved = apply(inst, m)
    expect = objective(moved, t) - objective(moved, ref)
    assert sp.constraint_value(c, norm, m) == pytest.approx(expect, rel=1e-9, abs=1e-9)


def test_sqeuclid_example1_first_step():
    inst = example1()
    spec = sp.SubproblemSpec.build(inst, Point(0, 1), [centroid(inst)])
    sol = sp.solve_sqeuclid(spec)
    delta = sol.modification.displacement
    expect = np.zeros((4, 2))
    expect[0, 0] = 1 / 3
    assert delta == pytest.approx(expect, abs=1e-9)
    assert sol.cost == pytest.approx(math.sqrt(2) / 3, abs=1e-9)
    assert sol.feasibility_residual <= 1e-7


def test_sqeuclid_already_feasible():
    spec = sp.SubproblemSpec.build(example1(), Point(3, 3), [Point(3, 3)])
    sol = sp.solve_sqeuclid(spec)
    assert sol.cost == 0.0
    assert not sol.modification.displacement.any()


def test_sqeuclid_one_site_midpoint():
    spec = one_site(NormTag.SQUARED_EUCLIDEAN, (0, 0), (1, 0), (0, 0))
    sol = sp.solve_sqeuclid(spec)
    assert sol.modification.displacement[0] == pytest.approx([0.5, 0.0])
    assert sol.cost == pytest.approx(0.5)


def _random_spec(rng, n, norm, refs=1):
    inst = random_instance(rng, n, norm, spread=1.0)
    t = Point(*rng.uniform(-1, 1, 2))
    return sp.SubproblemSpec.build(inst, t, [Point(*rng.uniform(-1, 1, 2)) for _ in range(refs)])


@pytest.mark.parametrize("n", [1, 2])
def test_sqeuclid_matches_grid_oracle(n):
    rng = np.random.default_rng(10 + n)
    res = 0.05 if n == 1 else 0.1
    checked = 0
    for _ in range(12):
        spec = _random_spec(rng, n, NormTag.SQUARED_EUCLIDEAN)
        exact = sp.solve_sqeuclid(spec)
        if np.abs(exact.modification.displacement).max() > 1.5:
            continue
        grid = sp.oracle_grid(spec, res, 2.0)
        assert exact.feasibility_residual <= 1e-7
        assert exact.cost <= grid.cost + 1e-9
        assert grid.cost - exact.cost <= 2 * n * res * spec.costs.max()
        checked += 1
    assert checked >= 6


def test_ccp_example1_rectilinear_first_step():
    inst = example1(NormTag.RECTILINEAR)
    spec = sp.SubproblemSpec.build(inst, Point(0, 1), [Point(1, 0)])
    sol = sp.solve_ccp(spec)
    moved = inst.coords + sol.modification.displacement
    assert moved[0] == pytest.approx([0.5, 0.0], abs=1e-9)
    assert moved[1:] == pytest.approx(inst.coords[1:])
    assert sol.cost == pytest.approx(0.5)


@pytest.mark.parametrize("norm", [NormTag.RECTILINEAR, NormTag.EUCLIDEAN])
def test_ccp_already_feasible(norm):
    spec = sp.SubproblemSpec.build(example1(norm), Point(1, 1), [Point(1, 1)])
    sol = sp.solve_ccp(spec)
    assert sol.cost == 0.0


def test_ccp_one_site_rectilinear():
    spec = one_site(NormTag.RECTILINEAR, (0, 0), (2, 0), (0, 0))
    sol = sp.solve_ccp(spec)
    assert sol.modification.displacement[0] == pytest.approx([1.0, 0.0], abs=1e-7)
    assert sol.cost == pytest.approx(1.0, abs=1e-7)


def test_ccp_one_site_euclidean_bisector():
    # cheapest way across the perpendicular bisector x = 1 is straight along x
    spec = one_site(NormTag.EUCLIDEAN, (0, 0.3), (2, 0), (0, 0), costs=(1, 5, 1, 5))
    sol = sp.solve_ccp(spec)
    assert sol.cost == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("norm", [NormTag.RECTILINEAR, NormTag.EUCLIDEAN])
def test_ccp_one_site_close_to_grid_oracle(norm):
    rng = np.random.default_rng(77 if norm is NormTag.EUCLIDEAN else 78)
    checked = 0
    for _ in range(15):
        spec = _random_spec(rng, 1, norm)
        try:
            grid = sp.oracle_grid(spec, 0.005, 2.0)
        except SubproblemInfeasibleError:
            continue
        if grid.cost < 0.05:
            continue  # a coarse grid cannot resolve 5% of a tiny move
        sol = sp.solve(spec)  # restarts if the first CCP run stalls
        assert sol.feasibility_residual <= sp.FEAS_TOL * spec.scale
        assert sol.cost <= 1.05 * grid.cost
        checked += 1
    assert checked >= 5


@pytest.mark.parametrize("norm", [NormTag.RECTILINEAR, NormTag.EUCLIDEAN])
def test_ccp_surrogate_objective_non_increasing(norm):
    rng = np.random.default_rng(3)
    for _ in range(5):
        spec = _random_spec(rng, 6, norm, refs=2)
        sol = sp.solve(spec)
        tr = np.array(sol.surrogate_trace)
        assert np.all(np.diff(tr) <= 1e-7 * (1 + np.abs(tr[:-1])))
        assert sol.feasibility_residual <= sp.FEAS_TOL * spec.scale
        assert sol.cost == pytest.approx(
            sp.modification_cost(spec.costs, sol.modification), rel=1e-9)


def test_ccp_failure_carries_residual():
    # a box too small to reach the bisector
    spec = one_site(NormTag.EUCLIDEAN, (0, 0), (2, 0), (0, 0), box=0.25)
    with pytest.raises(SubproblemFailureError) as info:
        sp.solve_ccp(spec, max_rounds=5)
    assert info.value.best_residual > 0


def test_oracle_examples():
    sq = one_site(NormTag.SQUARED_EUCLIDEAN, (0, 0), (1, 0), (0, 0))
    g = sp.oracle_grid(sq, 0.01, 2.0)
    assert g.modification.displacement[0, 0] == pytest.approx(0.5, abs=0.01)
    assert g.cost == pytest.approx(0.5, abs=0.01)
    l1 = one_site(NormTag.RECTILINEAR, (0, 0), (2, 0), (0, 0))
    g = sp.oracle_grid(l1, 0.01, 2.0)
    assert g.modification.displacement[0, 0] == pytest.approx(1.0, abs=0.01)


def test_oracle_infeasible():
    spec = one_site(NormTag.EUCLIDEAN, (0, 0), (50, 0), (0, 0))
    with pytest.raises(SubproblemInfeasibleError):
        sp.oracle_grid(spec, 0.1, 1.0)
