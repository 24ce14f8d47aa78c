import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invloc.core import (
    CostVector,
    Instance,
    Modification,
    NormTag,
    Point,
    Site,
    apply,
    distance,
    modification_cost,
    objective,
)
from invloc.errors import InvalidArgumentError

from conftest import example1

coord = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
points = st.builds(Point, coord, coord)


@pytest.mark.parametrize("norm, expected", [
    (NormTag.EUCLIDEAN, 5.0),
    (NormTag.SQUARED_EUCLIDEAN, 25.0),
])
def test_distance_three_four_five(norm, expected):
    assert distance(norm, Point(0, 0), Point(3, 4)) == pytest.approx(expected)


def test_distance_rectilinear_unit_offsets():
    assert distance(NormTag.RECTILINEAR, Point(0, 1), Point(1, 0)) == 2.0


@given(points, points)
def test_distance_symmetric_nonnegative(p, q):
    for norm in NormTag:
        d = distance(norm, p, q)
        assert d >= 0
        assert d == distance(norm, q, p)
    assert (distance(NormTag.EUCLIDEAN, p, q) == 0) == (p == q)


@given(points, points, points)
def test_triangle_inequality(p, q, r):
    for norm in (NormTag.EUCLIDEAN, NormTag.RECTILINEAR):
        assert distance(norm, p, r) <= distance(norm, p, q) + distance(norm, q, r) + 1e-9


@given(points, points)
def test_squared_is_euclidean_squared(p, q):
    e = distance(NormTag.EUCLIDEAN, p, q)
    s = distance(NormTag.SQUARED_EUCLIDEAN, p, q)
    assert s == pytest.approx(e * e, rel=1e-12, abs=1e-300)


def test_point_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        Point(math.nan, 0)
    with pytest.raises(InvalidArgumentError):
        Point(0, math.inf)


def test_site_and_cost_reject_negative():
    with pytest.raises(InvalidArgumentError):
        Site(Point(0, 0), -1.0)
    with pytest.raises(InvalidArgumentError):
        CostVector(1, 1, -0.5, 1)


def test_instance_length_checks():
    with pytest.raises(InvalidArgumentError):
        Instance((), ())
    with pytest.raises(InvalidArgumentError):
        Instance((Site(Point(0, 0), 1),), ())


def test_instance_is_immutable():
    inst = example1()
    with pytest.raises(Exception):
        inst.norm = NormTag.EUCLIDEAN
    with pytest.raises(ValueError):
        inst.coords[0, 0] = 5.0


def test_objective_example1_rectilinear():
    inst = example1(NormTag.RECTILINEAR)
    assert objective(inst, Point(1, 0)) == pytest.approx(6 * 0 + 3 * 9 + 1 * 8 + 2 * 1.5)


def test_objective_zero_weights_and_coincident_site():
    inst = Instance.from_arrays([[1, 2], [3, 4]], [0, 0], np.ones((2, 4)))
    assert objective(inst, Point(9, 9)) == 0.0
    single = Instance.from_arrays([[2, 3]], [5.0], np.ones((1, 4)))
    for norm in NormTag:
        assert objective(single.with_norm(norm), Point(2, 3)) == 0.0


def test_apply_examples():
    inst = example1()
    assert np.array_equal(apply(inst, Modification.zeros(4)).coords, inst.coords)
    r = np.zeros((4, 2))
    r[0, 0] = 0.3333
    moved = apply(inst, Modification(r))
    assert moved.coords[0] == pytest.approx([1.3333, 0.0])
    same = apply(inst, Modification(np.full((4, 2), 2.5), np.full((4, 2), 2.5)))
    assert np.allclose(same.coords, inst.coords)


def test_apply_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        apply(example1(), Modification.zeros(3))


@settings(max_examples=50)
@given(st.lists(st.tuples(*[st.floats(0, 100)] * 4), min_size=4, max_size=4))
def test_apply_then_swapped_restores(rows):
    arr = np.array(rows)
    m = Modification(arr[:, :2], arr[:, 2:])
    inst = example1()
    back = apply(apply(inst, m), m.swapped())
    assert np.allclose(back.coords, inst.coords, rtol=0, atol=1e-12 * (1 + arr.max()))


def test_modification_cost_examples():
    inst = example1()
    assert modification_cost(inst.costs, Modification.zeros(4)) == 0.0
    r = np.zeros((4, 2))
    r[0, 0] = 1 / 3
    r[3, 1] = 1.0
    assert modification_cost(inst.costs, Modification(r)) == pytest.approx(math.sqrt(2) / 3 + 1, abs=1e-9)
    with pytest.raises(InvalidArgumentError):
        modification_cost(inst.costs, Modification.zeros(2))


def test_modification_rejects_negative_entries():
    with pytest.raises(InvalidArgumentError):
        Modification(np.array([[-1.0, 0.0]]))


def test_norm_parse_aliases():
    assert NormTag.parse("Euclidean") is NormTag.EUCLIDEAN
    assert NormTag.parse("sq") is NormTag.SQUARED_EUCLIDEAN
    assert NormTag.parse("l1") is NormTag.RECTILINEAR
    with pytest.raises(InvalidArgumentError):
        NormTag.parse("chebyshev")
