import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skagree.hull import (contains, contains_hull, convex_hull_2d, hausdorff, is_convex_ccw,
                          point_distance)

points = st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=1, max_size=40)


@given(points)
@settings(max_examples=80, deadline=None)
def test_hull_contains_inputs_and_is_idempotent(pts):
    h = convex_hull_2d(pts)
    assert is_convex_ccw(h)
    for p in pts:
        assert contains(h, p, 1e-9)
    assert np.array_equal(convex_hull_2d(h), h)


def test_square_with_interior_and_collinear_points():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.5, 0), (1, 0.5)]
    h = convex_hull_2d(pts)
    assert h.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]


def test_degenerate_inputs():
    assert convex_hull_2d([(1, 1), (1, 1)]).tolist() == [[1, 1]]
    assert convex_hull_2d([(0, 0), (1, 1), (2, 2)]).tolist() == [[0, 0], [2, 2]]
    with pytest.raises(ValueError):
        convex_hull_2d([])


def test_distances_and_hausdorff():
    sq = convex_hull_2d([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert point_distance(sq, (0.5, 0.5)) == 0.0
    assert point_distance(sq, (2, 0.5)) == pytest.approx(1.0)
    big = convex_hull_2d([(0, 0), (2, 0), (2, 2), (0, 2)])
    assert contains_hull(big, sq) and not contains_hull(sq, big)
    assert hausdorff(sq, big) == pytest.approx(np.sqrt(2))
    assert hausdorff(sq, sq) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_qhull_prefilter_does_not_change_hull(seed, monkeypatch):
    from skagree import hull
    pts = np.random.default_rng(seed).random((2000, 2)) ** 3
    pts = np.concatenate([pts, [[0, 0], [1, 0], [0.5, 0]]])   # collinear bottom edge
    fast = convex_hull_2d(pts)
    monkeypatch.setattr(hull, "PREFILTER_MIN", 10 ** 9)
    assert np.array_equal(fast, convex_hull_2d(pts))


def test_prefilter_survives_degenerate_input():
    pts = np.column_stack([np.linspace(0, 1, 100), np.linspace(0, 2, 100)])
    assert convex_hull_2d(pts).tolist() == [[0, 0], [1, 2]]
