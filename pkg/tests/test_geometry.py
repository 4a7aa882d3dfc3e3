import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ridge_split.errors import DependentDirectionsError, DirectionError, ZeroDirectionError
from ridge_split.geometry import (normalize, normalized_cross, perpendicular_unit,
                                  select_axis_pair, validate_directions)

angles = st.floats(0.0, math.pi, exclude_max=True)
lengths = st.floats(0.1, 10.0)


def direction(theta, r):
    return (r * math.cos(theta), r * math.sin(theta))


@st.composite
def direction_sets(draw, n_min=3, n_max=5):
    n = draw(st.integers(n_min, n_max))
    thetas = draw(st.lists(angles, min_size=n, max_size=n))
    srt = sorted(thetas)
    gaps = np.diff(srt + [srt[0] + math.pi])
    assume(np.min(np.abs(gaps)) > 0.1)
    return [direction(t, draw(lengths)) for t in thetas]


def test_three_basic_directions_are_valid():
    ds = validate_directions([(1, 0), (0, 1), (1, 1)])
    assert len(ds) == 3
    crosses = ds.pairwise_cross()
    assert crosses[(0, 1)] == 1.0
    assert crosses[(0, 2)] == pytest.approx(1 / math.sqrt(2), rel=1e-15)


def test_dependent_pair_is_named():
    with pytest.raises(DependentDirectionsError) as info:
        validate_directions([(1, 2), (2, 4)])
    assert info.value.pair == (0, 1)
    with pytest.raises(DependentDirectionsError) as info:
        validate_directions([(1, 0), (0, 1), (3, 1), (-6, -2)])
    assert info.value.pair == (2, 3)


def test_antiparallel_directions_are_dependent():
    with pytest.raises(DependentDirectionsError):
        validate_directions([(1, 1), (-2, -2)])


def test_zero_direction_is_named():
    with pytest.raises(ZeroDirectionError) as info:
        validate_directions([(1, 0), (0, 0)])
    assert info.value.index == 1


def test_malformed_input():
    with pytest.raises(DirectionError):
        validate_directions([])
    with pytest.raises(DirectionError):
        validate_directions([(1, 0, 0)])
    with pytest.raises(DirectionError):
        validate_directions([(math.nan, 1)])


def test_independence_tolerance_is_strict():
    tiny = 1e-13
    with pytest.raises(DependentDirectionsError):
        validate_directions([(1, 0), (1, tiny)])
    validate_directions([(1, 0), (1, 1e-10)])
    with pytest.raises(DependentDirectionsError):
        validate_directions([(1, 0), (1, 1e-10)], tol_indep=1e-9)


@given(angles, lengths)
def test_perpendicular_is_unit_and_orthogonal(theta, r):
    d = direction(theta, r)
    l = perpendicular_unit(d)
    assert np.hypot(*l) == pytest.approx(1.0, abs=1e-15)
    assert abs(l @ np.array(d)) <= 1e-14 * r
    # +90 degree rotation: cross(d, l) > 0
    assert d[0] * l[1] - d[1] * l[0] > 0


def test_perpendicular_of_zero_raises():
    with pytest.raises(ZeroDirectionError):
        perpendicular_unit((0.0, 0.0))


@given(angles, angles, lengths, lengths)
def test_normalized_cross_is_scale_free_sine(t1, t2, r1, r2):
    c = normalized_cross(direction(t1, r1), direction(t2, r2))
    assert c == pytest.approx(abs(math.sin(t1 - t2)), abs=1e-12)


def test_axis_pair_selection_prefers_orthogonal_pairs():
    ds = validate_directions([(1, 1), (1, 0), (1, 2), (0, 1)])
    assert select_axis_pair(ds) == (1, 3)
    # ties go to the first pair in lexicographic order
    assert select_axis_pair(validate_directions([(1, 0), (0, 1), (1, 1), (1, -1)])) == (0, 1)


def test_normalize_requires_three_directions():
    with pytest.raises(DirectionError):
        normalize(validate_directions([(1, 0), (0, 1)]))


def test_normalize_rejects_bad_axis_pair():
    ds = validate_directions([(1, 0), (0, 1), (1, 1)])
    with pytest.raises(DirectionError):
        normalize(ds, (0, 0))
    with pytest.raises(DirectionError):
        normalize(ds, (0, 3))


@given(direction_sets(), st.tuples(st.floats(-2, 2), st.floats(-2, 2)))
def test_normalization_preserves_ridge_arguments(dirs, point):
    ds = validate_directions(dirs)
    norm = normalize(ds)
    x, y = point
    xp, yp = norm.to_normalized(x, y)
    for k, i in enumerate(norm.perm):
        a, b = dirs[i]
        an, bn = norm.dirs_normalized[k]
        assert an * xp + bn * yp == pytest.approx(a * x + b * y, abs=1e-9)
    back = norm.from_normalized(xp, yp)
    assert back == pytest.approx((x, y), abs=1e-12)


@given(direction_sets())
def test_axis_pair_maps_to_coordinate_axes(dirs):
    norm = normalize(validate_directions(dirs))
    assert tuple(norm.dirs_normalized[-2]) == (1.0, 0.0)
    assert tuple(norm.dirs_normalized[-1]) == (0.0, 1.0)
    p, q = norm.axis_pair
    np.testing.assert_allclose(np.array(dirs[p]) @ norm.M_inv, [1, 0], atol=1e-12)
    np.testing.assert_allclose(np.array(dirs[q]) @ norm.M_inv, [0, 1], atol=1e-12)
    assert sorted(norm.perm) == list(range(len(dirs)))
    for k, l in enumerate(norm.perps):
        assert abs(np.dot(l, norm.dirs_normalized[k])) <= 1e-12 * np.hypot(
            *norm.dirs_normalized[k])
