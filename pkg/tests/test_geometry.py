"""
Тесты геометрии коробок и полигонов, включая проверки против прямого перебора.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from world.geometry import (
    Aabb,
    Pose,
    box_aabb,
    gap_distance,
    horizontal_overlap_ratio,
    interpenetrates,
    intersection_volume,
    is_simple_polygon,
    point_in_polygon,
    quat_to_matrix,
    signed_area,
    yaw_quat,
)

UNIT = Aabb((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
L_SHAPE = ((0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0))
SIGNS = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])


def shifted(box: Aabb, offset) -> Aabb:
    return Aabb(tuple(np.add(box.min, offset)), tuple(np.add(box.max, offset)))


def vectors(low, high):
    return st.tuples(*[st.floats(min_value=low, max_value=high)] * 3)


@st.composite
def unit_quats(draw):
    """Произвольный поворот: нормированный ненулевой 4-вектор."""
    q = np.array(draw(st.tuples(*[st.floats(min_value=-1.0, max_value=1.0)] * 4)))
    norm = np.linalg.norm(q)
    assume(norm > 0.1)
    return tuple(q / norm)


@st.composite
def aabbs(draw, spread=3.0):
    return Aabb.from_center(draw(vectors(-spread, spread)), draw(vectors(0.1, 1.0)))


# === poses and boxes ===

def test_pose_rejects_non_unit_quaternion():
    with pytest.raises(ValueError):
        Pose((0, 0, 0), (1.0, 0.1, 0.0, 0.0))


def test_aabb_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        Aabb((1.0, 0.0, 0.0), (0.0, 1.0, 1.0))


def test_identity_box():
    box = box_aabb(Pose((1.0, 2.0, 3.0)), (0.5, 0.25, 1.0))
    assert box.min == pytest.approx((0.5, 1.75, 2.0))
    assert box.max == pytest.approx((1.5, 2.25, 4.0))


def test_quarter_turn_swaps_extents():
    box = box_aabb(Pose((0.0, 0.0, 0.0), yaw_quat(math.pi / 2)), (2.0, 1.0, 0.5))
    assert box.half_extents == pytest.approx((1.0, 2.0, 0.5))


def test_eighth_turn_grows_footprint():
    box = box_aabb(Pose((0.0, 0.0, 0.0), yaw_quat(math.pi / 4)), (2.0, 1.0, 0.5))
    assert box.half_extents[0] == pytest.approx(3.0 / math.sqrt(2.0))
    assert box.half_extents[1] == pytest.approx(3.0 / math.sqrt(2.0))


@given(unit_quats(), vectors(-5.0, 5.0), vectors(0.05, 2.0))
@settings(max_examples=1000, deadline=None)
def test_rotated_aabb_matches_corner_hull(q, center, half):
    corners = np.asarray(center) + (SIGNS * np.asarray(half)) @ quat_to_matrix(q).T
    box = box_aabb(Pose(center, q), half)
    assert box.min == pytest.approx(tuple(corners.min(axis=0)), abs=1e-9)
    assert box.max == pytest.approx(tuple(corners.max(axis=0)), abs=1e-9)


# === distances and overlaps ===

def test_gap_distance_cases():
    assert gap_distance(UNIT, shifted(UNIT, (2.0, 3.0, 0.0))) == pytest.approx(math.sqrt(5.0))
    assert gap_distance(UNIT, shifted(UNIT, (1.0, 0.0, 0.0))) == 0.0
    assert gap_distance(UNIT, shifted(UNIT, (0.5, 0.5, 0.5))) == 0.0


@given(aabbs(), aabbs())
@settings(max_examples=500)
def test_gap_distance_is_symmetric(a, b):
    assert gap_distance(a, b) == gap_distance(b, a)


@given(aabbs(), aabbs(), vectors(0.0, 1.0))
@settings(max_examples=500)
def test_enlarging_a_box_never_increases_the_gap(a, b, growth):
    grown = Aabb.from_center(a.center, np.add(a.half_extents, growth))
    assert gap_distance(grown, b) <= gap_distance(a, b) + 1e-12
    assert gap_distance(b, grown) <= gap_distance(b, a) + 1e-12


def test_horizontal_overlap_ratio():
    other = Aabb((0.5, 0.0, 5.0), (2.0, 1.0, 6.0))
    assert horizontal_overlap_ratio(UNIT, other) == pytest.approx(0.5)
    assert horizontal_overlap_ratio(UNIT, shifted(UNIT, (3.0, 0.0, 0.0))) == 0.0


@given(aabbs(spread=1.0), aabbs(spread=1.0))
@settings(max_examples=500)
def test_overlap_area_is_the_same_from_both_sides(a, b):
    assert horizontal_overlap_ratio(a, b) * a.footprint_area == pytest.approx(
        horizontal_overlap_ratio(b, a) * b.footprint_area, abs=1e-9)


def test_overlap_ratio_needs_footprint():
    flat = Aabb((0.0, 0.0, 0.0), (0.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        horizontal_overlap_ratio(flat, UNIT)


@given(aabbs(spread=1.0), aabbs(spread=1.0), st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=50, deadline=None)
def test_intersection_volume_monte_carlo(a, b, seed):
    rng = np.random.default_rng(seed)
    points = rng.uniform(a.min, a.max, size=(20000, 3))
    hits = np.all((points >= b.min) & (points <= b.max), axis=1).mean()
    assert intersection_volume(a, b) == pytest.approx(hits * a.volume, abs=0.03 * a.volume)


def test_face_contact_is_not_interpenetration():
    assert not interpenetrates(UNIT, shifted(UNIT, (1.0, 0.0, 0.0)))
    assert interpenetrates(UNIT, shifted(UNIT, (0.9, 0.0, 0.0)))
    assert not interpenetrates(UNIT, shifted(UNIT, (1.0 - 1e-12, 0.0, 0.0)))


# === polygons ===

def test_signed_area_orientation():
    square = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
    assert signed_area(square) == pytest.approx(1.0)
    assert signed_area(tuple(reversed(square))) == pytest.approx(-1.0)
    assert signed_area(L_SHAPE) == pytest.approx(3.0)


def test_simple_polygon_check():
    assert is_simple_polygon(L_SHAPE)
    assert not is_simple_polygon(((0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)))
    assert not is_simple_polygon(((0.0, 0.0), (1.0, 1.0)))


@pytest.mark.parametrize('point,inside', [
    ((0.5, 1.5), True),
    ((1.5, 0.5), True),
    ((1.5, 1.5), False),
    ((2.0, 0.5), True),
    ((1.0, 1.0), True),
    ((-0.1, 0.5), False),
])
def test_point_in_l_shape(point, inside):
    assert point_in_polygon(point, L_SHAPE) is inside


# points on a 1/64 grid, so edges and vertices are hit exactly
grid = st.integers(min_value=-32, max_value=160).map(lambda i: i / 64)


@given(grid, grid)
@settings(max_examples=2000)
def test_point_in_polygon_against_union_of_rectangles(x, y):
    # L_SHAPE is the union of [0,2]x[0,1] and [0,1]x[0,2]
    expected = (0 <= x <= 2 and 0 <= y <= 1) or (0 <= x <= 1 and 0 <= y <= 2)
    assert point_in_polygon((x, y), L_SHAPE) == expected
