"""
Тесты кинематических предикатов.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from evaluators.predicates import (
    DEFAULT_PARAMS,
    PredicateKind,
    PredicateParams,
    UnboundTerm,
    UnknownPredicate,
    UnsupportedFloorRelation,
    eval_atom,
    eval_bound,
    inside,
    inside_ratio,
    next_to,
    nextto_threshold,
    on_top,
    touching,
    under,
)
from parsers.conditions import Atom
from world.geometry import Pose, yaw_quat
from world.scene import SceneObject, UnknownObject, world_aabb
from world.taxonomy import GroundScope


@pytest.fixture
def tabletop(box, square_room, make_scene):
    """Стол 2x2 высотой 1 м в комнате 4x4 и небольшие предметы вокруг."""
    def make(**extra):
        objects = [box('table', (2.0, 2.0, 0.5), (1.0, 1.0, 0.5), room='kitchen_0', fixed=True)]
        objects += [box(object_id, center, half) for object_id, (center, half) in extra.items()]
        return make_scene(objects, [square_room()])
    return make


CUBE = (0.05, 0.05, 0.05)


@pytest.mark.parametrize('center,expected', [
    ((2.0, 2.0, 1.05), True),       # resting on the surface
    ((2.0, 2.0, 1.065), True),      # 15 mm above
    ((2.0, 2.0, 1.08), False),      # 30 mm above
    ((2.0, 2.0, 1.04), False),      # sunk into the table
    ((2.96, 2.0, 1.05), True),      # 90% of the footprint supported
    ((3.01, 2.0, 1.05), False),     # 40% of the footprint supported
])
def test_ontop(tabletop, center, expected):
    scene = tabletop(cup=(center, CUBE))
    assert eval_bound('ontop', ['cup', 'table'], scene) is expected


def test_inside_excludes_ontop(tabletop):
    scene = tabletop(cup=((2.0, 2.0, 0.5), CUBE))
    assert eval_bound('inside', ['cup', 'table'], scene)
    assert not eval_bound('ontop', ['cup', 'table'], scene)
    assert inside_ratio(scene.get('cup'), scene.get('table')) == pytest.approx(1.0)


def test_inside_ratio_threshold(tabletop):
    # 60% of the cube's height is below the tabletop surface
    scene = tabletop(cup=((2.0, 2.0, 0.99), CUBE))
    assert inside_ratio(scene.get('cup'), scene.get('table')) == pytest.approx(0.6)
    assert eval_bound('inside', ['cup', 'table'], scene)
    assert not eval_bound('inside', ['cup', 'table'], scene, PredicateParams(inside_ratio=0.7))


def test_nextto_uses_smaller_diagonal(box, make_scene):
    a = box('a', (0.0, 0.0, 0.5), (0.5, 0.5, 0.5))
    near = box('near', (1.6, 0.0, 0.5), (0.5, 0.5, 0.5))
    far = box('far', (2.0, 0.0, 0.5), (0.5, 0.5, 0.5))
    scene = make_scene([a, near, far])
    assert nextto_threshold(a, near) == pytest.approx(0.5 * 2 ** 0.5)
    assert eval_bound('nextto', ['a', 'near'], scene)
    assert not eval_bound('nextto', ['a', 'far'], scene)
    assert eval_bound('nextto', ['a', 'far'], scene, PredicateParams(nextto_scale=1.0))


@pytest.mark.parametrize('x,expected', [(1.0, True), (1.0005, True), (1.002, False)])
def test_touching(box, make_scene, x, expected):
    scene = make_scene([box('a', (0.0, 0.0, 0.5), (0.5, 0.5, 0.5)), box('b', (x, 0.0, 0.5), (0.5, 0.5, 0.5))])
    assert eval_bound('touching', ['a', 'b'], scene) is expected
    assert eval_bound('touching', ['b', 'a'], scene) is expected


def test_under(box, square_room, make_scene):
    slab = box('shelf', (2.0, 2.0, 0.75), (1.0, 1.0, 0.05), room='kitchen_0')
    below = box('shoe', (2.0, 2.0, 0.05), CUBE)
    aside = box('ball', (3.5, 3.5, 0.05), CUBE)
    scene = make_scene([slab, below, aside], [square_room()])
    assert eval_bound('under', ['shoe', 'shelf'], scene)
    assert not eval_bound('under', ['ball', 'shelf'], scene)
    assert not eval_bound('under', ['shelf', 'shoe'], scene)


@pytest.mark.parametrize('predicate', ['onfloor', 'ontop', 'touching'])
def test_floor_reference(tabletop, predicate):
    scene = tabletop(ball=((0.5, 0.5, 0.05), CUBE), held=((0.5, 0.5, 0.5), CUBE))
    assert eval_bound(predicate, ['ball', 'kitchen_0'], scene)
    assert not eval_bound(predicate, ['held', 'kitchen_0'], scene)


def test_floor_reference_outside_room(box, square_room, make_scene):
    scene = make_scene([box('ball', (5.0, 5.0, 0.05), CUBE)], [square_room()])
    assert not eval_bound('onfloor', ['ball', 'kitchen_0'], scene)


@pytest.mark.parametrize('predicate', ['inside', 'nextto', 'under'])
def test_other_predicates_reject_floors(tabletop, predicate):
    scene = tabletop(ball=((0.5, 0.5, 0.05), CUBE))
    with pytest.raises(UnsupportedFloorRelation) as exc:
        eval_bound(predicate, ['ball', 'kitchen_0'], scene)
    assert exc.value.predicate == predicate
    assert exc.value.room_id == 'kitchen_0'


def test_onfloor_needs_a_room(tabletop):
    scene = tabletop(ball=((0.5, 0.5, 0.05), CUBE))
    with pytest.raises(UnknownObject):
        eval_bound('onfloor', ['ball', 'table'], scene)


def test_same_instance_is_false(tabletop):
    scene = tabletop()
    assert not eval_bound('touching', ['table', 'table'], scene)


def test_unknown_predicate(tabletop):
    with pytest.raises(UnknownPredicate):
        eval_bound('cooked', ['table', 'table'], tabletop())
    assert PredicateKind.parse('OnTop') is PredicateKind.ON_TOP


def test_eval_atom_resolves_scope(tabletop):
    scene = tabletop(cup=((2.0, 2.0, 1.05), CUBE))
    scope = GroundScope({'cup.n.01_1': 'cup', 'table.n.02_1': 'table'})
    assert eval_atom(Atom('ontop', ('cup.n.01_1', 'table.n.02_1')), scope, scene)
    with pytest.raises(UnboundTerm):
        eval_atom(Atom('ontop', ('cup.n.01_1', 'bowl.n.01_1')), scope, scene)
    with pytest.raises(UnboundTerm):
        eval_atom(Atom('ontop', ('?cup', 'table.n.02_1')), scope, scene)


@pytest.mark.parametrize('kwargs', [
    {'touch_epsilon': 0.0},
    {'support_gap': -0.01},
    {'footprint_ratio': 1.5},
    {'inside_ratio': 0.0},
])
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        PredicateParams(**kwargs)


def test_apartment_base_state(apartment):
    assert eval_bound('ontop', ['plate_1', 'table_1'], apartment)
    assert eval_bound('ontop', ['cup_1', 'table_1'], apartment)
    assert eval_bound('onfloor', ['shoe_1', 'bedroom_0'], apartment)
    assert eval_bound('inside', ['apple_2', 'fridge_1'], apartment)
    assert eval_bound('inside', ['book_2', 'shelf_1'], apartment)
    assert not eval_bound('ontop', ['pillow_1', 'bed_1'], apartment)


def closest_distance(box_a, box_b, iterations=50):
    """Чередующиеся проекции между двумя выпуклыми коробками."""
    lo_a, hi_a = np.asarray(box_a.min), np.asarray(box_a.max)
    lo_b, hi_b = np.asarray(box_b.min), np.asarray(box_b.max)
    p = (lo_a + hi_a) / 2
    for _ in range(iterations):
        p = np.clip(np.clip(p, lo_b, hi_b), lo_a, hi_a)
    return float(np.linalg.norm(p - np.clip(p, lo_b, hi_b)))


def vectors(low, high):
    return st.tuples(*[st.floats(min_value=low, max_value=high)] * 3)


@st.composite
def boxes(draw, object_id):
    """Коробка в кубе 2x2x2 с поворотом вокруг вертикали."""
    yaw = draw(st.floats(min_value=0.0, max_value=math.pi))
    return SceneObject(object_id, 'thing', Pose(draw(vectors(0.0, 2.0)), yaw_quat(yaw)), draw(vectors(0.05, 0.5)))


@st.composite
def stacked_pairs(draw):
    """Пара коробок с одинаковым следом, a над b с зазором от -10 до 30 мм."""
    x, y = draw(st.floats(min_value=0.0, max_value=2.0)), draw(st.floats(min_value=0.0, max_value=2.0))
    hx, hy = draw(st.floats(min_value=0.05, max_value=0.5)), draw(st.floats(min_value=0.05, max_value=0.5))
    hb, ha = draw(st.floats(min_value=0.05, max_value=0.5)), draw(st.floats(min_value=0.05, max_value=0.5))
    gap = draw(st.floats(min_value=-0.01, max_value=0.03))
    b = SceneObject('b', 'thing', Pose((x, y, hb)), (hx, hy, hb))
    a = SceneObject('a', 'thing', Pose((x, y, 2 * hb + gap + ha)), (hx, hy, ha))
    return a, b


@given(boxes('a'), boxes('b'))
@settings(max_examples=1000)
def test_gap_predicates_are_symmetric(a, b):
    assert touching(a, b) is touching(b, a)
    assert next_to(a, b) is next_to(b, a)


@given(boxes('a'), boxes('b'))
@settings(max_examples=1000)
def test_ontop_excludes_inside(a, b):
    if on_top(a, b):
        assert not inside(a, b)


@given(stacked_pairs())
@settings(max_examples=1000)
def test_ontop_implies_under_for_matching_footprints(pair):
    a, b = pair
    if on_top(a, b):
        assert under(b, a)


def test_stacked_pairs_reach_ontop():
    a = SceneObject('a', 'thing', Pose((1.0, 1.0, 0.31)), (0.1, 0.1, 0.1))
    b = SceneObject('b', 'thing', Pose((1.0, 1.0, 0.1)), (0.1, 0.1, 0.1))
    assert on_top(a, b)
    assert under(b, a)


@st.composite
def overlapping_pairs(draw):
    """Коробка a и крупная коробка b, центр которой смещён от a не больше чем на 0.3 м."""
    a = draw(boxes('a'))
    center = np.add(a.pose.position, draw(vectors(-0.3, 0.3)))
    b = SceneObject('b', 'thing', Pose(tuple(center)), draw(vectors(0.3, 0.8)))
    return a, b


@given(overlapping_pairs(), st.floats(min_value=0.05, max_value=0.999))
@settings(max_examples=1000)
def test_shrinking_keeps_inside(pair, scale):
    a, b = pair
    ratio = inside_ratio(a, b)
    assume(ratio > DEFAULT_PARAMS.inside_ratio + 1e-9)
    shrunk = replace(a, half_extents=tuple(scale * h for h in a.half_extents))
    assert inside_ratio(shrunk, b) >= ratio - 1e-9
    assert inside(shrunk, b)


@given(boxes('a'), boxes('b'))
@settings(max_examples=1000)
def test_gap_predicates_match_closest_point_search(a, b):
    distance = closest_distance(world_aabb(a), world_aabb(b))
    for predicate, threshold in ((touching, DEFAULT_PARAMS.touch_epsilon), (next_to, nextto_threshold(a, b))):
        if abs(distance - threshold) < 1e-6:
            continue
        assert predicate(a, b) is (distance <= threshold)


@given(boxes('a'), boxes('b'), st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=1000, deadline=None)
def test_inside_ratio_matches_monte_carlo(a, b, seed):
    rng = np.random.default_rng(seed)
    box_a, box_b = world_aabb(a), world_aabb(b)
    samples = rng.uniform(box_a.min, box_a.max, size=(100_000, 3))
    estimate = np.all((samples >= box_b.min) & (samples <= box_b.max), axis=1).mean()
    assert inside_ratio(a, b) == pytest.approx(estimate, abs=0.02)
