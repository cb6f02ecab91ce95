"""
Тесты модели сцены: загрузка, инварианты, кадры и воспроизведение траекторий.
"""

import json

import pytest

from conftest import DATA_DIR, PRESAMPLED_DIR, TRAJECTORY
from utils.errors import FormatError
from world.geometry import Pose, yaw_quat
from world.scene import (
    InvariantViolation,
    Room,
    SceneObject,
    UnknownObject,
    apply_frame,
    dump_scene,
    iter_trajectory,
    load_scene,
    load_scene_file,
    replay_snapshots,
    scene_digest,
)


def scene_json(objects=None, rooms=None) -> str:
    rooms = rooms if rooms is not None else [
        {"id": "kitchen_0", "polygon": [[0, 0], [4, 0], [4, 4], [0, 4]]},
    ]
    objects = objects if objects is not None else [
        {"id": "cup_1", "category": "cup", "position": [1, 1, 0.05], "half_extents": [0.04, 0.04, 0.05],
         "room": "kitchen_0"},
    ]
    return json.dumps({"objects": objects, "rooms": rooms})


def test_apartment_contents(apartment):
    assert len(apartment.objects) == 20
    assert sorted(apartment.rooms) == ['bedroom_0', 'kitchen_0', 'living_room_0']
    articulated = sorted(o.id for o in apartment.objects.values() if o.articulated)
    assert articulated == ['cabinet_1', 'dresser_1', 'fridge_1']
    assert apartment.get('table_1').fixed


def test_missing_orientation_defaults_to_identity():
    scene = load_scene(scene_json())
    assert scene.get('cup_1').pose.orientation == (1.0, 0.0, 0.0, 0.0)


def test_dump_and_reload_is_stable(apartment):
    text = dump_scene(apartment)
    again = load_scene(text)
    assert again == apartment
    assert dump_scene(again) == text
    assert scene_digest(again) == scene_digest(apartment)


def test_room_lookup(apartment):
    assert apartment.room_at((1.0, 1.0)).id == 'kitchen_0'
    assert apartment.room_at((9.0, 1.0)).id == 'living_room_0'
    assert apartment.room_at((50.0, 50.0)) is None


def test_unknown_object_lookup(apartment):
    with pytest.raises(UnknownObject):
        apartment.get('ghost_1')


# === invariants ===

def test_clockwise_room_rejected():
    with pytest.raises(InvariantViolation):
        Room('kitchen_0', ((0, 0), (0, 4), (4, 4), (4, 0)))


def test_self_intersecting_room_rejected():
    with pytest.raises(InvariantViolation):
        Room('kitchen_0', ((0, 0), (4, 4), (4, 0), (0, 4)))


def test_non_positive_half_extent_rejected():
    with pytest.raises(InvariantViolation):
        SceneObject('cup_1', 'cup', Pose((0, 0, 0)), (0.1, 0.0, 0.1))


def test_object_in_unknown_room_rejected():
    objects = [{"id": "cup_1", "category": "cup", "position": [1, 1, 0.05],
                "half_extents": [0.04, 0.04, 0.05], "room": "garage_0"}]
    with pytest.raises(InvariantViolation):
        load_scene(scene_json(objects=objects))


def test_duplicate_object_id_rejected():
    cup = {"id": "cup_1", "category": "cup", "position": [1, 1, 0.05], "half_extents": [0.04, 0.04, 0.05]}
    with pytest.raises(InvariantViolation):
        load_scene(scene_json(objects=[cup, dict(cup)]))


def test_bad_quaternion_is_an_invariant_violation():
    objects = [{"id": "cup_1", "category": "cup", "position": [1, 1, 0.05], "orientation": [2, 0, 0, 0],
                "half_extents": [0.04, 0.04, 0.05]}]
    with pytest.raises(InvariantViolation):
        load_scene(scene_json(objects=objects))


def test_malformed_json_location():
    with pytest.raises(FormatError) as exc:
        load_scene('{"objects": [\n  oops\n]}', 'broken.json')
    assert exc.value.location.startswith('broken.json:2:')


def test_missing_field_is_a_format_error():
    objects = [{"id": "cup_1", "category": "cup", "position": [1, 1], "half_extents": [0.04, 0.04, 0.05]}]
    with pytest.raises(FormatError):
        load_scene(scene_json(objects=objects))


# === frames ===

def test_apply_frame_leaves_input_untouched(apartment):
    moved = apply_frame(apartment, {'cup_1': Pose((3.0, 3.0, 0.05), yaw_quat(0.3))})
    assert moved.get('cup_1').pose.position == (3.0, 3.0, 0.05)
    assert apartment.get('cup_1').pose.position == (2.3, 2.1, 0.805)
    assert moved.get('plate_1') == apartment.get('plate_1')


def test_apply_frame_unknown_object(apartment):
    with pytest.raises(UnknownObject):
        apply_frame(apartment, {'ghost_1': Pose((0, 0, 0))})


def test_replay_success_trajectory():
    scene = load_scene_file(PRESAMPLED_DIR / 'scene.json')
    snapshots = list(replay_snapshots(scene, iter_trajectory(TRAJECTORY)))
    assert [t for t, _ in snapshots] == list(range(100))
    _, last = snapshots[-1]
    assert last.get('plate_1').pose.position == pytest.approx((2.0, 2.2, 0.765))
    assert last.get('cup_1').pose.position == pytest.approx((2.2, 2.2, 0.805))
    assert scene.get('plate_1').pose.position == pytest.approx((0.5, 3.5, 0.915))


def test_frame_without_orientation_keeps_current(tmp_path, apartment):
    turned = apply_frame(apartment, {'cup_1': Pose((2.3, 2.1, 0.805), yaw_quat(1.0))})
    path = tmp_path / 'traj.jsonl'
    path.write_text('{"t": 0, "poses": {"cup_1": {"position": [2.0, 2.0, 0.805]}}}\n', encoding='utf-8')
    [(_, snapshot)] = list(replay_snapshots(turned, iter_trajectory(path)))
    assert snapshot.get('cup_1').pose.orientation == pytest.approx(yaw_quat(1.0))


def test_unknown_object_reports_frame(tmp_path, apartment):
    lines = [
        '{"t": 0, "poses": {"cup_1": {"position": [2.0, 2.0, 0.805]}}}',
        '',
        '{"t": 1, "poses": {"ghost_1": {"position": [2.0, 2.0, 0.805]}}}',
    ]
    path = tmp_path / 'traj.jsonl'
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    frames = replay_snapshots(apartment, iter_trajectory(path))
    assert next(frames)[0] == 0
    with pytest.raises(UnknownObject) as exc:
        next(frames)
    assert exc.value.frame == 1
    assert exc.value.object_id == 'ghost_1'


def test_malformed_frame_location(tmp_path, apartment):
    path = tmp_path / 'traj.jsonl'
    path.write_text('{"t": 0, "poses": {}}\n{"poses": {}}\n', encoding='utf-8')
    with pytest.raises(FormatError) as exc:
        list(iter_trajectory(path))
    assert exc.value.location == f"{path}:2"


def test_presampled_scene_differs_only_in_moved_objects(apartment):
    presampled = load_scene_file(DATA_DIR / 'presampled' / 'setting_the_table' / 'scene.json')
    changed = sorted(k for k in apartment.objects if apartment.objects[k] != presampled.objects[k])
    assert changed == ['cup_1', 'plate_1']
