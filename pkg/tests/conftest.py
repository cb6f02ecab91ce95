"""
Общие фикстуры тестов движка: пути к данным, таксономия, сцены, корпус активностей.
"""

import json
import sys
from pathlib import Path

import pytest

# Добавляем корень проекта для импорта
ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from parsers.bddl_parser import load_activity  # noqa: E402
from world.geometry import Pose  # noqa: E402
from world.scene import Room, SceneObject, SceneState, load_scene_file  # noqa: E402
from world.taxonomy import load_taxonomy_file  # noqa: E402

DATA_DIR = ROOT / 'data'
ACTIVITIES_DIR = DATA_DIR / 'activities'
PRESAMPLED_DIR = DATA_DIR / 'presampled' / 'setting_the_table'
TRAJECTORY = DATA_DIR / 'trajectories' / 'setting_the_table_success.jsonl'


def activity_path(name: str) -> Path:
    return ACTIVITIES_DIR / name / 'problem0.bddl'


@pytest.fixture(scope='session')
def taxonomy():
    return load_taxonomy_file(DATA_DIR / 'taxonomy.txt')


@pytest.fixture(scope='session')
def apartment():
    return load_scene_file(DATA_DIR / 'scenes' / 'apartment_0.json')


@pytest.fixture(scope='session')
def empty_kitchen():
    return load_scene_file(DATA_DIR / 'scenes' / 'empty_kitchen.json')


@pytest.fixture(scope='session')
def corpus_labels():
    return json.loads((ACTIVITIES_DIR / 'labels.json').read_text(encoding='utf-8'))


@pytest.fixture
def load_corpus():
    """Фабрика: имя активности корпуса -> Activity."""
    return lambda name: load_activity(activity_path(name))


@pytest.fixture
def box():
    """Фабрика объектов-коробок без поворота."""
    def make(object_id, center, half_extents, category='thing', room=None, fixed=False):
        return SceneObject(object_id, category, Pose(center), half_extents, room_id=room, fixed=fixed)
    return make


@pytest.fixture
def square_room():
    """Фабрика квадратных комнат с углом в начале координат."""
    def make(room_id='kitchen_0', size=4.0, floor_z=0.0):
        return Room(room_id, ((0.0, 0.0), (size, 0.0), (size, size), (0.0, size)), floor_z)
    return make


@pytest.fixture
def make_scene():
    def make(objects=(), rooms=()):
        return SceneState({o.id: o for o in objects}, {r.id: r for r in rooms})
    return make
