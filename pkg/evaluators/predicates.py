"""The six kinematic predicates, evaluated on world bounding boxes of a snapshot."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from parsers.classifier import DEFAULT_SUPPORTED
from parsers.conditions import Atom
from utils.errors import EngineError
from world.geometry import gap_distance, horizontal_overlap_ratio, intersection_volume
from world.scene import Room, SceneObject, SceneState, UnknownObject, world_aabb
from world.taxonomy import GroundScope

KINEMATIC_PREDICATES = DEFAULT_SUPPORTED


class PredicateKind(Enum):
    NEXT_TO = "nextto"
    INSIDE = "inside"
    ON_FLOOR = "onfloor"
    ON_TOP = "ontop"
    TOUCHING = "touching"
    UNDER = "under"

    @classmethod
    def parse(cls, name: str) -> "PredicateKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise UnknownPredicate(name) from None


class UnboundTerm(EngineError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"term {name!r} is not bound")


class UnknownPredicate(EngineError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"predicate {name!r} is not a kinematic predicate")


class UnsupportedFloorRelation(EngineError):
    def __init__(self, predicate: str, room_id: str):
        self.predicate = predicate
        self.room_id = room_id
        super().__init__(f"predicate {predicate!r} is not defined against the floor of room {room_id!r}")


@dataclass(frozen=True)
class PredicateParams:
    """Geometric thresholds; meters unless noted."""

    touch_epsilon: float = 0.001
    support_gap: float = 0.02
    footprint_ratio: float = 0.5
    inside_ratio: float = 0.5
    nextto_scale: float = 0.5

    def __post_init__(self) -> None:
        for name in ("touch_epsilon", "support_gap", "footprint_ratio", "inside_ratio", "nextto_scale"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("footprint_ratio", "inside_ratio"):
            if getattr(self, name) > 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {getattr(self, name)}")

    def to_dict(self) -> dict:
        return {
            "touch_epsilon": self.touch_epsilon,
            "support_gap": self.support_gap,
            "footprint_ratio": self.footprint_ratio,
            "inside_ratio": self.inside_ratio,
            "nextto_scale": self.nextto_scale,
        }


DEFAULT_PARAMS = PredicateParams()


def touching(a: SceneObject, b: SceneObject, p: PredicateParams = DEFAULT_PARAMS) -> bool:
    return gap_distance(world_aabb(a), world_aabb(b)) <= p.touch_epsilon


def nextto_threshold(a: SceneObject, b: SceneObject, p: PredicateParams = DEFAULT_PARAMS) -> float:
    return p.nextto_scale * min(world_aabb(a).xy_diagonal, world_aabb(b).xy_diagonal)


def next_to(a: SceneObject, b: SceneObject, p: PredicateParams = DEFAULT_PARAMS) -> bool:
    return gap_distance(world_aabb(a), world_aabb(b)) <= nextto_threshold(a, b, p)


def inside_ratio(a: SceneObject, b: SceneObject) -> float:
    """Fraction of a's box volume that lies in b's box."""
    box_a = world_aabb(a)
    return intersection_volume(box_a, world_aabb(b)) / box_a.volume


def inside(a: SceneObject, b: SceneObject, p: PredicateParams = DEFAULT_PARAMS) -> bool:
    return inside_ratio(a, b) >= p.inside_ratio


def on_top(a: SceneObject, b: SceneObject, p: PredicateParams = DEFAULT_PARAMS) -> bool:
    box_a, box_b = world_aabb(a), world_aabb(b)
    if horizontal_overlap_ratio(box_a, box_b) < p.footprint_ratio:
        return False
    clearance = box_a.min[2] - box_b.max[2]
    if not 0.0 <= clearance <= p.support_gap:
        return False
    return not inside(a, b, p)


def under(a: SceneObject, b: SceneObject, p: PredicateParams = DEFAULT_PARAMS) -> bool:
    # Footprint ratio is measured against a only: a small object under a large table qualifies.
    box_a, box_b = world_aabb(a), world_aabb(b)
    if horizontal_overlap_ratio(box_a, box_b) < p.footprint_ratio:
        return False
    return box_a.max[2] <= box_b.min[2] + p.support_gap


def on_floor(a: SceneObject, room: Room, p: PredicateParams = DEFAULT_PARAMS) -> bool:
    box_a = world_aabb(a)
    if abs(box_a.min[2] - room.floor_z) > p.support_gap:
        return False
    return room.contains_xy(box_a.center[:2])


# Resting on a room's floor is the only floor relation; ontop and touching read as onfloor there.
FLOOR_PREDICATES = frozenset({PredicateKind.ON_FLOOR, PredicateKind.ON_TOP, PredicateKind.TOUCHING})

_OBJECT_PREDICATES = {
    PredicateKind.NEXT_TO: next_to,
    PredicateKind.INSIDE: inside,
    PredicateKind.ON_TOP: on_top,
    PredicateKind.TOUCHING: touching,
    PredicateKind.UNDER: under,
}


def eval_bound(predicate: str, ids: Sequence[str], scene: SceneState,
               p: PredicateParams = DEFAULT_PARAMS) -> bool:
    """Evaluate a predicate on instance ids (object ids, or room ids for floors)."""
    kind = PredicateKind.parse(predicate)
    if len(ids) != 2:
        raise UnknownPredicate(f"{predicate}/{len(ids)}")
    first, second = ids
    if first == second:
        return False
    subject = scene.get(first)

    if second in scene.rooms:
        if kind not in FLOOR_PREDICATES:
            raise UnsupportedFloorRelation(kind.value, second)
        return on_floor(subject, scene.rooms[second], p)
    if kind is PredicateKind.ON_FLOOR:
        raise UnknownObject(second)
    return _OBJECT_PREDICATES[kind](subject, scene.get(second), p)


def eval_atom(atom: Atom, scope: GroundScope, scene: SceneState,
              p: PredicateParams = DEFAULT_PARAMS) -> bool:
    """Resolve atom terms through the scope, then dispatch on the predicate."""
    PredicateKind.parse(atom.predicate)
    ids = []
    for arg in atom.args:
        if arg.startswith("?") or arg not in scope:
            raise UnboundTerm(arg)
        ids.append(scope[arg])
    return eval_bound(atom.predicate, ids, scene, p)
