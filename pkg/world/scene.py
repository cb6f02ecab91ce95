"""Object-centric kinematic world model: scene snapshots, scene files and trajectories.

Snapshots are never modified after construction; ``apply_frame`` returns a new one.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from utils.errors import EngineError, FormatError

from .geometry import Aabb, Point2, Pose, Vec3, box_aabb, is_simple_polygon, point_in_polygon, signed_area

logger = logging.getLogger(__name__)


class InvariantViolation(EngineError):
    def __init__(self, object_id: str, reason: str):
        self.object_id = object_id
        self.reason = reason
        super().__init__(f"{object_id}: {reason}")


class UnknownObject(EngineError):
    def __init__(self, object_id: str, frame: Optional[int] = None):
        self.object_id = object_id
        self.frame = frame
        where = f" in frame {frame}" if frame is not None else ""
        super().__init__(f"unknown object {object_id!r}{where}")


@dataclass(frozen=True)
class SceneObject:
    id: str
    category: str
    pose: Pose
    half_extents: Vec3
    room_id: Optional[str] = None
    fixed: bool = False
    articulated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "half_extents", tuple(float(v) for v in self.half_extents))
        if len(self.half_extents) != 3 or any(v <= 0.0 for v in self.half_extents):
            raise InvariantViolation(self.id, f"half_extents must be 3 positive values, got {self.half_extents}")


@dataclass(frozen=True)
class Room:
    id: str
    floor_polygon: Tuple[Point2, ...]
    floor_z: float = 0.0

    def __post_init__(self) -> None:
        polygon = tuple((float(x), float(y)) for x, y in self.floor_polygon)
        object.__setattr__(self, "floor_polygon", polygon)
        if len(polygon) < 3:
            raise InvariantViolation(self.id, "floor polygon needs at least 3 vertices")
        if not is_simple_polygon(polygon):
            raise InvariantViolation(self.id, "floor polygon is self-intersecting")
        if signed_area(polygon) <= 0.0:
            raise InvariantViolation(self.id, "floor polygon must be counterclockwise with positive area")

    def contains_xy(self, point: Sequence[float]) -> bool:
        return point_in_polygon(point, self.floor_polygon)

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        xs = [p[0] for p in self.floor_polygon]
        ys = [p[1] for p in self.floor_polygon]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class SceneState:
    objects: Dict[str, SceneObject] = field(default_factory=dict)
    rooms: Dict[str, Room] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", dict(self.objects))
        object.__setattr__(self, "rooms", dict(self.rooms))
        for key, obj in self.objects.items():
            if key != obj.id:
                raise InvariantViolation(obj.id, f"stored under key {key!r}")
            if obj.room_id is not None and obj.room_id not in self.rooms:
                raise InvariantViolation(obj.id, f"room {obj.room_id!r} does not exist")
        for key, room in self.rooms.items():
            if key != room.id:
                raise InvariantViolation(room.id, f"stored under key {key!r}")
            if key in self.objects:
                raise InvariantViolation(key, "id used by both a room and an object")

    def get(self, object_id: str) -> SceneObject:
        try:
            return self.objects[object_id]
        except KeyError:
            raise UnknownObject(object_id) from None

    def aabb(self, object_id: str) -> Aabb:
        return world_aabb(self.get(object_id))

    def with_objects(self, updates: Mapping[str, SceneObject]) -> "SceneState":
        objects = dict(self.objects)
        objects.update(updates)
        return SceneState(objects, self.rooms)

    def room_at(self, point: Sequence[float]) -> Optional[Room]:
        for room_id in sorted(self.rooms):
            if self.rooms[room_id].contains_xy(point):
                return self.rooms[room_id]
        return None


def world_aabb(obj: SceneObject) -> Aabb:
    return box_aabb(obj.pose, obj.half_extents)


def apply_frame(scene: SceneState, frame: Mapping[str, Pose]) -> SceneState:
    """New snapshot with the given poses replaced; the input is left untouched."""
    if not frame:
        return scene
    updates = {}
    for object_id, pose in frame.items():
        if object_id not in scene.objects:
            raise UnknownObject(object_id)
        updates[object_id] = replace(scene.objects[object_id], pose=pose)
    return scene.with_objects(updates)


# === scene files ===

def _vector(entry: Mapping[str, Any], key: str, size: int, location: str) -> Tuple[float, ...]:
    value = entry.get(key)
    if not isinstance(value, list) or len(value) != size:
        raise FormatError(location, f"'{key}' must be a list of {size} numbers")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise FormatError(location, f"'{key}' must contain numbers") from None


def scene_from_dict(data: Any, source: str = "<scene>") -> SceneState:
    if not isinstance(data, dict):
        raise FormatError(source, "top level must be an object")
    objects_data = data.get("objects", [])
    rooms_data = data.get("rooms", [])
    if not isinstance(objects_data, list) or not isinstance(rooms_data, list):
        raise FormatError(source, "'objects' and 'rooms' must be lists")

    rooms: Dict[str, Room] = {}
    for index, entry in enumerate(rooms_data):
        location = f"{source}: rooms[{index}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise FormatError(location, "room needs a string 'id'")
        polygon = entry.get("polygon")
        if not isinstance(polygon, list) or not all(isinstance(p, list) and len(p) == 2 for p in polygon):
            raise FormatError(location, "'polygon' must be a list of [x, y] pairs")
        if entry["id"] in rooms:
            raise InvariantViolation(entry["id"], "duplicate room id")
        try:
            rooms[entry["id"]] = Room(entry["id"], tuple((float(x), float(y)) for x, y in polygon),
                                      float(entry.get("floor_z", 0.0)))
        except (TypeError, ValueError):
            raise FormatError(location, "room coordinates must be numbers") from None

    objects: Dict[str, SceneObject] = {}
    for index, entry in enumerate(objects_data):
        location = f"{source}: objects[{index}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise FormatError(location, "object needs a string 'id'")
        if not isinstance(entry.get("category"), str):
            raise FormatError(location, "object needs a string 'category'")
        object_id = entry["id"]
        if object_id in objects:
            raise InvariantViolation(object_id, "duplicate object id")
        position = _vector(entry, "position", 3, location)
        orientation = _vector(entry, "orientation", 4, location) if "orientation" in entry else (1.0, 0.0, 0.0, 0.0)
        half_extents = _vector(entry, "half_extents", 3, location)
        try:
            pose = Pose(position, orientation)
        except ValueError as e:
            raise InvariantViolation(object_id, str(e)) from None
        objects[object_id] = SceneObject(
            id=object_id,
            category=entry["category"],
            pose=pose,
            half_extents=half_extents,
            room_id=entry.get("room"),
            fixed=bool(entry.get("fixed", False)),
            articulated=bool(entry.get("articulated", False)),
        )

    return SceneState(objects, rooms)


def load_scene(source: str, location: str = "<scene>") -> SceneState:
    """Parse scene JSON text."""
    try:
        data = json.loads(source)
    except json.JSONDecodeError as e:
        raise FormatError(f"{location}:{e.lineno}:{e.colno}", e.msg) from None
    return scene_from_dict(data, location)


def load_scene_file(path: Union[str, Path]) -> SceneState:
    path = Path(path)
    scene = load_scene(path.read_text(encoding="utf-8"), str(path))
    logger.debug(f"Loaded scene {path}: {len(scene.objects)} objects, {len(scene.rooms)} rooms")
    return scene


def scene_to_dict(scene: SceneState) -> Dict[str, Any]:
    objects = []
    for object_id in sorted(scene.objects):
        obj = scene.objects[object_id]
        objects.append({
            "id": obj.id,
            "category": obj.category,
            "position": list(obj.pose.position),
            "orientation": list(obj.pose.orientation),
            "half_extents": list(obj.half_extents),
            "room": obj.room_id,
            "fixed": obj.fixed,
            "articulated": obj.articulated,
        })
    rooms = [
        {"id": room.id, "floor_z": room.floor_z, "polygon": [list(p) for p in room.floor_polygon]}
        for room in (scene.rooms[k] for k in sorted(scene.rooms))
    ]
    return {"objects": objects, "rooms": rooms}


def dump_scene(scene: SceneState) -> str:
    """Deterministic scene JSON (sorted ids, fixed key order)."""
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


def scene_digest(scene: SceneState) -> str:
    return hashlib.sha256(dump_scene(scene).encode("utf-8")).hexdigest()


# === trajectories ===

@dataclass(frozen=True)
class TrajectoryFrame:
    t: int
    poses: Dict[str, Tuple[Vec3, Optional[Tuple[float, ...]]]]

    def resolve(self, scene: SceneState) -> Dict[str, Pose]:
        """Poses for this frame; missing orientations keep the current one."""
        resolved = {}
        for object_id in sorted(self.poses):
            if object_id not in scene.objects:
                raise UnknownObject(object_id, self.t)
            position, orientation = self.poses[object_id]
            if orientation is None:
                orientation = scene.objects[object_id].pose.orientation
            try:
                resolved[object_id] = Pose(position, orientation)
            except ValueError as e:
                raise InvariantViolation(object_id, f"frame {self.t}: {e}") from None
        return resolved


def parse_frame(line: str, location: str) -> TrajectoryFrame:
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise FormatError(location, e.msg) from None
    if not isinstance(data, dict) or not isinstance(data.get("t"), int) or not isinstance(data.get("poses"), dict):
        raise FormatError(location, "frame needs an integer 't' and a 'poses' object")
    poses = {}
    for object_id, entry in data["poses"].items():
        if not isinstance(entry, dict):
            raise FormatError(location, f"pose of {object_id!r} must be an object")
        position = _vector(entry, "position", 3, f"{location}: {object_id}")
        orientation = _vector(entry, "orientation", 4, f"{location}: {object_id}") if "orientation" in entry else None
        poses[object_id] = (position, orientation)
    return TrajectoryFrame(data["t"], poses)


def iter_trajectory(path: Union[str, Path]) -> Iterator[TrajectoryFrame]:
    """Read a JSON Lines trajectory lazily; blank lines are skipped."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, 1):
            if line.strip():
                yield parse_frame(line, f"{path}:{line_number}")


def replay_snapshots(scene: SceneState, frames: Iterator[TrajectoryFrame]) -> Iterator[Tuple[int, SceneState]]:
    """Accumulate frames onto the base scene, yielding (t, snapshot) per frame."""
    current = scene
    for frame in frames:
        try:
            current = apply_frame(current, frame.resolve(current))
        except UnknownObject as e:
            raise UnknownObject(e.object_id, frame.t) from None
        yield frame.t, current
