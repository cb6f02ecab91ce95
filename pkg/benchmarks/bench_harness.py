"""Evaluation throughput across worker counts.

Every worker replays the same seeded frame stream (frame i jitters the base
scene with a generator seeded by (seed, i)), scores the goal on each frame and
hashes the reports. Work partitioning therefore cannot change the checksum,
and a row is only valid when all of its workers agree.

Metric: frames of goal evaluation per second of wall time.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import FIRST_EXCEPTION, Executor, ProcessPoolExecutor, ThreadPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from evaluators.logic import CompiledCondition, compile_condition, score_goal
from evaluators.predicates import DEFAULT_PARAMS, PredicateParams
from parsers.conditions import Activity, And, Atom, Or
from utils.errors import EngineError, FormatError
from world.geometry import Pose
from world.scene import Room, SceneObject, SceneState, apply_frame
from world.taxonomy import GroundScope, Taxonomy

logger = logging.getLogger(__name__)

JITTER_METERS = 0.01


class BenchTimeout(EngineError):
    def __init__(self, workers: int, duration_cap: float):
        self.workers = workers
        self.duration_cap = duration_cap
        super().__init__(f"bench with {workers} workers exceeded the {duration_cap:g}s duration cap")


class MismatchedConfigs(EngineError):
    def __init__(self, baseline: Sequence[int], candidate: Sequence[int]):
        self.baseline = list(baseline)
        self.candidate = list(candidate)
        super().__init__(f"worker lists differ: {self.baseline} vs {self.candidate}")


class ChecksumMismatch(EngineError):
    def __init__(self, workers: int, checksums: Sequence[str]):
        self.workers = workers
        self.checksums = sorted(set(checksums))
        super().__init__(f"workers disagree on the report checksum at {workers} workers: {self.checksums}")


@dataclass(frozen=True)
class BenchConfig:
    workers: Tuple[int, ...]
    frames_per_worker: int
    scene: SceneState
    activity: Activity
    scope: GroundScope
    taxonomy: Optional[Taxonomy] = None
    seed: int = 0
    duration_cap: Optional[float] = None
    params: PredicateParams = DEFAULT_PARAMS
    use_threads: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "workers", tuple(self.workers))
        if not self.workers:
            raise ValueError("workers must not be empty")
        if any(w < 1 for w in self.workers):
            raise ValueError(f"worker counts must be positive, got {list(self.workers)}")
        if list(self.workers) != sorted(self.workers):
            raise ValueError(f"worker counts must be sorted ascending, got {list(self.workers)}")
        if self.frames_per_worker < 1:
            raise ValueError(f"frames_per_worker must be >= 1, got {self.frames_per_worker}")
        if self.duration_cap is not None and self.duration_cap <= 0:
            raise ValueError(f"duration_cap must be positive, got {self.duration_cap}")


@dataclass(frozen=True)
class BenchRow:
    workers: int
    total_frames: int
    wall_seconds: float
    frames_per_second: float
    checksum: str

    def to_dict(self) -> dict:
        return {
            "workers": self.workers,
            "total_frames": self.total_frames,
            "wall_seconds": self.wall_seconds,
            "frames_per_second": self.frames_per_second,
            "checksum": self.checksum,
        }


@dataclass(frozen=True)
class BenchReport:
    rows: Tuple[BenchRow, ...]
    seed: int
    frames_per_worker: int

    @property
    def workers(self) -> List[int]:
        return [row.workers for row in self.rows]

    def fps_by_workers(self) -> Dict[int, float]:
        return {row.workers: row.frames_per_second for row in self.rows}

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "frames_per_worker": self.frames_per_worker,
            "rows": [row.to_dict() for row in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def render_table(self) -> str:
        header = ("workers", "frames", "wall_s", "fps", "checksum")
        body = [
            (str(r.workers), str(r.total_frames), f"{r.wall_seconds:.3f}", f"{r.frames_per_second:.1f}", r.checksum[:16])
            for r in self.rows
        ]
        return _align([header] + body)


def _align(rows: List[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.rjust(width) for cell, width in zip(row, widths)) for row in rows]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SpeedupRow:
    workers: int
    ratio: float

    @property
    def formatted(self) -> str:
        return f"{self.ratio:.2f}"


def speedup_table(baseline: BenchReport, candidate: BenchReport) -> List[SpeedupRow]:
    """candidate fps over baseline fps, per worker count."""
    if baseline.workers != candidate.workers:
        raise MismatchedConfigs(baseline.workers, candidate.workers)
    base_fps = baseline.fps_by_workers()
    return [SpeedupRow(row.workers, row.frames_per_second / base_fps[row.workers]) for row in candidate.rows]


def render_speedup_table(rows: Sequence[SpeedupRow]) -> str:
    return _align([("workers", "speedup")] + [(str(r.workers), f"{r.formatted}x") for r in rows])


# === workload ===

def jitter_frame(scene: SceneState, seed: int, frame_index: int) -> SceneState:
    """Base scene with every non-fixed object shifted by up to 1 cm per axis."""
    rng = np.random.default_rng([seed, frame_index])
    movable = sorted(object_id for object_id, obj in scene.objects.items() if not obj.fixed)
    offsets = rng.uniform(-JITTER_METERS, JITTER_METERS, size=(len(movable), 3))
    poses = {}
    for object_id, offset in zip(movable, offsets):
        pose = scene.objects[object_id].pose
        poses[object_id] = Pose(tuple(np.asarray(pose.position) + offset), pose.orientation)
    return apply_frame(scene, poses)


def _worker_loop(compiled: CompiledCondition, scene: SceneState, params: PredicateParams,
                 seed: int, frames: int, deadline: Optional[float]) -> Tuple[int, str]:
    digest = hashlib.sha256()
    done = 0
    for frame_index in range(frames):
        if deadline is not None and time.time() > deadline:
            break
        report = score_goal(compiled, jitter_frame(scene, seed, frame_index), params)
        digest.update(report.to_json().encode("utf-8"))
        digest.update(b"\n")
        done += 1
    return done, digest.hexdigest()


def _executor(config: BenchConfig, workers: int) -> Executor:
    if config.use_threads:
        return ThreadPoolExecutor(max_workers=workers)
    return ProcessPoolExecutor(max_workers=workers)


def _run_row(config: BenchConfig, compiled: CompiledCondition, workers: int) -> BenchRow:
    deadline = time.time() + config.duration_cap if config.duration_cap is not None else None
    start = time.perf_counter()
    executor = _executor(config, workers)
    try:
        futures = [
            executor.submit(_worker_loop, compiled, config.scene, config.params,
                            config.seed, config.frames_per_worker, deadline)
            for _ in range(workers)
        ]
        done, pending = wait(futures, timeout=config.duration_cap, return_when=FIRST_EXCEPTION)
        for future in done:
            if future.exception() is not None:
                raise future.exception()
        if pending:
            raise BenchTimeout(workers, config.duration_cap)
        results = [future.result() for future in futures]
    finally:
        executor.shutdown(wait=False, cancel_futures=True)
    wall_seconds = max(time.perf_counter() - start, 1e-9)

    if any(frames < config.frames_per_worker for frames, _ in results):
        raise BenchTimeout(workers, config.duration_cap)
    checksums = [checksum for _, checksum in results]
    if len(set(checksums)) != 1:
        raise ChecksumMismatch(workers, checksums)

    total_frames = workers * config.frames_per_worker
    return BenchRow(workers, total_frames, wall_seconds, total_frames / wall_seconds, checksums[0])


def run_bench(config: BenchConfig) -> BenchReport:
    compiled = compile_condition(config.activity.goal, config.scope, config.taxonomy, config.scene)
    mode = "threads" if config.use_threads else "processes"
    logger.info(f"Bench {config.activity.name}: workers {list(config.workers)}, "
                f"{config.frames_per_worker} frames each, {mode}")
    rows = []
    for workers in config.workers:
        row = _run_row(config, compiled, workers)
        logger.info(f"  {workers} workers: {row.total_frames} frames in {row.wall_seconds:.3f}s "
                    f"({row.frames_per_second:.1f} fps)")
        rows.append(row)
    return BenchReport(tuple(rows), config.seed, config.frames_per_worker)


def synthetic_scene(n_objects: int, seed: int = 0) -> SceneState:
    """One large room holding pairs of a fixed table and a movable item resting on it."""
    if n_objects < 2:
        raise ValueError(f"n_objects must be >= 2, got {n_objects}")
    rng = np.random.default_rng(seed)
    pairs = n_objects // 2
    side = int(np.ceil(np.sqrt(pairs)))
    room_size = 3.0 * side + 3.0
    room = Room("hall_0", ((0.0, 0.0), (room_size, 0.0), (room_size, room_size), (0.0, room_size)))

    objects = {}
    for k in range(pairs):
        x = 2.0 + 3.0 * (k % side)
        y = 2.0 + 3.0 * (k // side)
        table_id, item_id = f"table_{k}", f"item_{k}"
        objects[table_id] = SceneObject(table_id, "table", Pose((x, y, 0.375)), (0.5, 0.5, 0.375),
                                        room_id=room.id, fixed=True)
        dx, dy = rng.uniform(-0.3, 0.3, size=2)
        objects[item_id] = SceneObject(item_id, "item", Pose((x + dx, y + dy, 0.8)), (0.05, 0.05, 0.05),
                                       room_id=room.id)
    if n_objects % 2:
        objects["item_extra"] = SceneObject("item_extra", "item", Pose((1.0, 1.0, 0.05)), (0.05, 0.05, 0.05),
                                            room_id=room.id)
    return SceneState(objects, {room.id: room})


def synthetic_activity(scene: SceneState) -> Tuple[Activity, GroundScope]:
    """Goal: every item stays on its table, and item_0 is near item_1 or touches its table."""
    pairs = sorted(object_id for object_id in scene.objects if object_id.startswith("table_"))
    objects = []
    bindings = {}
    atoms = []
    for table_id in pairs:
        k = table_id.split("_", 1)[1]
        item_term, table_term = f"item.n.01_{k}", f"table.n.01_{k}"
        objects += [(item_term, "item.n.01"), (table_term, "table.n.01")]
        bindings[item_term] = f"item_{k}"
        bindings[table_term] = table_id
        atoms.append(Atom("ontop", (item_term, table_term)))
    children = list(atoms)
    if len(pairs) >= 2:
        children.append(Or((
            Atom("nextto", ("item.n.01_0", "item.n.01_1")),
            Atom("touching", ("item.n.01_0", "table.n.01_0")),
        )))
    activity = Activity(
        problem_name="synthetic_bench",
        domain_name="omnigibson",
        objects=tuple(objects),
        init=tuple(atoms),
        goal=And(tuple(children)),
    )
    return activity, GroundScope(bindings)


def bench_report_from_dict(data: dict, location: str = "<bench report>") -> BenchReport:
    try:
        rows = tuple(
            BenchRow(int(r["workers"]), int(r["total_frames"]), float(r["wall_seconds"]),
                     float(r["frames_per_second"]), str(r["checksum"]))
            for r in data["rows"]
        )
        return BenchReport(rows, int(data["seed"]), int(data["frames_per_worker"]))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(location, f"malformed bench report: {e}") from None


def load_bench_report(path: Union[str, Path]) -> BenchReport:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    return bench_report_from_dict(data, str(path))
