"""Activity instantiation: seeded rejection sampling of init placements, or
verified loading of a pre-sampled scene plus term bindings.

Sampling order:
    1. inroom directives pin anchors (furniture, floors) to rooms via grounding
    2. movable terms bind to free instances or are spawned from the object library
    3. positive placement atoms are sampled in support order
    4. negative atoms act as filters re-checked after every placement
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from evaluators.logic import GoalReport, check_init
from evaluators.predicates import (
    DEFAULT_PARAMS,
    FLOOR_PREDICATES,
    PredicateKind,
    PredicateParams,
    UnknownPredicate,
    UnsupportedFloorRelation,
    eval_bound,
    nextto_threshold,
)
from parsers.conditions import INROOM, Activity, Atom, Condition, Not, to_sexpr
from utils.errors import EngineError, FormatError
from world.geometry import IDENTITY_QUAT, Pose, interpenetrates
from world.scene import SceneObject, SceneState, UnknownObject, dump_scene, load_scene_file, world_aabb
from world.taxonomy import GroundScope, Taxonomy, ground_terms, term_candidates

logger = logging.getLogger(__name__)

PLACEMENT_PREDICATES = frozenset(kind.value for kind in PredicateKind)

STAGING_ORIGIN = (1000.0, 1000.0, 1000.0)
STAGING_SPACING = 10.0


class CyclicSupport(EngineError):
    def __init__(self, atoms: Sequence[Condition]):
        self.atoms = list(atoms)
        super().__init__("cyclic support: " + ", ".join(to_sexpr(a) for a in self.atoms))


class SamplingFailed(EngineError):
    def __init__(self, atom: Condition, attempts: int, reason: str = ""):
        self.atom = atom
        self.attempts = attempts
        detail = f" ({reason})" if reason else ""
        super().__init__(f"could not satisfy {to_sexpr(atom)} after {attempts} attempts{detail}")


class InitViolated(EngineError):
    def __init__(self, leaves: Sequence[str]):
        self.leaves = list(leaves)
        super().__init__("init conditions violated: " + ", ".join(self.leaves))


class MissingLibraryEntry(EngineError):
    def __init__(self, synset: str):
        self.synset = synset
        super().__init__(f"object library has no entry for {synset!r}")


@dataclass(frozen=True)
class SamplerParams:
    max_attempts_per_atom: int = 100
    clearance: float = 0.005
    seed: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.max_attempts_per_atom, int) or self.max_attempts_per_atom < 1:
            raise ValueError(f"max_attempts_per_atom must be an integer >= 1, got {self.max_attempts_per_atom}")
        if self.clearance < 0.0:
            raise ValueError(f"clearance must be >= 0, got {self.clearance}")
        if not isinstance(self.seed, int):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")

    def to_dict(self) -> dict:
        return {
            "max_attempts_per_atom": self.max_attempts_per_atom,
            "clearance": self.clearance,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class LibraryEntry:
    category: str
    half_extents: Tuple[float, float, float]


def load_object_library(path: Union[str, Path]) -> Dict[str, LibraryEntry]:
    """Read ``{synset: {"category": ..., "half_extents": [x, y, z]}}``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    if not isinstance(data, dict):
        raise FormatError(str(path), "top level must be an object")
    library = {}
    for synset, entry in data.items():
        location = f"{path}: {synset}"
        if not isinstance(entry, dict) or not isinstance(entry.get("category"), str):
            raise FormatError(location, "entry needs a string 'category'")
        extents = entry.get("half_extents")
        if not isinstance(extents, list) or len(extents) != 3:
            raise FormatError(location, "'half_extents' must be a list of 3 numbers")
        try:
            half_extents = tuple(float(v) for v in extents)
        except (TypeError, ValueError):
            raise FormatError(location, "'half_extents' must contain numbers") from None
        if any(v <= 0.0 for v in half_extents):
            raise FormatError(location, "'half_extents' must be positive")
        library[synset] = LibraryEntry(entry["category"], half_extents)
    logger.debug(f"Object library {path}: {len(library)} entries")
    return library


@dataclass(frozen=True)
class SampledInstance:
    scene: SceneState
    scope: GroundScope
    activity_name: str
    seed: Optional[int]
    warnings: Tuple[str, ...] = ()

    def write(self, scene_path: Union[str, Path], scope_path: Union[str, Path]) -> None:
        scene_path, scope_path = Path(scene_path), Path(scope_path)
        scene_path.parent.mkdir(parents=True, exist_ok=True)
        scope_path.parent.mkdir(parents=True, exist_ok=True)
        scene_path.write_text(dump_scene(self.scene), encoding="utf-8")
        scope_path.write_text(json.dumps(self.scope.to_dict(), indent=2) + "\n", encoding="utf-8")
        logger.info(f"Wrote {self.activity_name}: {scene_path}, {scope_path}")


# === constraint ordering ===

def _is_inroom(entry: Condition) -> bool:
    return isinstance(entry, Atom) and entry.predicate == INROOM


def order_constraints(init: Sequence[Condition]) -> List[Condition]:
    """inroom directives, then positive atoms in support order, then negative atoms.

    Support order: an atom placing X relative to Y precedes every atom placing
    something relative to X. Ties keep the input order.
    """
    directives = [e for e in init if _is_inroom(e)]
    negatives = [e for e in init if isinstance(e, Not)]
    positives = [e for e in init if isinstance(e, Atom) and not _is_inroom(e)]

    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(positives)))
    for i, placed in enumerate(positives):
        if len(placed.args) != 2:
            continue
        for j, dependent in enumerate(positives):
            if len(dependent.args) == 2 and dependent.args[1] == placed.args[0]:
                graph.add_edge(i, j)

    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        raise CyclicSupport([positives[edge[0]] for edge in cycle])

    ordered = [positives[i] for i in nx.lexicographical_topological_sort(graph, key=lambda i: i)]
    return directives + ordered + negatives


def movable_terms(activity: Activity) -> List[str]:
    """Subjects of positive placement atoms without an inroom directive, in declaration order."""
    pinned = activity.inroom_directives()
    subjects = {
        entry.args[0] for entry in activity.init
        if isinstance(entry, Atom) and entry.predicate in PLACEMENT_PREDICATES
    }
    return [term for term in activity.terms if term in subjects and term not in pinned]


# === sampling ===

class _PlacementRun:
    """Mutable state of one sampling run: the working scene, bindings and random stream."""

    def __init__(self, activity: Activity, scene: SceneState, scope: GroundScope, staged: Set[str],
                 params: SamplerParams, predicate_params: PredicateParams, rng: np.random.Generator):
        self.activity = activity
        self.scene = scene
        self.scope = scope
        self.staged = staged
        self.params = params
        self.predicate_params = predicate_params
        self.rng = rng
        self.satisfied: List[Atom] = []
        self.negatives = [e for e in activity.init if isinstance(e, Not) and not _is_inroom(e.child)]
        self.related: Set[frozenset] = set()
        for entry in activity.init:
            atom = entry.child if isinstance(entry, Not) else entry
            if isinstance(atom, Atom) and len(atom.args) == 2 and not _is_inroom(atom):
                self.related.add(frozenset(scope.get(t, t) for t in atom.args))

    def holds(self, atom: Atom, scene: SceneState) -> bool:
        ids = [self.scope[t] for t in atom.args]
        return eval_bound(atom.predicate, ids, scene, self.predicate_params)

    def acceptable(self, atom: Atom, subject_id: str, scene: SceneState, check_contacts: bool = True) -> bool:
        if not self.holds(atom, scene):
            return False
        if not all(self.holds(previous, scene) for previous in self.satisfied):
            return False
        if any(self.holds(negative.child, scene) for negative in self.negatives):
            return False
        if not check_contacts:
            return True
        box = scene.aabb(subject_id)
        for other_id, other in scene.objects.items():
            if other_id == subject_id or other_id in self.staged:
                continue
            if frozenset((subject_id, other_id)) in self.related:
                continue
            if interpenetrates(box, world_aabb(other)):
                return False
        return True

    def propose(self, predicate: str, subject: SceneObject, reference_id: str) -> Optional[Tuple[float, float, float]]:
        """A candidate center for ``subject``, or None when the draw falls outside the region."""
        rng, c = self.rng, self.params.clearance
        h = np.asarray(world_aabb(subject).half_extents)

        if reference_id in self.scene.rooms:
            if PredicateKind.parse(predicate) not in FLOOR_PREDICATES:
                raise UnsupportedFloorRelation(predicate, reference_id)
            room = self.scene.rooms[reference_id]
            min_x, min_y, max_x, max_y = room.bounds
            if min_x + h[0] > max_x - h[0] or min_y + h[1] > max_y - h[1]:
                return None
            x = rng.uniform(min_x + h[0], max_x - h[0])
            y = rng.uniform(min_y + h[1], max_y - h[1])
            if not room.contains_xy((x, y)):
                return None
            return (x, y, room.floor_z + c + h[2])

        if predicate == "onfloor":
            raise UnknownObject(reference_id)
        reference = self.scene.get(reference_id)
        box = world_aabb(reference)
        lo, hi = np.asarray(box.min), np.asarray(box.max)

        if predicate in ("ontop", "inside", "under"):
            inner_lo, inner_hi = lo + h, hi - h
            if np.any(inner_lo[:2] > inner_hi[:2]):
                return None
            x = rng.uniform(inner_lo[0], inner_hi[0])
            y = rng.uniform(inner_lo[1], inner_hi[1])
            if predicate == "ontop":
                return (x, y, hi[2] + c + h[2])
            if predicate == "inside":
                if inner_lo[2] > inner_hi[2]:
                    return None
                return (x, y, rng.uniform(inner_lo[2], inner_hi[2]))
            return (x, y, self._floor_z(reference) + c + h[2])

        if predicate == "nextto":
            threshold = nextto_threshold(subject, reference, self.predicate_params)
            if threshold < c:
                return None
            gap = rng.uniform(c, threshold)
        else:
            gap = 0.0
        return self._beside(lo, hi, h, gap, int(rng.integers(4)))

    def _beside(self, lo: np.ndarray, hi: np.ndarray, h: np.ndarray, gap: float, side: int) -> Tuple[float, float, float]:
        # side: 0 +x, 1 -x, 2 +y, 3 -y; the other horizontal axis keeps the boxes overlapping.
        axis = 0 if side < 2 else 1
        other = 1 - axis
        along = self.rng.uniform(lo[other] - h[other], hi[other] + h[other])
        across = hi[axis] + gap + h[axis] if side % 2 == 0 else lo[axis] - gap - h[axis]
        center = [0.0, 0.0, lo[2] + self.params.clearance + h[2]]
        center[axis] = across
        center[other] = along
        return tuple(center)

    def _floor_z(self, reference: SceneObject) -> float:
        if reference.room_id is not None:
            return self.scene.rooms[reference.room_id].floor_z
        room = self.scene.room_at(world_aabb(reference).center[:2])
        return room.floor_z if room is not None else 0.0

    def place(self, atom: Atom) -> None:
        subject_id = self.scope[atom.args[0]]
        reference_id = self.scope[atom.args[1]]
        subject = self.scene.get(subject_id)
        for attempt in range(1, self.params.max_attempts_per_atom + 1):
            center = self.propose(atom.predicate, subject, reference_id)
            if center is None:
                logger.debug(f"{to_sexpr(atom)}: attempt {attempt} outside the feasible region")
                continue
            room = self.scene.room_at(center[:2])
            moved = replace(subject, pose=Pose(tuple(float(v) for v in center), subject.pose.orientation),
                            room_id=room.id if room is not None else None)
            candidate = self.scene.with_objects({subject_id: moved})
            if self.acceptable(atom, subject_id, candidate):
                self.scene = candidate
                self.staged.discard(subject_id)
                self.satisfied.append(atom)
                logger.debug(f"{to_sexpr(atom)}: placed {subject_id} after {attempt} attempts")
                return
            logger.debug(f"{to_sexpr(atom)}: attempt {attempt} rejected")
        raise SamplingFailed(atom, self.params.max_attempts_per_atom)

    def verify(self, atom: Atom) -> None:
        if not self.acceptable(atom, self.scope[atom.args[0]], self.scene, check_contacts=False):
            raise SamplingFailed(atom, 0, "subject is pinned to the scene and cannot be moved")
        self.satisfied.append(atom)


def _spawn_id(category: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    n = 1
    while f"{category}_{n}" in taken:
        n += 1
    return f"{category}_{n}"


def _staging_pose(slot: int) -> Pose:
    x, y, z = STAGING_ORIGIN
    return Pose((x + STAGING_SPACING * slot, y, z), IDENTITY_QUAT)


def sample_instance(activity: Activity, base_scene: SceneState, taxonomy: Taxonomy,
                    params: SamplerParams = SamplerParams(),
                    library: Optional[Mapping[str, LibraryEntry]] = None,
                    predicate_params: PredicateParams = DEFAULT_PARAMS) -> SampledInstance:
    """Place the activity's movable objects so that every init condition holds.

    Deterministic for a given (activity, base_scene, params); the base scene
    is not modified.
    """
    ordered = order_constraints(activity.init)
    for entry in ordered:
        atom = entry.child if isinstance(entry, Not) else entry
        if not _is_inroom(atom) and atom.predicate not in PLACEMENT_PREDICATES:
            raise UnknownPredicate(atom.predicate)

    rng = np.random.default_rng(params.seed)
    movables = movable_terms(activity)
    anchors = [t for t in activity.terms if t not in movables]
    scope = ground_terms(activity, taxonomy, base_scene, params.seed, terms=anchors) if anchors else GroundScope()
    logger.info(f"Sampling {activity.name} (seed {params.seed}): {len(anchors)} anchors, {len(movables)} movables")

    used = set(scope.bindings.values())
    scene = base_scene
    staged: Set[str] = set()
    bindings: Dict[str, str] = {}
    for slot, term in enumerate(movables):
        free = [c for c in term_candidates(activity, taxonomy, scene, term)
                if c in scene.objects and c not in used and not scene.objects[c].fixed]
        if free:
            instance_id = free[int(rng.integers(len(free)))]
            obj = replace(scene.objects[instance_id], pose=_staging_pose(slot), room_id=None)
        else:
            synset = activity.synset_of(term)
            if library is None or synset not in library:
                raise MissingLibraryEntry(synset)
            entry = library[synset]
            instance_id = _spawn_id(entry.category, list(scene.objects) + list(scene.rooms))
            obj = SceneObject(instance_id, entry.category, _staging_pose(slot), entry.half_extents)
            logger.debug(f"Spawned {instance_id} for {term}")
        scene = scene.with_objects({instance_id: obj})
        staged.add(instance_id)
        used.add(instance_id)
        bindings[term] = instance_id

    scope = scope.merged(bindings)
    run = _PlacementRun(activity, scene, scope, staged, params, predicate_params, rng)
    for entry in ordered:
        if not isinstance(entry, Atom) or _is_inroom(entry):
            continue
        if entry.args[0] in bindings:
            run.place(entry)
        else:
            run.verify(entry)

    report = check_init(activity, scope, taxonomy, run.scene, predicate_params)
    if not report.satisfied:
        raise InitViolated(report.failed_leaves)
    logger.info(f"Sampled {activity.name}: {len(bindings)} objects placed")
    return SampledInstance(run.scene, scope, activity.name, params.seed)


# === pre-sampled instances ===

def load_scope_file(path: Union[str, Path]) -> GroundScope:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    if not isinstance(data, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in data.items()):
        raise FormatError(str(path), "scope must map term names to instance ids")
    return GroundScope(data)


def load_presampled(scene_source: Union[str, Path], scope_source: Union[str, Path], activity: Activity,
                    taxonomy: Optional[Taxonomy],
                    params: PredicateParams = DEFAULT_PARAMS, strict: bool = False) -> SampledInstance:
    """Load a pre-sampled scene and its bindings, re-checking the init conditions.

    In strict mode violated init leaves raise InitViolated; otherwise they are
    logged and carried in ``warnings``.
    """
    scene = load_scene_file(scene_source)
    scope = load_scope_file(scope_source)
    missing = [term for term in activity.terms if term not in scope]
    if missing:
        raise FormatError(str(scope_source), "unbound terms: " + ", ".join(missing))
    scope.validate(scene)

    report: GoalReport = check_init(activity, scope, taxonomy, scene, params)
    warnings: Tuple[str, ...] = ()
    if not report.satisfied:
        if strict:
            raise InitViolated(report.failed_leaves)
        warnings = tuple(f"init leaf violated: {leaf}" for leaf in report.failed_leaves)
        logger.warning(f"{activity.name}: pre-sampled instance has q_score {report.q_score:.3f}; "
                       f"violated: {', '.join(report.failed_leaves)}")
    else:
        logger.info(f"Loaded pre-sampled {activity.name} from {scene_source}")
    return SampledInstance(scene, scope, activity.name, None, warnings)
