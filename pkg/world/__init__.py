# Kinematic world model: box geometry, scene snapshots, synset taxonomy

from .geometry import (
    Aabb,
    Pose,
    box_aabb,
    gap_distance,
    horizontal_overlap_ratio,
    intersection_volume,
    point_in_polygon,
    quat_to_matrix,
    yaw_quat,
)
from .scene import (
    InvariantViolation,
    Room,
    SceneObject,
    SceneState,
    TrajectoryFrame,
    UnknownObject,
    apply_frame,
    dump_scene,
    iter_trajectory,
    load_scene,
    load_scene_file,
    replay_snapshots,
    scene_digest,
    world_aabb,
)
from .taxonomy import (
    FLOOR_SYNSET,
    CycleDetected,
    DanglingReference,
    GroundScope,
    Taxonomy,
    UnknownSynset,
    Unsatisfiable,
    build_taxonomy,
    candidate_instances,
    ground_terms,
    is_a,
    load_taxonomy,
    load_taxonomy_file,
    resolve_candidates,
)

__all__ = [
    'Aabb',
    'Pose',
    'box_aabb',
    'gap_distance',
    'horizontal_overlap_ratio',
    'intersection_volume',
    'point_in_polygon',
    'quat_to_matrix',
    'yaw_quat',
    'InvariantViolation',
    'Room',
    'SceneObject',
    'SceneState',
    'TrajectoryFrame',
    'UnknownObject',
    'apply_frame',
    'dump_scene',
    'iter_trajectory',
    'load_scene',
    'load_scene_file',
    'replay_snapshots',
    'scene_digest',
    'world_aabb',
    'FLOOR_SYNSET',
    'CycleDetected',
    'DanglingReference',
    'GroundScope',
    'Taxonomy',
    'UnknownSynset',
    'Unsatisfiable',
    'build_taxonomy',
    'candidate_instances',
    'ground_terms',
    'is_a',
    'load_taxonomy',
    'load_taxonomy_file',
    'resolve_candidates',
]
