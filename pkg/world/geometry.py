"""Box geometry shared by the scene model, predicates and sampler.

Oriented boxes are approximated by their world axis-aligned bounding box.
All containment and overlap tests treat boundaries as inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

Vec3 = Tuple[float, float, float]
Quat = Tuple[float, float, float, float]
Point2 = Tuple[float, float]

QUAT_TOLERANCE = 1e-6
IDENTITY_QUAT: Quat = (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Pose:
    position: Vec3
    orientation: Quat = IDENTITY_QUAT

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        object.__setattr__(self, "orientation", tuple(float(v) for v in self.orientation))
        if len(self.position) != 3 or len(self.orientation) != 4:
            raise ValueError("pose needs a 3-vector position and a (w,x,y,z) quaternion")
        norm = math.sqrt(sum(v * v for v in self.orientation))
        if abs(norm - 1.0) > QUAT_TOLERANCE:
            raise ValueError(f"quaternion norm {norm:.9f} is not 1")


@dataclass(frozen=True)
class Aabb:
    min: Vec3
    max: Vec3

    def __post_init__(self) -> None:
        object.__setattr__(self, "min", tuple(float(v) for v in self.min))
        object.__setattr__(self, "max", tuple(float(v) for v in self.max))
        if any(lo > hi for lo, hi in zip(self.min, self.max)):
            raise ValueError(f"aabb min {self.min} exceeds max {self.max}")

    @classmethod
    def from_center(cls, center: Sequence[float], half_extents: Sequence[float]) -> "Aabb":
        c = np.asarray(center, dtype=float)
        h = np.asarray(half_extents, dtype=float)
        return cls(tuple(c - h), tuple(c + h))

    @property
    def center(self) -> Vec3:
        return tuple((lo + hi) / 2.0 for lo, hi in zip(self.min, self.max))

    @property
    def half_extents(self) -> Vec3:
        return tuple((hi - lo) / 2.0 for lo, hi in zip(self.min, self.max))

    @property
    def footprint_area(self) -> float:
        return (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.max, self.min)))

    @property
    def xy_diagonal(self) -> float:
        return math.hypot(self.max[0] - self.min[0], self.max[1] - self.min[1])


def quat_to_matrix(q: Sequence[float]) -> np.ndarray:
    """Rotation matrix of a unit (w, x, y, z) quaternion."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def yaw_quat(angle: float) -> Quat:
    """Quaternion for a rotation of ``angle`` radians about +z."""
    return (math.cos(angle / 2.0), 0.0, 0.0, math.sin(angle / 2.0))


def box_aabb(pose: Pose, half_extents: Sequence[float]) -> Aabb:
    """Tightest world AABB of a box: extent_i = sum_j |R_ij| * h_j about the position."""
    rotation = np.abs(quat_to_matrix(pose.orientation))
    extent = rotation @ np.asarray(half_extents, dtype=float)
    return Aabb.from_center(pose.position, extent)


def gap_distance(a: Aabb, b: Aabb) -> float:
    """Euclidean distance between the closest points of two boxes (0 when they touch)."""
    lo_a, hi_a = np.asarray(a.min), np.asarray(a.max)
    lo_b, hi_b = np.asarray(b.min), np.asarray(b.max)
    separation = np.maximum(0.0, np.maximum(lo_a - hi_b, lo_b - hi_a))
    return float(np.linalg.norm(separation))


def _overlap_lengths(a: Aabb, b: Aabb) -> np.ndarray:
    upper = np.minimum(a.max, b.max)
    lower = np.maximum(a.min, b.min)
    return np.maximum(0.0, upper - lower)


def horizontal_overlap_ratio(a: Aabb, b: Aabb) -> float:
    """Area of the xy-intersection of a and b over a's xy footprint."""
    area = a.footprint_area
    if area <= 0.0:
        raise ValueError("first box has no xy footprint")
    lengths = _overlap_lengths(a, b)
    return min(1.0, float(lengths[0] * lengths[1]) / area)


def intersection_volume(a: Aabb, b: Aabb) -> float:
    return float(np.prod(_overlap_lengths(a, b)))


def interpenetrates(a: Aabb, b: Aabb, tolerance: float = 1e-9) -> bool:
    """True when the boxes share a positive volume (face contact does not count)."""
    return bool(np.all(_overlap_lengths(a, b) > tolerance))


# === polygons ===

def signed_area(polygon: Sequence[Point2]) -> float:
    total = 0.0
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2.0


def _orientation(p: Point2, q: Point2, r: Point2) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p: Point2, a: Point2, b: Point2, eps: float = 1e-12) -> bool:
    if abs(_orientation(a, b, p)) > eps * max(1.0, math.dist(a, b)):
        return False
    return (min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps)


def _segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool:
    d1 = _orientation(q1, q2, p1)
    d2 = _orientation(q1, q2, p2)
    d3 = _orientation(p1, p2, q1)
    d4 = _orientation(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    return (_on_segment(p1, q1, q2) or _on_segment(p2, q1, q2)
            or _on_segment(q1, p1, p2) or _on_segment(q2, p1, p2))


def is_simple_polygon(polygon: Sequence[Point2]) -> bool:
    """No two non-adjacent edges meet."""
    n = len(polygon)
    if n < 3:
        return False
    edges = [(polygon[i], polygon[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def point_in_polygon(point: Sequence[float], polygon: Sequence[Point2]) -> bool:
    """Even-odd containment; points on the boundary count as inside."""
    px, py = float(point[0]), float(point[1])
    n = len(polygon)
    for i in range(n):
        if _on_segment((px, py), polygon[i], polygon[(i + 1) % n]):
            return True

    inside = False
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside
