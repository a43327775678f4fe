"""Collision checking: exact sphere-vs-primitive distance tests.

A configuration is free when it is inside the joint limits, no placed robot
sphere penetrates an obstacle (signed surface distance < 0; touching at
exactly 0 counts as free), and no checked sphere pair overlaps (center
distance strictly below the radius sum).  Sphere pairs on the same or
chain-adjacent links are never checked.

Colliding indices are reported in a fixed scan order: joint limits first
(lowest joint index), then world collisions sphere-major/obstacle-minor,
then self-collision pairs in lexicographic order.

Straight-line motions are validated at a fixed number of evenly spaced
interpolated configurations; this is discretized edge checking, not
continuous collision detection.

Everything here is a pure function over immutable inputs and safe to call
concurrently from any number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractViolation
from .robot import RobotModel, as_configuration, config_distance, sphere_centers_batch
from .world import BOX, CYLINDER, SPHERE, Obstacle, WorldModel

_MOTION_CHUNK = 64


class CollisionKind(Enum):
    FREE = "free"
    WORLD = "world_collision"
    SELF = "self_collision"
    LIMITS = "limits_violation"


@dataclass(frozen=True)
class CollisionResult:
    """Outcome of a single-configuration check.

    ``indices`` holds (sphere, obstacle) for world collisions,
    (sphere_a, sphere_b) for self-collisions, and (joint,) for limit
    violations; it is empty for free configurations.
    """

    kind: CollisionKind
    indices: tuple[int, ...] = ()

    @property
    def is_free(self) -> bool:
        return self.kind is CollisionKind.FREE

    @classmethod
    def free(cls) -> "CollisionResult":
        return _FREE

    @classmethod
    def world_collision(cls, sphere: int, obstacle: int) -> "CollisionResult":
        return cls(CollisionKind.WORLD, (sphere, obstacle))

    @classmethod
    def self_collision(cls, sphere_a: int, sphere_b: int) -> "CollisionResult":
        return cls(CollisionKind.SELF, (sphere_a, sphere_b))

    @classmethod
    def limits_violation(cls, joint: int) -> "CollisionResult":
        return cls(CollisionKind.LIMITS, (joint,))


_FREE = CollisionResult(CollisionKind.FREE)


def _point_box_distances(points: np.ndarray, pack) -> np.ndarray:
    """Signed point-to-surface distances to every box; points (..., 3)."""
    rel = points[..., None, :] - pack["center"]           # (..., B, 3)
    c, s = pack["cos"], pack["sin"]
    x = c * rel[..., 0] + s * rel[..., 1]                 # inverse-yaw rotation
    y = -s * rel[..., 0] + c * rel[..., 1]
    local = np.stack([x, y, rel[..., 2]], axis=-1)
    half = pack["half"]
    excess = np.abs(local) - half                         # per-axis signed excess
    outside = np.maximum(excess, 0.0)
    outside_d = np.sqrt(np.sum(outside * outside, axis=-1))
    inside_d = np.max(excess, axis=-1)                    # negative when inside
    return np.where(inside_d > 0.0, outside_d, inside_d)


def _point_cylinder_distances(points: np.ndarray, pack) -> np.ndarray:
    """Signed point-to-surface distances to every z-aligned capped cylinder."""
    rel = points[..., None, :] - pack["center"]
    dr = np.hypot(rel[..., 0], rel[..., 1]) - pack["radius"]
    dz = np.abs(rel[..., 2]) - pack["half_height"]
    outside_d = np.hypot(np.maximum(dr, 0.0), np.maximum(dz, 0.0))
    inside_d = np.maximum(dr, dz)
    return np.where((dr > 0.0) | (dz > 0.0), outside_d, inside_d)


def _point_sphere_distances(points: np.ndarray, pack) -> np.ndarray:
    rel = points[..., None, :] - pack["center"]
    return np.sqrt(np.sum(rel * rel, axis=-1)) - pack["radius"]


def _world_penetration_mask(world: WorldModel, centers: np.ndarray,
                            radii: np.ndarray) -> np.ndarray:
    """Boolean penetration mask (m, S, O), ordered by original obstacle index.

    Square-root free: penetration of a box or cylinder is equivalent to the
    squared clamped excess falling below the squared sphere radius (points
    inside clamp to zero excess).  Both check_config and free_mask share this
    kernel, so single- and batch-configuration decisions always agree bit for
    bit, including touching-is-free.
    """
    packs = world.packs
    m, ns = centers.shape[0], centers.shape[1]
    hit = np.zeros((m, ns, len(world.obstacles)), dtype=bool)
    r_sq = (radii * radii)[None, :, None]

    pack = packs[BOX]
    if len(pack["index"]):
        rel = centers[:, :, None, :] - pack["center"]
        c, s = pack["cos"], pack["sin"]
        half = pack["half"]
        ax = np.abs(c * rel[..., 0] + s * rel[..., 1]) - half[:, 0]
        ay = np.abs(-s * rel[..., 0] + c * rel[..., 1]) - half[:, 1]
        az = np.abs(rel[..., 2]) - half[:, 2]
        np.maximum(ax, 0.0, out=ax)
        np.maximum(ay, 0.0, out=ay)
        np.maximum(az, 0.0, out=az)
        hit[:, :, pack["index"]] = (ax * ax + ay * ay + az * az) < r_sq

    pack = packs[CYLINDER]
    if len(pack["index"]):
        rel = centers[:, :, None, :] - pack["center"]
        dr = np.hypot(rel[..., 0], rel[..., 1]) - pack["radius"]
        dz = np.abs(rel[..., 2]) - pack["half_height"]
        np.maximum(dr, 0.0, out=dr)
        np.maximum(dz, 0.0, out=dz)
        hit[:, :, pack["index"]] = (dr * dr + dz * dz) < r_sq

    pack = packs[SPHERE]
    if len(pack["index"]):
        rel = centers[:, :, None, :] - pack["center"]
        dist_sq = np.sum(rel * rel, axis=-1)
        reach = pack["radius"][None, None, :] + radii[None, :, None]
        hit[:, :, pack["index"]] = dist_sq < reach * reach
    return hit


def sphere_obstacle_distance(center, radius: float, obstacle: Obstacle) -> float:
    """Euclidean distance from a sphere's surface to an obstacle's surface.

    Negative exactly when the sphere penetrates the obstacle.
    """
    if not radius > 0:
        raise ContractViolation("sphere radius must be positive")
    point = np.asarray(center, dtype=float).reshape(1, 3)
    pack = WorldModel((obstacle,)).packs[obstacle.shape]
    if obstacle.shape == BOX:
        d = _point_box_distances(point, pack)
    elif obstacle.shape == CYLINDER:
        d = _point_cylinder_distances(point, pack)
    else:
        d = _point_sphere_distances(point, pack)
    return float(d[0, 0]) - radius


def free_mask(robot: RobotModel, world: WorldModel, configs: np.ndarray,
              stats: dict | None = None) -> np.ndarray:
    """Vectorized free/colliding decision for a batch of configurations (m, n)."""
    if stats is not None:
        stats["collision_checks"] = stats.get("collision_checks", 0) + configs.shape[0]
    ok = np.all((configs >= robot.lower) & (configs <= robot.upper), axis=1)
    if not robot.spheres:
        return ok
    centers = sphere_centers_batch(robot, configs)
    if world.obstacles:
        mask = _world_penetration_mask(world, centers, robot.sphere_radii)
        ok &= ~mask.any(axis=(1, 2))
    ok &= ~_self_overlap_mask(robot, centers).any(axis=1)
    return ok


def _self_overlap_mask(robot: RobotModel, centers: np.ndarray) -> np.ndarray:
    """Boolean overlap per checked sphere pair (m, P), lexicographic order."""
    pairs = robot.self_collision_pairs
    if not len(pairs):
        return np.zeros((centers.shape[0], 0), dtype=bool)
    diff = centers[:, pairs[:, 0]] - centers[:, pairs[:, 1]]
    dist_sq = np.sum(diff * diff, axis=-1)
    sums = robot.sphere_radii[pairs[:, 0]] + robot.sphere_radii[pairs[:, 1]]
    return dist_sq < sums * sums


def check_config(robot: RobotModel, world: WorldModel, q,
                 stats: dict | None = None) -> CollisionResult:
    """Classify one configuration: free, limits, world, or self collision."""
    q = as_configuration(robot, q)
    if stats is not None:
        stats["collision_checks"] = stats.get("collision_checks", 0) + 1
    below = q < robot.lower
    above = q > robot.upper
    if below.any() or above.any():
        return CollisionResult.limits_violation(int(np.argmax(below | above)))
    if not robot.spheres:
        return CollisionResult.free()
    centers = sphere_centers_batch(robot, q[None, :])
    if world.obstacles:
        hit = _world_penetration_mask(world, centers, robot.sphere_radii)[0]
        if hit.any():
            flat = int(np.argmax(hit.ravel()))
            n_obs = len(world.obstacles)
            return CollisionResult.world_collision(flat // n_obs, flat % n_obs)
    overlap = _self_overlap_mask(robot, centers)[0]
    if overlap.any():
        i, j = robot.self_collision_pairs[int(np.argmax(overlap))]
        return CollisionResult.self_collision(int(i), int(j))
    return CollisionResult.free()


def motion_configs(robot: RobotModel, a, b, step: float) -> np.ndarray:
    """Evenly spaced configurations along the segment, endpoints exact."""
    a = as_configuration(robot, a)
    b = as_configuration(robot, b)
    if not step > 0:
        raise ContractViolation("motion step must be positive")
    d = config_distance(robot, a, b)
    count = int(math.ceil(d / step)) + 1
    ts = np.linspace(0.0, 1.0, count)
    configs = a[None, :] + ts[:, None] * (b - a)[None, :]
    configs[0] = a
    configs[-1] = b
    return configs


def check_motion(robot: RobotModel, world: WorldModel, a, b, step: float,
                 stats: dict | None = None) -> bool:
    """True iff every sampled configuration along the segment is free.

    The segment is checked at ceil(d(a, b) / step) + 1 evenly spaced
    configurations including both endpoints, stopping at the first violation.
    """
    configs = motion_configs(robot, a, b, step)
    for lo in range(0, configs.shape[0], _MOTION_CHUNK):
        chunk = configs[lo : lo + _MOTION_CHUNK]
        if not free_mask(robot, world, chunk, stats=stats).all():
            return False
    return True
