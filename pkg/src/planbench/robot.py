"""Robot model: a serial kinematic chain carrying a sphere-set collision body.

A robot is an ordered chain of revolute and prismatic joints.  Each joint
contributes one configuration-space dimension bounded by a closed limit
interval; revolute joints are plain bounded intervals (no 2*pi wraparound).
Configurations are float64 numpy arrays of length ``robot.dof``.

Collision geometry is approximated by spheres, each rigidly attached to the
frame reached after applying the joint named by its ``link_index``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np
import yaml

from .errors import ContractViolation, ParseError, ValidationError

REVOLUTE = "revolute"
PRISMATIC = "prismatic"

_AXIS_NORM_TOL = 1e-9


def _vec3(value, what: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(f"{what} must be a 3-vector, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class JointSpec:
    """One degree of freedom: a fixed origin transform followed by axis motion.

    The origin transform is a translation plus a roll-pitch-yaw rotation in
    the parent frame; the joint then rotates about (revolute) or translates
    along (prismatic) ``axis`` by the joint value.  ``weight`` scales this
    joint's contribution to the configuration-space metric and ``resolution``
    is the lattice cell width used by search-based planning.
    """

    name: str
    kind: str
    axis: np.ndarray
    origin_translation: np.ndarray
    origin_rotation: np.ndarray  # roll-pitch-yaw, radians
    limits: tuple[float, float]
    resolution: float
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in (REVOLUTE, PRISMATIC):
            raise ValidationError(f"joint {self.name!r}: unknown kind {self.kind!r}")
        object.__setattr__(self, "axis", _vec3(self.axis, f"joint {self.name!r} axis"))
        object.__setattr__(
            self, "origin_translation",
            _vec3(self.origin_translation, f"joint {self.name!r} origin translation"))
        object.__setattr__(
            self, "origin_rotation",
            _vec3(self.origin_rotation, f"joint {self.name!r} origin rotation"))
        lo, hi = (float(self.limits[0]), float(self.limits[1]))
        object.__setattr__(self, "limits", (lo, hi))
        if not lo < hi:
            raise ValidationError(f"joint {self.name!r}: limits must satisfy lo < hi")
        if abs(float(np.linalg.norm(self.axis)) - 1.0) > _AXIS_NORM_TOL:
            raise ValidationError(f"joint {self.name!r}: axis must have unit norm")
        if not self.weight > 0:
            raise ValidationError(f"joint {self.name!r}: weight must be positive")
        if not 0 < self.resolution <= hi - lo:
            raise ValidationError(
                f"joint {self.name!r}: resolution must lie in (0, hi - lo]")


@dataclass(frozen=True)
class CollisionSphere:
    """A sphere rigidly attached to the frame after joint ``link_index``."""

    link_index: int
    local_center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(
            self, "local_center", _vec3(self.local_center, "sphere center"))
        if not self.radius > 0:
            raise ValidationError("sphere radius must be positive")


class PlacedSphere(NamedTuple):
    """A collision sphere expressed in the world frame."""

    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class RobotModel:
    """Serial chain plus collision spheres; immutable and safe to share."""

    joints: tuple[JointSpec, ...]
    spheres: tuple[CollisionSphere, ...] = ()
    self_collision_ignored: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "spheres", tuple(self.spheres))
        n = len(self.joints)
        if n < 1:
            raise ValidationError("robot requires at least one joint")
        for s in self.spheres:
            if not 0 <= s.link_index < n:
                raise ValidationError(
                    f"sphere link index {s.link_index} out of range for {n} joints")
        pairs = set()
        for pair in self.self_collision_ignored:
            i, j = int(pair[0]), int(pair[1])
            if not (0 <= i < len(self.spheres) and 0 <= j < len(self.spheres)):
                raise ValidationError(f"ignored pair {pair} references missing sphere")
            pairs.add((min(i, j), max(i, j)))
        object.__setattr__(self, "self_collision_ignored", frozenset(pairs))

    @property
    def dof(self) -> int:
        return len(self.joints)

    @cached_property
    def lower(self) -> np.ndarray:
        return _frozen(np.array([j.limits[0] for j in self.joints]))

    @cached_property
    def upper(self) -> np.ndarray:
        return _frozen(np.array([j.limits[1] for j in self.joints]))

    @cached_property
    def weights(self) -> np.ndarray:
        return _frozen(np.array([j.weight for j in self.joints]))

    @cached_property
    def resolutions(self) -> np.ndarray:
        return _frozen(np.array([j.resolution for j in self.joints]))

    @cached_property
    def _prismatic_mask(self) -> np.ndarray:
        return _frozen(np.array([j.kind == PRISMATIC for j in self.joints]))

    @cached_property
    def _origin_rotations(self) -> np.ndarray:
        return _frozen(np.stack([_rpy_matrix(j.origin_rotation) for j in self.joints]))

    @cached_property
    def _origin_translations(self) -> np.ndarray:
        return _frozen(np.stack([j.origin_translation for j in self.joints]))

    @cached_property
    def _axes(self) -> np.ndarray:
        return _frozen(np.stack([j.axis for j in self.joints]))

    @cached_property
    def _sphere_links(self) -> np.ndarray:
        return _frozen(np.array([s.link_index for s in self.spheres], dtype=int))

    @cached_property
    def _sphere_locals(self) -> np.ndarray:
        if not self.spheres:
            return _frozen(np.zeros((0, 3)))
        return _frozen(np.stack([s.local_center for s in self.spheres]))

    @cached_property
    def sphere_radii(self) -> np.ndarray:
        return _frozen(np.array([s.radius for s in self.spheres]))

    @cached_property
    def self_collision_pairs(self) -> np.ndarray:
        """Sphere index pairs checked for self-collision, in lexicographic order.

        Pairs on the same or chain-adjacent links are skipped: spheres
        straddling a joint overlap by construction.
        """
        pairs = []
        for i in range(len(self.spheres)):
            for j in range(i + 1, len(self.spheres)):
                if abs(self.spheres[i].link_index - self.spheres[j].link_index) <= 1:
                    continue
                if (i, j) in self.self_collision_ignored:
                    continue
                pairs.append((i, j))
        return _frozen(np.array(pairs, dtype=int).reshape(len(pairs), 2))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _rpy_matrix(rpy: np.ndarray) -> np.ndarray:
    """Rotation matrix for roll-pitch-yaw: Rz(yaw) @ Ry(pitch) @ Rx(roll)."""
    r, p, y = float(rpy[0]), float(rpy[1]), float(rpy[2])
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


def _axis_rotations(axis: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rodrigues rotation matrices (m, 3, 3) about a fixed unit axis."""
    kx, ky, kz = float(axis[0]), float(axis[1]), float(axis[2])
    k = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    k2 = k @ k
    s = np.sin(angles)[:, None, None]
    c = (1.0 - np.cos(angles))[:, None, None]
    return np.eye(3) + s * k + c * k2


def as_configuration(robot: RobotModel, q) -> np.ndarray:
    """Coerce to a float64 configuration array, enforcing the robot's DOF."""
    arr = np.asarray(q, dtype=float)
    if arr.shape != (robot.dof,):
        raise ContractViolation(
            f"configuration has shape {arr.shape}, expected ({robot.dof},)")
    return arr


def link_frames_batch(robot: RobotModel, configs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """World rotation (m, n, 3, 3) and translation (m, n, 3) of every link frame.

    Frame i is the composition of joints 0..i, each contributing its fixed
    origin transform followed by the joint motion.
    """
    m, n = configs.shape
    rot = np.broadcast_to(np.eye(3), (m, 3, 3)).copy()
    trans = np.zeros((m, 3))
    link_rot = np.empty((m, n, 3, 3))
    link_trans = np.empty((m, n, 3))
    for j in range(n):
        trans = trans + rot @ robot._origin_translations[j]
        rot = rot @ robot._origin_rotations[j]
        if robot._prismatic_mask[j]:
            trans = trans + (rot @ robot._axes[j]) * configs[:, j : j + 1]
        else:
            rot = rot @ _axis_rotations(robot._axes[j], configs[:, j])
        link_rot[:, j] = rot
        link_trans[:, j] = trans
    return link_rot, link_trans


def sphere_centers_batch(robot: RobotModel, configs: np.ndarray) -> np.ndarray:
    """World-frame collision sphere centers (m, S, 3) for a batch of configs."""
    if configs.ndim != 2 or configs.shape[1] != robot.dof:
        raise ContractViolation(
            f"config batch has shape {configs.shape}, expected (m, {robot.dof})")
    if not robot.spheres:
        return np.zeros((configs.shape[0], 0, 3))
    link_rot, link_trans = link_frames_batch(robot, configs)
    rot = link_rot[:, robot._sphere_links]      # (m, S, 3, 3)
    trans = link_trans[:, robot._sphere_links]  # (m, S, 3)
    return np.einsum("msij,sj->msi", rot, robot._sphere_locals) + trans


def forward_kinematics(robot: RobotModel, q) -> list[PlacedSphere]:
    """Place every collision sphere in the world frame for configuration q.

    Deterministic: identical inputs give bitwise-identical centers.
    """
    q = as_configuration(robot, q)
    centers = sphere_centers_batch(robot, q[None, :])[0]
    return [
        PlacedSphere(center=centers[i].copy(), radius=float(robot.sphere_radii[i]))
        for i in range(len(robot.spheres))
    ]


def config_distance(robot: RobotModel, a, b) -> float:
    """Weighted Euclidean metric sqrt(sum_i w_i * (a_i - b_i)^2)."""
    a = as_configuration(robot, a)
    b = as_configuration(robot, b)
    d = a - b
    return float(math.sqrt(float(np.dot(d * d, robot.weights))))


def interpolate(robot: RobotModel, a, b, t: float) -> np.ndarray:
    """Per-joint linear interpolation; exact at both endpoints."""
    a = as_configuration(robot, a)
    b = as_configuration(robot, b)
    if not 0.0 <= t <= 1.0:
        raise ContractViolation(f"interpolation parameter {t} outside [0, 1]")
    if t == 0.0:
        return a.copy()
    if t == 1.0:
        return b.copy()
    return a + t * (b - a)


def within_limits(robot: RobotModel, q) -> bool:
    """True iff every joint value lies in its closed limit interval."""
    q = as_configuration(robot, q)
    return bool(np.all(q >= robot.lower) and np.all(q <= robot.upper))


def sample_uniform(robot: RobotModel, rng: np.random.Generator) -> np.ndarray:
    """Draw each joint value independently uniform over its limits."""
    return rng.uniform(robot.lower, robot.upper)


_JOINT_KEYS = {"name", "type", "axis", "origin_xyz", "origin_rpy", "limits",
               "weight", "resolution"}
_SPHERE_KEYS = {"link", "center", "radius"}
_ROBOT_KEYS = {"joints", "collision_spheres", "self_collision_ignore"}


def parse_robot(text: str) -> RobotModel:
    """Parse a robot definition document (YAML subset, UTF-8).

    Top-level keys: ``joints``, ``collision_spheres``, ``self_collision_ignore``.
    Angles are radians, lengths meters.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ParseError(f"malformed robot document: {exc}", line=line) from exc
    if not isinstance(doc, dict):
        raise ValidationError("robot document must be a mapping")
    unknown = set(doc) - _ROBOT_KEYS
    if unknown:
        raise ValidationError(f"unknown robot keys: {sorted(unknown)}")
    raw_joints = doc.get("joints")
    if not raw_joints:
        raise ValidationError("robot document requires a non-empty 'joints' list")

    joints = []
    for entry in raw_joints:
        unknown = set(entry) - _JOINT_KEYS
        if unknown:
            raise ValidationError(f"unknown joint keys: {sorted(unknown)}")
        try:
            joints.append(JointSpec(
                name=str(entry["name"]),
                kind=str(entry["type"]),
                axis=entry["axis"],
                origin_translation=entry.get("origin_xyz", (0.0, 0.0, 0.0)),
                origin_rotation=entry.get("origin_rpy", (0.0, 0.0, 0.0)),
                limits=(entry["limits"][0], entry["limits"][1]),
                resolution=float(entry["resolution"]),
                weight=float(entry.get("weight", 1.0)),
            ))
        except KeyError as exc:
            raise ValidationError(f"joint entry missing key {exc}") from exc

    spheres = []
    for entry in doc.get("collision_spheres") or ():
        unknown = set(entry) - _SPHERE_KEYS
        if unknown:
            raise ValidationError(f"unknown sphere keys: {sorted(unknown)}")
        try:
            spheres.append(CollisionSphere(
                link_index=int(entry["link"]),
                local_center=entry["center"],
                radius=float(entry["radius"]),
            ))
        except KeyError as exc:
            raise ValidationError(f"sphere entry missing key {exc}") from exc

    ignored = frozenset(
        (int(pair[0]), int(pair[1])) for pair in doc.get("self_collision_ignore") or ())
    return RobotModel(joints=tuple(joints), spheres=tuple(spheres),
                      self_collision_ignored=ignored)


def load_robot(path: str | Path) -> RobotModel:
    """Load a robot definition file."""
    return parse_robot(Path(path).read_text(encoding="utf-8"))
