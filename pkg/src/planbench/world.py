"""Obstacle region, scenario files, and shelf-style scenario variations.

The world is a finite set of primitive obstacles (boxes, cylinders, spheres)
whose only orientation freedom is a yaw about the world z axis.  Scenario
documents bundle a robot file reference, start configuration, goal, world,
and planning time budget; ``generate_variations`` reproduces the three
shelf-variation families (object jitter, plus shelf height, plus shelf
rotation about the robot base vertical).

All types are immutable after construction and safe to share across
concurrent queries; generation is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np
import yaml

from .errors import ContractViolation, ParseError, ValidationError
from .robot import RobotModel, load_robot

BOX = "box"
CYLINDER = "cylinder"
SPHERE = "sphere"

OBJECTS_ONLY = "objects_only"
PLUS_HEIGHT = "plus_height"
PLUS_ROTATION = "plus_rotation"
FAMILIES = (OBJECTS_ONLY, PLUS_HEIGHT, PLUS_ROTATION)


def _vec(value, length, what):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (length,):
        raise ValidationError(f"{what} must have length {length}, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Obstacle:
    """One primitive obstacle: box, cylinder (z-aligned), or sphere."""

    shape: str
    center: np.ndarray
    yaw: float = 0.0
    half_extents: np.ndarray | None = None
    radius: float | None = None
    half_height: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, 3, "obstacle center"))
        object.__setattr__(self, "yaw", float(self.yaw))
        if self.shape == BOX:
            if self.half_extents is None or self.radius is not None or self.half_height is not None:
                raise ValidationError("box requires exactly 'half_extents'")
            he = _vec(self.half_extents, 3, "box half_extents")
            if not np.all(he > 0):
                raise ValidationError("box half_extents must be positive")
            object.__setattr__(self, "half_extents", he)
        elif self.shape == CYLINDER:
            if self.radius is None or self.half_height is None or self.half_extents is not None:
                raise ValidationError("cylinder requires 'radius' and 'half_height'")
            if not (self.radius > 0 and self.half_height > 0):
                raise ValidationError("cylinder sizes must be positive")
            object.__setattr__(self, "radius", float(self.radius))
            object.__setattr__(self, "half_height", float(self.half_height))
        elif self.shape == SPHERE:
            if self.radius is None or self.half_extents is not None or self.half_height is not None:
                raise ValidationError("sphere requires exactly 'radius'")
            if not self.radius > 0:
                raise ValidationError("sphere radius must be positive")
            object.__setattr__(self, "radius", float(self.radius))
            if self.yaw != 0.0:
                raise ValidationError("sphere orientation is the identity; yaw must be 0")
        else:
            raise ValidationError(f"unknown obstacle shape {self.shape!r}")

    @classmethod
    def box(cls, center, half_extents, yaw=0.0):
        return cls(shape=BOX, center=center, yaw=yaw, half_extents=half_extents)

    @classmethod
    def cylinder(cls, center, radius, half_height, yaw=0.0):
        return cls(shape=CYLINDER, center=center, yaw=yaw, radius=radius,
                   half_height=half_height)

    @classmethod
    def sphere(cls, center, radius):
        return cls(shape=SPHERE, center=center, radius=radius)

    def __eq__(self, other):
        if not isinstance(other, Obstacle):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.center, other.center)
                and self.yaw == other.yaw
                and _opt_eq(self.half_extents, other.half_extents)
                and self.radius == other.radius
                and self.half_height == other.half_height)


def _opt_eq(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


@dataclass(frozen=True, eq=False)
class WorldModel:
    """The obstacle region: a finite, possibly empty set of obstacles."""

    obstacles: tuple[Obstacle, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    def __eq__(self, other):
        if not isinstance(other, WorldModel):
            return NotImplemented
        return self.obstacles == other.obstacles

    @cached_property
    def packs(self):
        """Per-shape arrays consumed by the vectorized collision kernel."""
        groups = {}
        for shape in (BOX, CYLINDER, SPHERE):
            idx = [i for i, o in enumerate(self.obstacles) if o.shape == shape]
            obs = [self.obstacles[i] for i in idx]
            if shape == BOX:
                groups[shape] = {
                    "index": np.array(idx, dtype=int),
                    "center": np.array([o.center for o in obs]).reshape(len(obs), 3),
                    "cos": np.array([math.cos(o.yaw) for o in obs]),
                    "sin": np.array([math.sin(o.yaw) for o in obs]),
                    "half": np.array([o.half_extents for o in obs]).reshape(len(obs), 3),
                }
            elif shape == CYLINDER:
                groups[shape] = {
                    "index": np.array(idx, dtype=int),
                    "center": np.array([o.center for o in obs]).reshape(len(obs), 3),
                    "radius": np.array([o.radius for o in obs]),
                    "half_height": np.array([o.half_height for o in obs]),
                }
            else:
                groups[shape] = {
                    "index": np.array(idx, dtype=int),
                    "center": np.array([o.center for o in obs]).reshape(len(obs), 3),
                    "radius": np.array([o.radius for o in obs]),
                }
        return groups


@dataclass(frozen=True, eq=False)
class GoalSpec:
    """Goal region: a target configuration with tolerances, or an axis box.

    A ``tolerance`` of None means "unspecified"; consumers substitute the
    configured default (zero unless a params file says otherwise).
    """

    kind: str  # "config" | "region"
    target: np.ndarray | None = None
    tolerance: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "config":
            if self.target is None:
                raise ValidationError("config goal requires a target")
            n = len(self.target)
            object.__setattr__(self, "target", _vec(self.target, n, "goal target"))
            if self.tolerance is not None:
                tol = _vec(self.tolerance, n, "goal tolerance")
                if not np.all(tol >= 0):
                    raise ValidationError("goal tolerance entries must be >= 0")
                object.__setattr__(self, "tolerance", tol)
        elif self.kind == "region":
            if self.lower is None or self.upper is None:
                raise ValidationError("region goal requires lower and upper")
            n = len(self.lower)
            lower = _vec(self.lower, n, "region lower")
            upper = _vec(self.upper, n, "region upper")
            if not np.all(lower <= upper):
                raise ValidationError("region lower must be <= upper component-wise")
            object.__setattr__(self, "lower", lower)
            object.__setattr__(self, "upper", upper)
        else:
            raise ValidationError(f"unknown goal kind {self.kind!r}")

    @classmethod
    def config_goal(cls, target, tolerance=None):
        return cls(kind="config", target=target, tolerance=tolerance)

    @classmethod
    def region_goal(cls, lower, upper):
        return cls(kind="region", lower=lower, upper=upper)

    @property
    def dof(self) -> int:
        return len(self.target) if self.kind == "config" else len(self.lower)

    def __eq__(self, other):
        if not isinstance(other, GoalSpec):
            return NotImplemented
        return (self.kind == other.kind
                and _opt_eq(self.target, other.target)
                and _opt_eq(self.tolerance, other.tolerance)
                and _opt_eq(self.lower, other.lower)
                and _opt_eq(self.upper, other.upper))


@dataclass(frozen=True)
class VariationSpec:
    """Declared perturbation ranges and the shelf/object position convention.

    Obstacles are tagged by list position: ``shelf_indices`` move as one rigid
    group for height/rotation, ``object_indices`` additionally jitter in xy.
    When a scenario file omits the block entirely, every obstacle is treated
    as a movable object.
    """

    object_jitter_xy: float = 0.1
    height_range: float = 0.15
    yaw_range_deg: float = 30.0
    shelf_indices: tuple[int, ...] = ()
    object_indices: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "shelf_indices", tuple(int(i) for i in self.shelf_indices))
        object.__setattr__(self, "object_indices", tuple(int(i) for i in self.object_indices))
        for value, name in ((self.object_jitter_xy, "object_jitter_xy"),
                            (self.height_range, "height_range"),
                            (self.yaw_range_deg, "yaw_range_deg")):
            if value < 0:
                raise ValidationError(f"variation {name} must be >= 0")


@dataclass(frozen=True, eq=False)
class Scenario:
    """One planning problem instance plus its declared variation ranges."""

    name: str
    robot_file: str
    robot: RobotModel
    start: np.ndarray
    goal: GoalSpec
    world: WorldModel
    time_budget: float
    variation: VariationSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", _vec(self.start, len(self.start), "start"))
        if len(self.start) != self.robot.dof:
            raise ValidationError(
                f"start has {len(self.start)} values, robot has {self.robot.dof} joints")
        if self.goal.dof != self.robot.dof:
            raise ValidationError("goal dimension does not match robot DOF")
        if not self.time_budget > 0:
            raise ValidationError("time budget must be positive")

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (self.name == other.name
                and self.robot_file == other.robot_file
                and np.array_equal(self.start, other.start)
                and self.goal == other.goal
                and self.world == other.world
                and self.time_budget == other.time_budget
                and self.variation == other.variation)


_SCENARIO_KEYS = {"name", "robot", "start", "goal", "world", "time_budget_s", "variation"}
_VARIATION_KEYS = {"object_jitter_xy", "height_range", "yaw_range_deg",
                   "shelf_indices", "object_indices"}
_OBSTACLE_COMMON = {"shape", "center", "yaw"}
_OBSTACLE_SIZE = {BOX: {"half_extents"}, CYLINDER: {"radius", "half_height"},
                  SPHERE: {"radius"}}


def _parse_obstacle(entry) -> Obstacle:
    if not isinstance(entry, dict) or "shape" not in entry:
        raise ValidationError(f"obstacle entry must be a mapping with 'shape': {entry!r}")
    shape = entry["shape"]
    if shape not in _OBSTACLE_SIZE:
        raise ValidationError(f"unknown obstacle shape {shape!r}")
    allowed = _OBSTACLE_COMMON | _OBSTACLE_SIZE[shape]
    unknown = set(entry) - allowed
    if unknown:
        raise ValidationError(f"unknown {shape} obstacle keys: {sorted(unknown)}")
    if "center" not in entry:
        raise ValidationError(f"{shape} obstacle requires 'center'")
    kwargs = {"shape": shape, "center": entry["center"], "yaw": float(entry.get("yaw", 0.0))}
    if shape == BOX:
        if "half_extents" not in entry:
            raise ValidationError("box obstacle requires 'half_extents'")
        kwargs["half_extents"] = entry["half_extents"]
    elif shape == CYLINDER:
        if "radius" not in entry or "half_height" not in entry:
            raise ValidationError("cylinder obstacle requires 'radius' and 'half_height'")
        kwargs["radius"] = entry["radius"]
        kwargs["half_height"] = entry["half_height"]
    else:
        if "radius" not in entry:
            raise ValidationError("sphere obstacle requires 'radius'")
        kwargs["radius"] = entry["radius"]
    return Obstacle(**kwargs)


def parse_scenario(text: str, base_dir: str | Path | None = None) -> Scenario:
    """Parse and fully validate a scenario document.

    The referenced robot file is loaded (relative paths resolve against
    ``base_dir``) so dimensional consistency can be checked here rather than
    at planning time.  ``serialize_scenario`` round-trips through this parser
    with field equality.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ParseError(f"malformed scenario document: {exc}", line=line) from exc
    if not isinstance(doc, dict):
        raise ValidationError("scenario document must be a mapping")
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
    for key in ("name", "robot", "start", "goal", "world", "time_budget_s"):
        if key not in doc:
            raise ValidationError(f"scenario missing required key {key!r}")

    robot_file = str(doc["robot"])
    robot_path = Path(robot_file)
    if not robot_path.is_absolute() and base_dir is not None:
        robot_path = Path(base_dir) / robot_path
    try:
        robot = load_robot(robot_path)
    except OSError as exc:
        raise ValidationError(f"cannot read robot file {robot_path}: {exc}") from exc

    goal_doc = doc["goal"]
    if not isinstance(goal_doc, dict) or "type" not in goal_doc:
        raise ValidationError("goal must be a mapping with a 'type' key")
    if goal_doc["type"] == "config":
        unknown = set(goal_doc) - {"type", "target", "tolerance"}
        if unknown:
            raise ValidationError(f"unknown config goal keys: {sorted(unknown)}")
        goal = GoalSpec.config_goal(goal_doc["target"], goal_doc.get("tolerance"))
    elif goal_doc["type"] == "region":
        unknown = set(goal_doc) - {"type", "lower", "upper"}
        if unknown:
            raise ValidationError(f"unknown region goal keys: {sorted(unknown)}")
        goal = GoalSpec.region_goal(goal_doc["lower"], goal_doc["upper"])
        # The region must intersect the joint limits to be reachable at all.
        lo = np.maximum(goal.lower, robot.lower)
        hi = np.minimum(goal.upper, robot.upper)
        if not np.all(lo <= hi):
            raise ValidationError("region goal does not intersect the joint limits")
    else:
        raise ValidationError(f"unknown goal type {goal_doc['type']!r}")
    if goal.dof != robot.dof:
        raise ValidationError("goal dimension does not match robot DOF")

    world_doc = doc["world"]
    if not isinstance(world_doc, dict) or set(world_doc) - {"obstacles"}:
        raise ValidationError("world must be a mapping with only an 'obstacles' key")
    obstacles = tuple(_parse_obstacle(e) for e in world_doc.get("obstacles") or ())

    variation = None
    if doc.get("variation") is not None:
        vdoc = doc["variation"]
        unknown = set(vdoc) - _VARIATION_KEYS
        if unknown:
            raise ValidationError(f"unknown variation keys: {sorted(unknown)}")
        variation = VariationSpec(
            object_jitter_xy=float(vdoc.get("object_jitter_xy", 0.1)),
            height_range=float(vdoc.get("height_range", 0.15)),
            yaw_range_deg=float(vdoc.get("yaw_range_deg", 30.0)),
            shelf_indices=vdoc.get("shelf_indices", ()),
            object_indices=vdoc.get("object_indices", ()),
        )
        for idx in variation.shelf_indices + variation.object_indices:
            if not 0 <= idx < len(obstacles):
                raise ValidationError(f"variation index {idx} out of obstacle range")

    return Scenario(
        name=str(doc["name"]),
        robot_file=robot_file,
        robot=robot,
        start=doc["start"],
        goal=goal,
        world=WorldModel(obstacles),
        time_budget=float(doc["time_budget_s"]),
        variation=variation,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario file; relative robot paths resolve against its directory."""
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)


def _obstacle_doc(o: Obstacle) -> dict:
    doc = {"shape": o.shape, "center": [float(v) for v in o.center]}
    if o.shape != SPHERE:
        doc["yaw"] = float(o.yaw)
    if o.shape == BOX:
        doc["half_extents"] = [float(v) for v in o.half_extents]
    elif o.shape == CYLINDER:
        doc["radius"] = float(o.radius)
        doc["half_height"] = float(o.half_height)
    else:
        doc["radius"] = float(o.radius)
    return doc


def serialize_scenario(scenario: Scenario) -> str:
    """Render a scenario as a document that parses back field-equal."""
    goal: dict = {"type": scenario.goal.kind}
    if scenario.goal.kind == "config":
        goal["target"] = [float(v) for v in scenario.goal.target]
        if scenario.goal.tolerance is not None:
            goal["tolerance"] = [float(v) for v in scenario.goal.tolerance]
    else:
        goal["lower"] = [float(v) for v in scenario.goal.lower]
        goal["upper"] = [float(v) for v in scenario.goal.upper]
    doc = {
        "name": scenario.name,
        "robot": scenario.robot_file,
        "start": [float(v) for v in scenario.start],
        "goal": goal,
        "world": {"obstacles": [_obstacle_doc(o) for o in scenario.world.obstacles]},
        "time_budget_s": float(scenario.time_budget),
    }
    if scenario.variation is not None:
        v = scenario.variation
        doc["variation"] = {
            "object_jitter_xy": float(v.object_jitter_xy),
            "height_range": float(v.height_range),
            "yaw_range_deg": float(v.yaw_range_deg),
            "shelf_indices": list(v.shelf_indices),
            "object_indices": list(v.object_indices),
        }
    return yaml.safe_dump(doc, sort_keys=False)


def _rotated(center: np.ndarray, yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    x, y, z = center
    return np.array([c * x - s * y, s * x + c * y, z])


def generate_variations(base: Scenario, family: str, count: int, seed: int) -> list[Scenario]:
    """Generate ``count`` perturbed copies of a scenario, deterministically.

    ``objects_only`` jitters movable-object centers in xy; ``plus_height``
    additionally shifts shelf and contents by one shared z offset;
    ``plus_rotation`` additionally rotates shelf and contents about the robot
    base z axis.  Draws for variation i come from a stream keyed on
    (seed, i), so the shared perturbations agree across families.
    """
    if family not in FAMILIES:
        raise ContractViolation(f"unknown variation family {family!r}")
    if count < 1:
        raise ContractViolation("variation count must be >= 1")
    var = base.variation or VariationSpec(
        object_indices=tuple(range(len(base.world.obstacles))))
    moved = var.shelf_indices + var.object_indices

    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        obstacles = list(base.world.obstacles)
        for idx in var.object_indices:
            jitter = rng.uniform(-var.object_jitter_xy, var.object_jitter_xy, size=2)
            o = obstacles[idx]
            obstacles[idx] = replace(o, center=o.center + np.array([jitter[0], jitter[1], 0.0]))
        if family in (PLUS_HEIGHT, PLUS_ROTATION):
            dz = rng.uniform(-var.height_range, var.height_range)
            for idx in moved:
                o = obstacles[idx]
                obstacles[idx] = replace(o, center=o.center + np.array([0.0, 0.0, dz]))
        if family == PLUS_ROTATION:
            dyaw = rng.uniform(-math.radians(var.yaw_range_deg),
                               math.radians(var.yaw_range_deg))
            for idx in moved:
                o = obstacles[idx]
                new_yaw = o.yaw + dyaw if o.shape != SPHERE else 0.0
                obstacles[idx] = replace(o, center=_rotated(o.center, dyaw), yaw=new_yaw)
        out.append(replace(base, world=WorldModel(tuple(obstacles))))
    return out
