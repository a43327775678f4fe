"""Shared planner elements: query, path, result, graph, and validation.

Both planners consume a ``Query`` and produce a ``PlannerResult`` whose
``planning_time`` never exceeds the budget by more than the 0.05 s grace
period (the clock is polled at loop boundaries, not preemptively).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .collision import check_config, check_motion
from .errors import ValidationError
from .robot import RobotModel, config_distance
from .world import GoalSpec, Scenario, WorldModel

BUDGET_GRACE = 0.05  # seconds

OK = "ok"
START_IN_COLLISION = "start_in_collision"
GOAL_IN_COLLISION = "goal_in_collision"

SOLVED = "solved"
FAILURE_TIMEOUT = "failure_timeout"
UNSOLVABLE = "unsolvable"

FORWARD = "forward"
BACKWARD = "backward"

_REGION_VALIDATION_SAMPLES = 32


@dataclass(frozen=True)
class Query:
    """The planning problem: start configuration, goal region, time budget."""

    start: np.ndarray
    goal: GoalSpec
    time_budget: float

    def __post_init__(self):
        start = np.asarray(self.start, dtype=float).copy()
        start.flags.writeable = False
        object.__setattr__(self, "start", start)
        if not self.time_budget > 0:
            raise ValidationError("time budget must be positive")


@dataclass(frozen=True)
class Path:
    """A polyline in configuration space; validity holds at the producing
    planner's edge step, not continuously."""

    waypoints: np.ndarray  # (k, n)

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=float)
        if wp.ndim != 2 or wp.shape[0] < 1:
            raise ValidationError("path requires a (k >= 1, n) waypoint array")
        wp = wp.copy()
        wp.flags.writeable = False
        object.__setattr__(self, "waypoints", wp)

    def __len__(self) -> int:
        return self.waypoints.shape[0]

    @property
    def first(self) -> np.ndarray:
        return self.waypoints[0]

    @property
    def last(self) -> np.ndarray:
        return self.waypoints[-1]


@dataclass(frozen=True)
class PlannerResult:
    """Outcome of one planning attempt plus timing and counter statistics."""

    status: str
    planning_time: float
    stats: dict = field(default_factory=dict)
    path: Path | None = None
    direction: str | None = None  # solved results only
    reason: str | None = None     # unsolvable results only

    @classmethod
    def solved(cls, path: Path, direction: str, planning_time: float, stats: dict):
        return cls(status=SOLVED, planning_time=planning_time, stats=stats,
                   path=path, direction=direction)

    @classmethod
    def timeout(cls, planning_time: float, stats: dict):
        return cls(status=FAILURE_TIMEOUT, planning_time=planning_time, stats=stats)

    @classmethod
    def unsolvable(cls, reason: str, planning_time: float, stats: dict):
        return cls(status=UNSOLVABLE, planning_time=planning_time, stats=stats,
                   reason=reason)


def goal_satisfied(goal: GoalSpec, q) -> bool:
    """Closed-region membership test for both goal kinds."""
    q = np.asarray(q, dtype=float)
    if goal.kind == "config":
        tol = goal.tolerance if goal.tolerance is not None else 0.0
        return bool(np.all(np.abs(q - goal.target) <= tol))
    return bool(np.all(q >= goal.lower) and np.all(q <= goal.upper))


def region_samples(robot: RobotModel, goal: GoalSpec, seed: int,
                   count: int = _REGION_VALIDATION_SAMPLES) -> np.ndarray:
    """Region center plus seeded uniform samples, clipped to joint limits."""
    lo = np.maximum(goal.lower, robot.lower)
    hi = np.minimum(goal.upper, robot.upper)
    rng = np.random.default_rng(seed)
    center = (lo + hi) / 2.0
    samples = rng.uniform(lo, hi, size=(count, robot.dof))
    return np.vstack([center[None, :], samples])


def validate_query(robot: RobotModel, world: WorldModel, query: Query,
                   seed: int = 0) -> str:
    """Detect queries that are unsolvable because an endpoint collides.

    Config goals check the target itself; region goals check the region
    center plus 32 seeded uniform samples and report a collision only when
    every representative collides.
    """
    if not check_config(robot, world, query.start).is_free:
        return START_IN_COLLISION
    if query.goal.kind == "config":
        if not check_config(robot, world, query.goal.target).is_free:
            return GOAL_IN_COLLISION
    else:
        for q in region_samples(robot, query.goal, seed):
            if check_config(robot, world, q).is_free:
                return OK
        return GOAL_IN_COLLISION
    return OK


def path_cost(robot: RobotModel, path: Path) -> float:
    """Sum of consecutive waypoint distances; a single waypoint costs 0."""
    total = 0.0
    wp = path.waypoints
    for k in range(len(wp) - 1):
        total += config_distance(robot, wp[k], wp[k + 1])
    return total


def validate_path(robot: RobotModel, world: WorldModel, query: Query,
                  path: Path, step: float) -> bool:
    """True iff the path starts exactly at the query start, ends inside the
    goal, and every segment passes discretized collision checking."""
    wp = path.waypoints
    if not np.array_equal(wp[0], query.start):
        return False
    if not goal_satisfied(query.goal, wp[-1]):
        return False
    for k in range(len(wp) - 1):
        if not check_motion(robot, world, wp[k], wp[k + 1], step):
            return False
    return True


@dataclass(frozen=True)
class SearchGraph:
    """Explicit graph of configurations produced by a planner run."""

    nodes: tuple[np.ndarray, ...]
    edges: tuple[tuple[int, int, float], ...]

    def validate(self, robot: RobotModel) -> None:
        """Raise unless indices are in range, no edge is a self-loop, and
        every edge cost equals the configuration distance within 1e-9."""
        n = len(self.nodes)
        for parent, child, cost in self.edges:
            if not (0 <= parent < n and 0 <= child < n):
                raise ValidationError(f"edge ({parent}, {child}) out of range")
            if parent == child:
                raise ValidationError(f"self-loop at node {parent}")
            expected = config_distance(robot, self.nodes[parent], self.nodes[child])
            if abs(cost - expected) > 1e-9:
                raise ValidationError(
                    f"edge ({parent}, {child}) cost {cost} != distance {expected}")
            if cost < 0:
                raise ValidationError("edge costs must be nonnegative")


def query_from_scenario(scenario: Scenario, goal_tolerance_default: float = 0.0) -> Query:
    """Build the planning query, filling in unspecified config-goal tolerances."""
    goal = scenario.goal
    if goal.kind == "config" and goal.tolerance is None and goal_tolerance_default > 0:
        tol = np.full(scenario.robot.dof, float(goal_tolerance_default))
        goal = GoalSpec.config_goal(goal.target, tol)
    return Query(start=scenario.start, goal=goal, time_budget=scenario.time_budget)
