"""RRT-Connect: two trees grown from start and goal with uniform sampling.

Each iteration samples the configuration space uniformly, extends one tree
toward the sample by at most ``step_eta`` (weighted distance), then greedily
connects the other tree toward the freshly added node; tree roles swap every
iteration.  Solutions are reported with direction "forward" always: the
bidirectional growth is internal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .collision import check_config, check_motion
from .core import (FORWARD, GOAL_IN_COLLISION, OK, PlannerResult, Path,
                   Query, goal_satisfied, validate_query)
from .errors import ContractViolation, ValidationError
from .robot import RobotModel, as_configuration, config_distance, sample_uniform
from .world import GoalSpec, WorldModel

REACHED = "reached"
ADVANCED = "advanced"
TRAPPED = "trapped"

START_TREE = "start_tree"
GOAL_TREE = "goal_tree"

_ZERO_DISTANCE = 1e-12
_GOAL_SAMPLE_ATTEMPTS = 32


@dataclass(frozen=True)
class RrtParams:
    """Tuning knobs; defaults are desk-scale, reported in benchmark output."""

    step_eta: float = 0.5
    edge_step: float = 0.05
    max_iterations: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not self.edge_step > 0:
            raise ValidationError("edge_step must be positive")
        if self.step_eta < self.edge_step:
            raise ValidationError("step_eta must be >= edge_step")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValidationError("max_iterations must be a positive integer")


class Tree:
    """A rooted tree of configurations backed by growable numpy buffers.

    Node 0 is the root and is its own parent.  Every non-root edge was
    validated by ``check_motion`` at insertion time.
    """

    def __init__(self, robot: RobotModel, root, root_kind: str):
        if root_kind not in (START_TREE, GOAL_TREE):
            raise ValidationError(f"unknown tree kind {root_kind!r}")
        self.robot = robot
        self.root_kind = root_kind
        self._capacity = 64
        self._configs = np.empty((self._capacity, robot.dof))
        self._parents = np.empty(self._capacity, dtype=np.int64)
        self.size = 0
        self.add(as_configuration(robot, root), parent=0)

    @property
    def nodes(self) -> np.ndarray:
        return self._configs[: self.size]

    @property
    def parents(self) -> np.ndarray:
        return self._parents[: self.size]

    def config(self, index: int) -> np.ndarray:
        return self._configs[index].copy()

    def add(self, q: np.ndarray, parent: int) -> int:
        if self.size == self._capacity:
            self._capacity *= 2
            self._configs = np.vstack(
                [self._configs, np.empty_like(self._configs)])
            self._parents = np.concatenate(
                [self._parents, np.empty_like(self._parents)])
        index = self.size
        self._configs[index] = q
        self._parents[index] = parent
        self.size += 1
        return index

    def branch(self, index: int) -> list[int]:
        """Node indices from the root to ``index`` inclusive."""
        chain = [index]
        while self._parents[chain[-1]] != chain[-1]:
            chain.append(int(self._parents[chain[-1]]))
        chain.reverse()
        return chain


def nearest(tree: Tree, q) -> int:
    """Index of the tree node closest to q in the weighted metric.

    Implemented as an exact linear scan; ties break to the lowest index.
    """
    if tree.size < 1:
        raise ContractViolation("nearest requires a non-empty tree")
    q = as_configuration(tree.robot, q)
    diff = tree.nodes - q
    return int(np.argmin(np.sum(diff * diff * tree.robot.weights, axis=1)))


def extend(tree: Tree, target, params: RrtParams, robot: RobotModel,
           world: WorldModel, stats: dict | None = None) -> tuple[str, int | None]:
    """One bounded step of the nearest node toward ``target``.

    Returns (REACHED, node) when the target itself was added (or already
    present), (ADVANCED, node) for a clamped step of length step_eta, and
    (TRAPPED, None) when the motion is blocked; trapped leaves the tree
    unchanged.
    """
    target = as_configuration(robot, target)
    near_index = nearest(tree, target)
    near = tree.config(near_index)
    d = config_distance(robot, near, target)
    if d <= _ZERO_DISTANCE:
        return REACHED, near_index  # degenerate: do not duplicate the node
    if d <= params.step_eta:
        q_new, reached = target, True
    else:
        q_new = near + (params.step_eta / d) * (target - near)
        reached = False
    if not check_motion(robot, world, near, q_new, params.edge_step, stats=stats):
        return TRAPPED, None
    index = tree.add(q_new, near_index)
    return (REACHED if reached else ADVANCED), index


def connect(tree: Tree, target, params: RrtParams, robot: RobotModel,
            world: WorldModel, stats: dict | None = None,
            deadline: float | None = None) -> tuple[str, int | None]:
    """Repeatedly extend toward a fixed target until reached or trapped.

    On TRAPPED the second element is the last advanced node, if any.
    """
    last = None
    while True:
        status, index = extend(tree, target, params, robot, world, stats=stats)
        if status == TRAPPED:
            return TRAPPED, last
        last = index
        if status == REACHED:
            return REACHED, index
        if deadline is not None and time.perf_counter() >= deadline:
            return TRAPPED, last


def _goal_representative(robot: RobotModel, world: WorldModel, goal: GoalSpec,
                         rng: np.random.Generator) -> np.ndarray | None:
    """A free configuration inside the goal to root the goal tree at."""
    if goal.kind == "config":
        return np.asarray(goal.target, dtype=float)
    lo = np.maximum(goal.lower, robot.lower)
    hi = np.minimum(goal.upper, robot.upper)
    for _ in range(_GOAL_SAMPLE_ATTEMPTS):
        q = rng.uniform(lo, hi)
        if check_config(robot, world, q).is_free:
            return q
    return None


def _join_paths(start_tree: Tree, start_meet: int, goal_tree: Tree,
                goal_meet: int) -> np.ndarray:
    """Start-tree branch root->meet followed by the reversed goal branch."""
    first = [start_tree.config(i) for i in start_tree.branch(start_meet)]
    second = [goal_tree.config(i) for i in reversed(goal_tree.branch(goal_meet))]
    if second and np.array_equal(first[-1], second[0]):
        second = second[1:]  # the meet configuration appears once
    return np.array(first + second)


def plan_rrt_connect(robot: RobotModel, world: WorldModel, query: Query,
                     params: RrtParams) -> PlannerResult:
    """Plan with RRT-Connect under the query's wall-clock budget.

    Deterministic given (query, params): the seed drives all sampling.
    """
    t0 = time.perf_counter()
    deadline = t0 + query.time_budget
    stats = {"samples": 0, "iterations": 0, "collision_checks": 0, "nodes": 0}

    verdict = validate_query(robot, world, query, seed=params.seed)
    if verdict != OK:
        return PlannerResult.unsolvable(verdict, time.perf_counter() - t0, stats)
    if goal_satisfied(query.goal, query.start):
        path = Path(query.start[None, :].copy())
        return PlannerResult.solved(path, FORWARD, time.perf_counter() - t0, stats)

    rng = np.random.default_rng(params.seed)
    goal_rep = _goal_representative(robot, world, query.goal, rng)
    if goal_rep is None:
        return PlannerResult.unsolvable(
            GOAL_IN_COLLISION, time.perf_counter() - t0, stats)

    tree_a = Tree(robot, query.start, START_TREE)
    tree_b = Tree(robot, goal_rep, GOAL_TREE)

    while True:
        if time.perf_counter() >= deadline:
            break
        if params.max_iterations is not None and stats["iterations"] >= params.max_iterations:
            break
        stats["iterations"] += 1
        q_rand = sample_uniform(robot, rng)
        stats["samples"] += 1
        status, new_index = extend(tree_a, q_rand, params, robot, world, stats=stats)
        if status != TRAPPED:
            status_b, meet_b = connect(tree_b, tree_a.config(new_index), params,
                                       robot, world, stats=stats, deadline=deadline)
            if status_b == REACHED:
                if tree_a.root_kind == START_TREE:
                    waypoints = _join_paths(tree_a, new_index, tree_b, meet_b)
                else:
                    waypoints = _join_paths(tree_b, meet_b, tree_a, new_index)
                stats["nodes"] = tree_a.size + tree_b.size
                return PlannerResult.solved(
                    Path(waypoints), FORWARD, time.perf_counter() - t0, stats)
        tree_a, tree_b = tree_b, tree_a

    stats["nodes"] = tree_a.size + tree_b.size
    return PlannerResult.timeout(time.perf_counter() - t0, stats)
