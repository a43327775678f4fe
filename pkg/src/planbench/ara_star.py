"""Search-and-sample planning: a joint-space lattice searched by anytime A*.

Configurations are discretized per joint at the robot's declared resolutions;
motion primitives are integer cell displacements applied to lattice states.
The search runs weighted A* once per entry of a strictly decreasing inflation
schedule, reusing cost-to-come values and an inconsistent-state list between
iterations, so every incumbent published at inflation eps costs at most
eps times the optimal lattice cost.

Queries are answered by a forward search over half the budget followed, if
needed, by a backward search (roles of start and goal swapped, waypoints
reversed); off-lattice endpoints are joined to the lattice by explicitly
validated junction motions, never by loosening tolerances.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .collision import check_motion, free_mask, motion_configs
from .core import (BACKWARD, FORWARD, GOAL_IN_COLLISION, OK, Path, PlannerResult,
                   Query, goal_satisfied, validate_query)
from .errors import ContractViolation, ParseError, ValidationError
from .robot import RobotModel, as_configuration, config_distance
from .world import GoalSpec, WorldModel

import yaml

from .rrt_connect import _goal_representative

# Sentinel lattice node for the off-lattice goal configuration reached by the
# adaptive goal-snap primitive.  The empty tuple cannot be a real state
# (robots have >= 1 joint) and sorts before every real state.
GOAL_NODE: tuple[int, ...] = ()

_TIE = 1e-12


@dataclass(frozen=True)
class MotionPrimitiveSet:
    """Integer cell displacements plus the adaptive goal-snap radius.

    The set is closed under negation, so every backward lattice edge is a
    valid forward edge reversed.
    """

    primitives: np.ndarray  # (P, n) integers
    snap_radius: float

    def __post_init__(self):
        prim = np.asarray(self.primitives, dtype=int)
        if prim.ndim != 2:
            raise ValidationError("primitives must be a (P, n) integer array")
        if prim.shape[0] and not np.any(prim, axis=1).all():
            raise ValidationError("primitive vectors must be nonzero")
        rows = {tuple(int(v) for v in row) for row in prim}
        for row in rows:
            if tuple(-v for v in row) not in rows:
                raise ValidationError(f"primitive {row} lacks its negation")
        prim = prim.copy()
        prim.flags.writeable = False
        object.__setattr__(self, "primitives", prim)
        if self.snap_radius < 0:
            raise ValidationError("snap_radius must be nonnegative")


@dataclass(frozen=True)
class AraParams:
    """Inflation schedule and search knobs.

    The schedule must be non-empty, strictly decreasing, and >= 1 throughout.
    ``budget_split`` is the fraction of the query budget granted to the
    forward attempt before the backward attempt runs on the remainder.
    """

    epsilon_schedule: tuple[float, ...] = (3.0, 2.0, 1.5, 1.0)
    edge_step: float = 0.05
    seed: int = 0
    budget_split: float = 0.5

    def __post_init__(self):
        schedule = tuple(float(e) for e in self.epsilon_schedule)
        object.__setattr__(self, "epsilon_schedule", schedule)
        if not schedule:
            raise ValidationError("epsilon_schedule must be non-empty")
        if any(e < 1.0 for e in schedule):
            raise ValidationError("every inflation factor must be >= 1")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ValidationError("epsilon_schedule must be strictly decreasing")
        if not self.edge_step > 0:
            raise ValidationError("edge_step must be positive")
        if not 0.0 < self.budget_split < 1.0:
            raise ValidationError("budget_split must lie in (0, 1)")


@dataclass
class SearchStats:
    """Per-inflation bookkeeping of one anytime search."""

    epsilons: list[float] = field(default_factory=list)
    expansions_per_epsilon: list[int] = field(default_factory=list)
    incumbent_costs: list[float | None] = field(default_factory=list)
    reopened: int = 0
    epsilon_final: float | None = None

    @property
    def expansions(self) -> int:
        return sum(self.expansions_per_epsilon)


@dataclass
class AraSolution:
    """An incumbent lattice path: node chain, decoded waypoints, cost."""

    nodes: tuple
    waypoints: list[np.ndarray]
    cost: float


class LatticeCache:
    """Memo of validated lattice edges, shared across inflation iterations
    and across the forward and backward attempts of one query."""

    def __init__(self):
        self.edges: dict = {}
        self.snap: dict = {}


def lattice_max_coords(robot: RobotModel) -> np.ndarray:
    """Largest valid cell index per joint."""
    span = robot.upper - robot.lower
    return np.floor(span / robot.resolutions + 1e-9).astype(int)


def discretize(robot: RobotModel, q) -> tuple[int, ...]:
    """Nearest lattice state; decoded values stay within joint limits."""
    q = as_configuration(robot, q)
    coords = np.rint((q - robot.lower) / robot.resolutions).astype(int)
    coords = np.clip(coords, 0, lattice_max_coords(robot))
    return tuple(int(c) for c in coords)


def decode(robot: RobotModel, state: tuple[int, ...]) -> np.ndarray:
    """Configuration at a lattice state's cell center."""
    return robot.lower + np.asarray(state, dtype=float) * robot.resolutions


def default_primitives(robot: RobotModel, extra_vectors=(),
                       snap_radius: float | None = None) -> MotionPrimitiveSet:
    """The 2n single-joint one-cell moves, plus declared extras.

    Extra vectors are added together with their negations.  When no snap
    radius is given it defaults to twice the largest single-joint move cost.
    """
    n = robot.dof
    rows: list[tuple[int, ...]] = []
    for j in range(n):
        for sign in (1, -1):
            row = [0] * n
            row[j] = sign
            rows.append(tuple(row))
    for vec in extra_vectors:
        row = tuple(int(v) for v in vec)
        if len(row) != n:
            raise ValidationError(
                f"primitive vector {row} has length {len(row)}, expected {n}")
        if not any(row):
            raise ValidationError("primitive vectors must be nonzero")
        for candidate in (row, tuple(-v for v in row)):
            if candidate not in rows:
                rows.append(candidate)
    if snap_radius is None:
        snap_radius = 2.0 * float(
            np.max(np.sqrt(robot.weights) * robot.resolutions))
    return MotionPrimitiveSet(primitives=np.array(rows, dtype=int),
                              snap_radius=float(snap_radius))


_PRIMITIVES_KEYS = {"primitives", "snap_radius"}


def parse_primitives(text: str, robot: RobotModel) -> MotionPrimitiveSet:
    """Parse a primitives document: extra vectors plus the snap radius."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(f"malformed primitives document: {exc}",
                         line=None if mark is None else mark.line + 1) from exc
    if not isinstance(doc, dict):
        raise ValidationError("primitives document must be a mapping")
    unknown = set(doc) - _PRIMITIVES_KEYS
    if unknown:
        raise ValidationError(f"unknown primitives keys: {sorted(unknown)}")
    snap = doc.get("snap_radius")
    return default_primitives(robot, extra_vectors=doc.get("primitives") or (),
                              snap_radius=None if snap is None else float(snap))


def heuristic(state: tuple[int, ...], goal: GoalSpec, robot: RobotModel) -> float:
    """Metric distance from the decoded state to the goal.

    Config goals measure to the target configuration; region goals measure to
    the closest point of the region box.  Both are consistent with the edge
    costs because edges are priced by the same metric.
    """
    if state == GOAL_NODE:
        return 0.0
    q = decode(robot, state)
    if goal.kind == "config":
        return config_distance(robot, q, goal.target)
    clamped = np.clip(q, goal.lower, goal.upper)
    return config_distance(robot, q, clamped)


def successors(state: tuple[int, ...], primitives: MotionPrimitiveSet,
               robot: RobotModel, world: WorldModel,
               goal_config: np.ndarray | None = None, *,
               edge_step: float = 0.05, cache: LatticeCache | None = None,
               stats: dict | None = None) -> list[tuple[tuple[int, ...], float]]:
    """Valid lattice moves from a free state, each priced by the metric.

    A candidate survives when it stays inside the lattice bounds and the
    straight motion to it validates at ``edge_step``.  When ``goal_config``
    lies within the snap radius and the straight motion to it validates, an
    off-lattice terminal successor (GOAL_NODE, distance) is emitted as well.
    """
    q = decode(robot, state)
    state_arr = np.asarray(state, dtype=int)
    max_coords = lattice_max_coords(robot)
    results: list[tuple[tuple[int, ...], float]] = []
    pending: list[tuple[tuple[int, ...], np.ndarray, float, tuple, bool]] = []

    for delta in primitives.primitives:
        coords = state_arr + delta
        if np.any(coords < 0) or np.any(coords > max_coords):
            continue
        nxt = tuple(int(c) for c in coords)
        q2 = decode(robot, nxt)
        cost = config_distance(robot, q, q2)
        key = (state, nxt) if state <= nxt else (nxt, state)
        cached = None if cache is None else cache.edges.get(key)
        if cached is True:
            results.append((nxt, cost))
        elif cached is None:
            pending.append((nxt, q2, cost, key, False))

    if goal_config is not None:
        d = config_distance(robot, q, goal_config)
        if d <= primitives.snap_radius:
            cached = None if cache is None else cache.snap.get(state)
            if cached is True:
                results.append((GOAL_NODE, d))
            elif cached is None:
                pending.append((GOAL_NODE, goal_config, d, state, True))

    if pending:
        stacks = [motion_configs(robot, q, q2, edge_step) for _, q2, _, _, _ in pending]
        lengths = [s.shape[0] for s in stacks]
        free = free_mask(robot, world, np.vstack(stacks), stats=stats)
        offset = 0
        for (node, _, cost, key, is_snap), length in zip(pending, lengths):
            ok = bool(free[offset : offset + length].all())
            offset += length
            if cache is not None:
                if is_snap:
                    cache.snap[key] = ok
                else:
                    cache.edges[key] = ok
            if ok:
                results.append((node, cost))
    return results


def _goal_config_for(goal: GoalSpec) -> np.ndarray | None:
    """Snap target: config goals expose their target, regions have none."""
    if goal.kind == "config":
        return np.asarray(goal.target, dtype=float)
    return None


def ara_search(start_state: tuple[int, ...], goal: GoalSpec,
               primitives: MotionPrimitiveSet, params: AraParams,
               robot: RobotModel, world: WorldModel,
               deadline: float | None, *, cache: LatticeCache | None = None,
               stats: dict | None = None) -> tuple[AraSolution | None, SearchStats]:
    """Anytime inflated A* over the lattice induced by the primitives.

    Runs one weighted-A* iteration per schedule entry, carrying cost-to-come
    values and inconsistent states forward.  An iteration terminates once the
    smallest open key is no better than the best goal cost found, which
    certifies the eps-suboptimality bound for that iteration's incumbent.
    Hitting the deadline returns the current incumbent, possibly none.

    Tie-breaking is deterministic: equal keys prefer larger cost-to-come,
    then lexicographically smaller states.
    """
    goal_config = _goal_config_for(goal)
    if cache is None:
        cache = LatticeCache()
    search_stats = SearchStats()

    g: dict = {start_state: 0.0}
    parent: dict = {start_state: None}
    best_cost = math.inf
    best_node = None

    h_memo: dict = {}

    def h(s) -> float:
        value = h_memo.get(s)
        if value is None:
            value = heuristic(s, goal, robot)
            h_memo[s] = value
        return value

    def is_goal(s) -> bool:
        if s == GOAL_NODE:
            return True
        return goal_satisfied(goal, decode(robot, s))

    seeds = {start_state}
    interrupted = False
    for eps in params.epsilon_schedule:
        if deadline is not None and time.perf_counter() >= deadline:
            break
        heap = [(g[s] + eps * h(s), -g[s], s) for s in seeds]
        heapq.heapify(heap)
        closed: set = set()
        incons: set = set()
        expansions = 0
        while heap:
            f, neg_g, s = heap[0]
            if -neg_g != g[s]:
                heapq.heappop(heap)  # stale entry
                continue
            if best_cost <= f + _TIE:
                break  # bound certified for this iteration
            heapq.heappop(heap)
            if s in closed:
                continue
            closed.add(s)
            expansions += 1
            if is_goal(s):
                if g[s] < best_cost:
                    best_cost = g[s]
                    best_node = s
                continue  # terminal: paths through a goal cannot improve it
            for nxt, cost in successors(
                    s, primitives, robot, world, goal_config,
                    edge_step=params.edge_step, cache=cache, stats=stats):
                tentative = g[s] + cost
                if tentative < g.get(nxt, math.inf) - _TIE:
                    g[nxt] = tentative
                    parent[nxt] = s
                    if nxt in closed:
                        if nxt not in incons:
                            incons.add(nxt)
                            search_stats.reopened += 1
                    else:
                        heapq.heappush(heap, (tentative + eps * h(nxt), -tentative, nxt))
            if deadline is not None and time.perf_counter() >= deadline:
                interrupted = True
                break
        search_stats.epsilons.append(eps)
        search_stats.expansions_per_epsilon.append(expansions)
        search_stats.incumbent_costs.append(
            None if best_node is None else best_cost)
        if interrupted:
            break
        search_stats.epsilon_final = eps
        seeds = {s for _, neg_g, s in heap if -neg_g == g[s]} | incons

    if best_node is None:
        return None, search_stats
    chain = [best_node]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    chain.reverse()
    waypoints = [goal_config.copy() if s == GOAL_NODE else decode(robot, s)
                 for s in chain]
    # Report the reconstructed path's actual cost: parent pointers can be
    # rewired by later relaxations, so the chain may be cheaper than the
    # g-value certified when the incumbent was first expanded.
    cost = sum(config_distance(robot, waypoints[k], waypoints[k + 1])
               for k in range(len(waypoints) - 1))
    return AraSolution(nodes=tuple(chain), waypoints=waypoints, cost=cost), search_stats


def _lattice_attempt(robot: RobotModel, world: WorldModel, start_q: np.ndarray,
                     goal: GoalSpec, primitives: MotionPrimitiveSet,
                     params: AraParams, deadline: float, cache: LatticeCache,
                     stats: dict, label: str) -> list[np.ndarray] | None:
    """One directed search: snap the start onto the lattice, search, and
    return waypoints beginning exactly at ``start_q`` (or None)."""
    if time.perf_counter() >= deadline:
        return None
    state = discretize(robot, start_q)
    cell = decode(robot, state)
    if not free_mask(robot, world, cell[None, :], stats=stats).all():
        return None
    prefix: list[np.ndarray] = []
    if not np.array_equal(cell, start_q):
        if not check_motion(robot, world, start_q, cell, params.edge_step, stats=stats):
            return None
        prefix = [np.asarray(start_q, dtype=float).copy()]
    solution, search_stats = ara_search(
        state, goal, primitives, params, robot, world, deadline,
        cache=cache, stats=stats)
    stats[f"expansions_{label}"] = search_stats.expansions
    stats["expansions"] = stats.get("expansions", 0) + search_stats.expansions
    stats["reopened"] = stats.get("reopened", 0) + search_stats.reopened
    if solution is None:
        return None
    return prefix + solution.waypoints


def plan_ara_star(robot: RobotModel, world: WorldModel, query: Query,
                  primitives: MotionPrimitiveSet, params: AraParams) -> PlannerResult:
    """Forward-then-backward anytime lattice planning under one budget.

    The forward search (start toward goal) gets ``budget_split`` of the
    budget; on failure the backward search plans from a goal representative
    to the start (config goal with half-cell tolerances) and its waypoints
    are reversed, so the returned path always runs start to goal.
    """
    t0 = time.perf_counter()
    stats = {"expansions": 0, "collision_checks": 0, "reopened": 0}
    if primitives.primitives.shape[1] != robot.dof:
        raise ContractViolation(
            f"primitives are {primitives.primitives.shape[1]}-dimensional, "
            f"robot has {robot.dof} joints")

    verdict = validate_query(robot, world, query, seed=params.seed)
    if verdict != OK:
        return PlannerResult.unsolvable(verdict, time.perf_counter() - t0, stats)
    start = np.asarray(query.start, dtype=float)
    if goal_satisfied(query.goal, start):
        return PlannerResult.solved(Path(start[None, :].copy()), FORWARD,
                                    time.perf_counter() - t0, stats)

    cache = LatticeCache()
    forward_deadline = t0 + query.time_budget * params.budget_split
    final_deadline = t0 + query.time_budget

    forward = _lattice_attempt(robot, world, start, query.goal, primitives,
                               params, forward_deadline, cache, stats, FORWARD)
    if forward is not None:
        return PlannerResult.solved(Path(np.array(forward)), FORWARD,
                                    time.perf_counter() - t0, stats)

    rng = np.random.default_rng(params.seed)
    representative = _goal_representative(robot, world, query.goal, rng)
    if representative is None:
        return PlannerResult.unsolvable(GOAL_IN_COLLISION,
                                        time.perf_counter() - t0, stats)
    back_goal = GoalSpec.config_goal(start, tolerance=robot.resolutions / 2.0)
    backward = _lattice_attempt(robot, world, representative, back_goal,
                                primitives, params, final_deadline, cache,
                                stats, BACKWARD)
    if backward is not None:
        waypoints = list(reversed(backward))
        if not np.array_equal(waypoints[0], start):
            # Join the true start to the lattice with a validated motion.
            if not check_motion(robot, world, start, waypoints[0],
                                params.edge_step, stats=stats):
                return PlannerResult.timeout(time.perf_counter() - t0, stats)
            waypoints.insert(0, start.copy())
        return PlannerResult.solved(Path(np.array(waypoints)), BACKWARD,
                                    time.perf_counter() - t0, stats)
    return PlannerResult.timeout(time.perf_counter() - t0, stats)
