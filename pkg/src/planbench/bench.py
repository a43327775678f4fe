"""Benchmark harness: run planners over scenario suites and aggregate results.

Both planners are exercised under identical conditions: same scenarios, same
budgets, same collision substrate, and seeds derived as
``base_seed + scenario_index * repetitions + repetition`` so runs are
reproducible regardless of worker scheduling.  Wall-clock planning time is
measured around the plan call only and uses a monotonic clock.

Records carry the status taxonomy of PlannerResult (solved-forward,
solved-backward, failure, unsolvable) plus an "error" status for per-record
harness failures such as scenario/robot dimension mismatches; errors never
abort the suite.
"""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ara_star import MotionPrimitiveSet, default_primitives, plan_ara_star
from .core import BACKWARD, FAILURE_TIMEOUT, SOLVED, UNSOLVABLE, path_cost, query_from_scenario
from .errors import ContractViolation, PlanbenchError
from .params import PlannerParams
from .rrt_connect import plan_rrt_connect
from .world import Scenario

RRT_CONNECT = "rrt-connect"
ARA_STAR = "ara-star"
PLANNERS = (RRT_CONNECT, ARA_STAR)

SOLVED_FORWARD = "solved-forward"
SOLVED_BACKWARD = "solved-backward"
FAILURE = "failure"
ERROR = "error"
STATUSES = (SOLVED_FORWARD, SOLVED_BACKWARD, FAILURE, UNSOLVABLE, ERROR)

CSV_HEADER = ("scenario", "planner", "seed", "status", "planning_time_s", "path_cost")

WORKERS_ENV = "PLANBENCH_WORKERS"


@dataclass
class RunRecord:
    """One (scenario, planner, repetition) outcome.

    ``stats``, ``error``, and ``path`` are in-memory only; the CSV schema
    carries exactly the fields named in CSV_HEADER.
    """

    scenario: str
    planner: str
    seed: int
    status: str
    planning_time: float
    path_cost: float | None = None
    stats: dict = field(default_factory=dict)
    error: str | None = None
    path: np.ndarray | None = None


@dataclass(frozen=True)
class TimeSummary:
    """Planning-time statistics over a set of runs, in seconds."""

    minimum: float
    median: float
    geometric_mean: float | None
    maximum: float

    @classmethod
    def of(cls, times: list[float], with_geometric: bool) -> "TimeSummary | None":
        if not times:
            return None
        geo = None
        if with_geometric:
            geo = math.exp(statistics.fmean(math.log(max(t, 1e-12)) for t in times))
        return cls(minimum=min(times), median=statistics.median(times),
                   geometric_mean=geo, maximum=max(times))


@dataclass(frozen=True)
class SuiteAggregate:
    """Counts, success rate, and timing for one (suite, planner) group."""

    suite: str
    planner: str
    total: int
    success_forward: int
    success_backward: int
    failure: int
    unsolvable: int
    errors: int
    success_rate: float
    time_solved: TimeSummary | None
    time_all: TimeSummary

    @property
    def conserved(self) -> bool:
        return (self.success_forward + self.success_backward + self.failure
                + self.unsolvable + self.errors) == self.total


@dataclass(frozen=True)
class BenchmarkReport:
    """Aggregates per (suite, planner) plus the raw per-run records."""

    suite: str
    rows: tuple[SuiteAggregate, ...]
    records: tuple[RunRecord, ...]


def _status_of(result) -> str:
    if result.status == SOLVED:
        return SOLVED_BACKWARD if result.direction == BACKWARD else SOLVED_FORWARD
    if result.status == FAILURE_TIMEOUT:
        return FAILURE
    return UNSOLVABLE


def run_one(scenario: Scenario, planner: str, params: PlannerParams, seed: int,
            primitives: MotionPrimitiveSet | None = None) -> RunRecord:
    """Execute a single query; harness failures become an error record."""
    try:
        query = query_from_scenario(scenario, params.goal_tolerance_default)
        seeded = params.with_seed(seed)
        t0 = time.perf_counter()
        if planner == RRT_CONNECT:
            result = plan_rrt_connect(scenario.robot, scenario.world, query,
                                      seeded.rrt_connect)
        else:
            prim = primitives or default_primitives(scenario.robot)
            result = plan_ara_star(scenario.robot, scenario.world, query, prim,
                                   seeded.ara_star)
        elapsed = time.perf_counter() - t0
    except PlanbenchError as exc:
        return RunRecord(scenario=scenario.name, planner=planner, seed=seed,
                         status=ERROR, planning_time=0.0, error=str(exc))
    cost = None
    path = None
    if result.status == SOLVED:
        cost = path_cost(scenario.robot, result.path)
        path = result.path.waypoints
    return RunRecord(scenario=scenario.name, planner=planner, seed=seed,
                     status=_status_of(result), planning_time=elapsed,
                     path_cost=cost, stats=dict(result.stats), path=path)


def _worker(task) -> RunRecord:
    scenario, planner, params, seed, primitives = task
    return run_one(scenario, planner, params, seed, primitives)


def run_suite(scenarios, planner: str, params: PlannerParams,
              repetitions: int = 1, base_seed: int = 0, *,
              primitives: MotionPrimitiveSet | None = None,
              workers: int | None = None) -> list[RunRecord]:
    """Run every scenario ``repetitions`` times with one planner.

    Each worker owns one query end to end; the record order is always
    scenario-major, repetition-minor regardless of worker count.
    """
    if planner not in PLANNERS:
        raise ContractViolation(f"unknown planner {planner!r}")
    if repetitions < 1:
        raise ContractViolation("repetitions must be >= 1")
    scenarios = list(scenarios)
    tasks = []
    for index, scenario in enumerate(scenarios):
        for rep in range(repetitions):
            seed = base_seed + index * repetitions + rep
            tasks.append((scenario, planner, params, seed, primitives))
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers <= 1 or len(tasks) <= 1:
        return [_worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_worker, tasks))


def aggregate(records, suite: str = "suite") -> BenchmarkReport:
    """Group records by planner and compute the report aggregates.

    The geometric mean is computed over solved runs only; all-runs summaries
    carry min/median/max.
    """
    records = list(records)
    if not records:
        raise ContractViolation("aggregate requires at least one record")
    rows = []
    for planner in sorted({r.planner for r in records}):
        group = [r for r in records if r.planner == planner]
        counts = {status: sum(1 for r in group if r.status == status)
                  for status in STATUSES}
        solved_times = [r.planning_time for r in group
                        if r.status in (SOLVED_FORWARD, SOLVED_BACKWARD)]
        all_times = [r.planning_time for r in group]
        rows.append(SuiteAggregate(
            suite=suite,
            planner=planner,
            total=len(group),
            success_forward=counts[SOLVED_FORWARD],
            success_backward=counts[SOLVED_BACKWARD],
            failure=counts[FAILURE],
            unsolvable=counts[UNSOLVABLE],
            errors=counts[ERROR],
            success_rate=(counts[SOLVED_FORWARD] + counts[SOLVED_BACKWARD]) / len(group),
            time_solved=TimeSummary.of(solved_times, with_geometric=True),
            time_all=TimeSummary.of(all_times, with_geometric=False),
        ))
    return BenchmarkReport(suite=suite, rows=tuple(rows), records=tuple(records))


def emit_report(report: BenchmarkReport, format: str = "table") -> str:
    """Render a report as a table or as per-run CSV.

    Table rows have the columns [suite, success_forward, success_backward,
    failure, unsolvable], one block per planner; RRT-Connect renders "-" in
    the backward column since its bidirectionality is internal.  CSV rows
    carry raw seconds, one line per run, with the pinned header
    ``scenario,planner,seed,status,planning_time_s,path_cost``.
    """
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in report.records:
            writer.writerow([r.scenario, r.planner, r.seed, r.status,
                             repr(float(r.planning_time)),
                             "" if r.path_cost is None else repr(float(r.path_cost))])
        return out.getvalue()
    if format != "table":
        raise ContractViolation(f"unknown report format {format!r}")
    lines = []
    header = ("suite", "success_forward", "success_backward", "failure", "unsolvable")
    for row in report.rows:
        lines.append(f"planner: {row.planner}")
        backward = "-" if row.planner == RRT_CONNECT else str(row.success_backward)
        cells = (row.suite, str(row.success_forward), backward,
                 str(row.failure), str(row.unsolvable))
        widths = [max(len(h), len(c)) for h, c in zip(header, cells)]
        lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
        lines.append("")
    return "\n".join(lines)


def parse_records(text: str) -> list[RunRecord]:
    """Parse records from report CSV; the inverse of emit_report(csv)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = tuple(next(reader))
    except StopIteration as exc:
        raise ContractViolation("empty CSV document") from exc
    if header != CSV_HEADER:
        raise ContractViolation(f"unexpected CSV header {header!r}")
    records = []
    for row in reader:
        if not row:
            continue
        scenario, planner, seed, status, planning_time, cost = row
        records.append(RunRecord(
            scenario=scenario, planner=planner, seed=int(seed), status=status,
            planning_time=float(planning_time),
            path_cost=None if cost == "" else float(cost)))
    return records
