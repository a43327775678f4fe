"""Command-line interface: plan one query, generate suites, benchmark, validate.

Exit codes for ``plan``: 0 solved, 1 failure, 2 unsolvable.  ``validate``
exits 0 for a valid path and 1 otherwise.  The PLANBENCH_WORKERS environment
variable caps benchmark worker count.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from .ara_star import default_primitives, parse_primitives, plan_ara_star
from .bench import (ARA_STAR, PLANNERS, RRT_CONNECT, aggregate, emit_report,
                    run_suite)
from .core import Path as PlanPath
from .core import SOLVED, UNSOLVABLE, path_cost, query_from_scenario, validate_path
from .errors import PlanbenchError
from .params import PlannerParams, load_params
from .rrt_connect import plan_rrt_connect
from .world import (OBJECTS_ONLY, PLUS_HEIGHT, PLUS_ROTATION, Scenario,
                    generate_variations, load_scenario, serialize_scenario)

_FAMILIES = {"objects": OBJECTS_ONLY, "height": PLUS_HEIGHT, "rotation": PLUS_ROTATION}


def _write_path_csv(path: Path, waypoints: np.ndarray) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f"q{i}" for i in range(waypoints.shape[1])])
        for row in waypoints:
            writer.writerow([repr(float(v)) for v in row])


def _read_path_csv(path: Path) -> np.ndarray:
    with path.open(newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if len(rows) < 2:
        raise PlanbenchError(f"path file {path} has no waypoints")
    return np.array([[float(v) for v in row] for row in rows[1:]])


def _load_params_arg(value: str | None) -> PlannerParams:
    return load_params(value) if value else PlannerParams()


def _cmd_plan(args) -> int:
    scenario = load_scenario(args.scenario)
    params = _load_params_arg(args.params)
    if args.seed is not None:
        params = params.with_seed(args.seed)
    query = query_from_scenario(scenario, params.goal_tolerance_default)
    if args.planner == RRT_CONNECT:
        result = plan_rrt_connect(scenario.robot, scenario.world, query,
                                  params.rrt_connect)
    else:
        if args.primitives:
            primitives = parse_primitives(
                Path(args.primitives).read_text(encoding="utf-8"), scenario.robot)
        else:
            primitives = default_primitives(scenario.robot)
        result = plan_ara_star(scenario.robot, scenario.world, query, primitives,
                               params.ara_star)

    print(f"scenario: {scenario.name}")
    print(f"planner: {args.planner}")
    if result.status == SOLVED:
        print(f"status: solved-{result.direction}")
        print(f"planning_time_s: {result.planning_time:.6f}")
        print(f"path_cost: {path_cost(scenario.robot, result.path):.6f}")
        print(f"waypoints: {len(result.path)}")
        if args.path_out:
            _write_path_csv(Path(args.path_out), result.path.waypoints)
        return 0
    if result.status == UNSOLVABLE:
        print(f"status: unsolvable ({result.reason})")
        print(f"planning_time_s: {result.planning_time:.6f}")
        return 2
    print("status: failure")
    print(f"planning_time_s: {result.planning_time:.6f}")
    return 1


def _cmd_gen(args) -> int:
    base_path = Path(args.base)
    base = load_scenario(base_path)
    variations = generate_variations(base, _FAMILIES[args.family], args.count, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    robot_abs = (base_path.parent / base.robot_file).resolve()
    for index, scenario in enumerate(variations):
        named = Scenario(
            name=f"{base.name}_{index:03d}",
            robot_file=_relative_or_absolute(robot_abs, out_dir),
            robot=scenario.robot,
            start=scenario.start,
            goal=scenario.goal,
            world=scenario.world,
            time_budget=scenario.time_budget,
            variation=scenario.variation,
        )
        target = out_dir / f"{named.name}.scenario"
        target.write_text(serialize_scenario(named), encoding="utf-8")
    print(f"wrote {len(variations)} scenarios to {out_dir}")
    return 0


def _relative_or_absolute(target: Path, start: Path) -> str:
    try:
        return os.path.relpath(target, start)
    except ValueError:  # different drive on some platforms
        return str(target)


def _suite_files(suite_dir: Path) -> list[Path]:
    generated = suite_dir / "generated"
    if generated.is_dir():
        return sorted(generated.glob("*.scenario"))
    return sorted(suite_dir.glob("*.scenario"))


def _cmd_bench(args) -> int:
    suite_dir = Path(args.suite)
    files = _suite_files(suite_dir)
    if not files:
        print(f"no *.scenario files under {suite_dir}", file=sys.stderr)
        return 1
    scenarios = [load_scenario(f) for f in files]
    params = _load_params_arg(args.params)
    planners = [p.strip() for p in args.planners.split(",") if p.strip()]
    for planner in planners:
        if planner not in PLANNERS:
            print(f"unknown planner {planner!r}", file=sys.stderr)
            return 1
    primitives = None
    if args.primitives:
        primitives = parse_primitives(
            Path(args.primitives).read_text(encoding="utf-8"), scenarios[0].robot)

    records = []
    for planner in planners:
        records.extend(run_suite(
            scenarios, planner, params, repetitions=args.reps,
            base_seed=args.seed,
            primitives=primitives if planner == ARA_STAR else None,
            workers=args.workers))
    report = aggregate(records, suite=suite_dir.name)
    Path(args.out).write_text(emit_report(report, "csv"), encoding="utf-8")
    print(f"wrote {len(records)} records to {args.out}")
    if args.table:
        print(emit_report(report, "table"))
    return 0


def _cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    params = _load_params_arg(args.params)
    query = query_from_scenario(scenario, params.goal_tolerance_default)
    waypoints = _read_path_csv(Path(args.path))
    ok = validate_path(scenario.robot, scenario.world, query,
                       PlanPath(waypoints), args.step)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planbench",
        description="Motion-planning benchmark: RRT-Connect and ARA* over one substrate.")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="plan a single scenario")
    plan.add_argument("--scenario", required=True)
    plan.add_argument("--planner", required=True, choices=PLANNERS)
    plan.add_argument("--params", default=None)
    plan.add_argument("--seed", type=int, default=None)
    plan.add_argument("--primitives", default=None,
                      help="primitives file (ara-star only)")
    plan.add_argument("--path-out", default=None,
                      help="write the solution waypoints as CSV")
    plan.set_defaults(func=_cmd_plan)

    gen = sub.add_parser("gen", help="materialize scenario variations")
    gen.add_argument("--base", required=True)
    gen.add_argument("--family", required=True, choices=sorted(_FAMILIES))
    gen.add_argument("--count", required=True, type=int)
    gen.add_argument("--seed", required=True, type=int)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    bench = sub.add_parser("bench", help="run planners over a scenario suite")
    bench.add_argument("--suite", required=True)
    bench.add_argument("--planners", required=True,
                       help="comma-separated planner ids")
    bench.add_argument("--params", default=None)
    bench.add_argument("--reps", type=int, default=1)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", required=True)
    bench.add_argument("--table", action="store_true")
    bench.add_argument("--primitives", default=None)
    bench.add_argument("--workers", type=int, default=None)
    bench.set_defaults(func=_cmd_bench)

    validate = sub.add_parser("validate", help="re-check a stored path")
    validate.add_argument("--scenario", required=True)
    validate.add_argument("--path", required=True)
    validate.add_argument("--step", type=float, default=0.05)
    validate.add_argument("--params", default=None)
    validate.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PlanbenchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
