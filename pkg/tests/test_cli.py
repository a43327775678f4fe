"""Command-line interface, exercised in-process through main()."""

import pytest

from planbench.bench import parse_records
from planbench.cli import main
from planbench.world import load_scenario

GANTRY_ROBOT = """
joints:
  - {name: x, type: prismatic, axis: [1, 0, 0], limits: [0.0, 6.0], resolution: 0.25}
  - {name: y, type: prismatic, axis: [0, 1, 0], limits: [0.0, 6.0], resolution: 0.25}
collision_spheres:
  - {link: 1, center: [0, 0, 0], radius: 0.05}
"""

SCENARIO = """
name: cli_case
robot: gantry.yaml
start: [1.0, 1.0]
goal: {type: config, target: [5.0, 5.0]}
world:
  obstacles:
    - {shape: box, center: [3.0, 3.0, 0.0], yaw: 0.0, half_extents: [0.2, 1.5, 0.5]}
    - {shape: cylinder, center: [2.5, 4.8, 0.0], yaw: 0.0, radius: 0.1, half_height: 0.3}
time_budget_s: 5.0
variation:
  object_jitter_xy: 0.1
  height_range: 0.0
  yaw_range_deg: 10
  shelf_indices: [0]
  object_indices: [1]
"""

BLOCKED = """
name: blocked
robot: gantry.yaml
start: [1.0, 1.0]
goal: {type: config, target: [5.0, 5.0]}
world:
  obstacles:
    - {shape: sphere, center: [1.0, 1.0, 0.0], radius: 0.3}
time_budget_s: 1.0
"""


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "gantry.yaml").write_text(GANTRY_ROBOT)
    (tmp_path / "case.scenario").write_text(SCENARIO)
    (tmp_path / "blocked.scenario").write_text(BLOCKED)
    return tmp_path


class TestPlan:
    def test_solved_exit_zero(self, workdir, capsys):
        code = main(["plan", "--scenario", str(workdir / "case.scenario"),
                     "--planner", "rrt-connect", "--seed", "4"])
        out = capsys.readouterr().out
        assert code == 0
        assert "status: solved-forward" in out
        assert "path_cost:" in out

    def test_unsolvable_exit_two(self, workdir, capsys):
        code = main(["plan", "--scenario", str(workdir / "blocked.scenario"),
                     "--planner", "ara-star"])
        out = capsys.readouterr().out
        assert code == 2
        assert "unsolvable (start_in_collision)" in out

    def test_path_out_then_validate(self, workdir, capsys):
        path_file = workdir / "solution.csv"
        code = main(["plan", "--scenario", str(workdir / "case.scenario"),
                     "--planner", "ara-star", "--path-out", str(path_file)])
        assert code == 0
        assert path_file.exists()
        code = main(["validate", "--scenario", str(workdir / "case.scenario"),
                     "--path", str(path_file)])
        out = capsys.readouterr().out
        assert code == 0
        assert "valid" in out

    def test_validate_rejects_corrupted_path(self, workdir, capsys):
        path_file = workdir / "solution.csv"
        main(["plan", "--scenario", str(workdir / "case.scenario"),
              "--planner", "ara-star", "--path-out", str(path_file)])
        lines = path_file.read_text().splitlines()
        lines[1] = "3.0,3.0"  # teleport the first waypoint into the wall
        path_file.write_text("\n".join(lines) + "\n")
        code = main(["validate", "--scenario", str(workdir / "case.scenario"),
                     "--path", str(path_file)])
        assert code == 1


class TestGen:
    def test_writes_count_files(self, workdir, capsys):
        out_dir = workdir / "suite" / "generated"
        code = main(["gen", "--base", str(workdir / "case.scenario"),
                     "--family", "objects", "--count", "5", "--seed", "9",
                     "--out", str(out_dir)])
        assert code == 0
        files = sorted(out_dir.glob("*.scenario"))
        assert len(files) == 5
        names = [load_scenario(f).name for f in files]
        assert names == [f"cli_case_{i:03d}" for i in range(5)]

    def test_deterministic_and_loadable(self, workdir):
        out_a = workdir / "a"
        out_b = workdir / "b"
        for out in (out_a, out_b):
            main(["gen", "--base", str(workdir / "case.scenario"),
                  "--family", "rotation", "--count", "3", "--seed", "2",
                  "--out", str(out)])
        for fa, fb in zip(sorted(out_a.glob("*.scenario")),
                          sorted(out_b.glob("*.scenario"))):
            assert load_scenario(fa).world == load_scenario(fb).world

    def test_shelf_fixed_for_objects_family(self, workdir):
        out_dir = workdir / "objfam"
        main(["gen", "--base", str(workdir / "case.scenario"),
              "--family", "objects", "--count", "4", "--seed", "3",
              "--out", str(out_dir)])
        base = load_scenario(workdir / "case.scenario")
        for f in out_dir.glob("*.scenario"):
            scenario = load_scenario(f)
            assert scenario.world.obstacles[0] == base.world.obstacles[0]


class TestBench:
    def test_bench_writes_csv_and_table(self, workdir, capsys):
        suite_dir = workdir / "suite"
        main(["gen", "--base", str(workdir / "case.scenario"),
              "--family", "objects", "--count", "3", "--seed", "1",
              "--out", str(suite_dir / "generated")])
        report_file = workdir / "report.csv"
        code = main(["bench", "--suite", str(suite_dir),
                     "--planners", "rrt-connect,ara-star",
                     "--reps", "1", "--seed", "0",
                     "--out", str(report_file), "--table"])
        out = capsys.readouterr().out
        assert code == 0
        assert "planner: rrt-connect" in out
        assert "planner: ara-star" in out
        records = parse_records(report_file.read_text())
        assert len(records) == 6
        assert {r.planner for r in records} == {"rrt-connect", "ara-star"}

    def test_bench_deterministic(self, workdir):
        suite_dir = workdir / "suite2"
        main(["gen", "--base", str(workdir / "case.scenario"),
              "--family", "objects", "--count", "2", "--seed", "1",
              "--out", str(suite_dir / "generated")])
        reports = []
        for name in ("r1.csv", "r2.csv"):
            target = workdir / name
            main(["bench", "--suite", str(suite_dir), "--planners", "rrt-connect",
                  "--reps", "2", "--seed", "3", "--out", str(target)])
            reports.append([
                (r.scenario, r.seed, r.status, r.path_cost)
                for r in parse_records(target.read_text())])
        assert reports[0] == reports[1]

    def test_unknown_planner_rejected(self, workdir, capsys):
        code = main(["bench", "--suite", str(workdir), "--planners", "prm",
                     "--out", str(workdir / "x.csv")])
        assert code == 1


class TestErrors:
    def test_missing_scenario_file_reports_error(self, workdir, capsys):
        code = main(["plan", "--scenario", str(workdir / "nope.scenario"),
                     "--planner", "ara-star"])
        assert code == 1 or code == 2  # harness error path
