"""Planner parameter files: defaults, propagation, strict key checking."""

import pytest

from planbench.errors import ValidationError
from planbench.params import PlannerParams, parse_params


class TestParseParams:
    def test_empty_document_gives_defaults(self):
        params = parse_params("")
        assert params.rrt_connect.step_eta == 0.5
        assert params.rrt_connect.max_iterations is None
        assert params.ara_star.epsilon_schedule == (3.0, 2.0, 1.5, 1.0)
        assert params.ara_star.budget_split == 0.5
        assert params.goal_tolerance_default == 0.0

    def test_common_values_propagate(self):
        params = parse_params("common: {edge_step: 0.02, seed: 9}\n")
        assert params.rrt_connect.edge_step == 0.02
        assert params.rrt_connect.seed == 9
        assert params.ara_star.edge_step == 0.02
        assert params.ara_star.seed == 9

    def test_section_overrides_common(self):
        doc = ("common: {edge_step: 0.02}\n"
               "rrt_connect: {edge_step: 0.1, step_eta: 0.7, max_iterations: 500}\n"
               "ara_star: {epsilon_schedule: [2.5, 1.0]}\n")
        params = parse_params(doc)
        assert params.rrt_connect.edge_step == 0.1
        assert params.rrt_connect.step_eta == 0.7
        assert params.rrt_connect.max_iterations == 500
        assert params.ara_star.edge_step == 0.02
        assert params.ara_star.epsilon_schedule == (2.5, 1.0)

    @pytest.mark.parametrize("doc", [
        "unknown_top: 1\n",
        "common: {step: 0.1}\n",
        "rrt_connect: {eta: 0.5}\n",
        "ara_star: {schedule: [1.0]}\n",
    ])
    def test_unknown_keys_rejected(self, doc):
        with pytest.raises(ValidationError):
            parse_params(doc)

    def test_malformed_values_rejected(self):
        with pytest.raises(ValidationError):
            parse_params("ara_star: {epsilon_schedule: 3.0}\n")
        with pytest.raises(ValidationError):
            parse_params("rrt_connect: {step_eta: fast}\n")
        with pytest.raises(ValidationError):
            parse_params("ara_star: {epsilon_schedule: [1.0, 2.0]}\n")  # increasing

    def test_with_seed_replaces_both(self):
        params = PlannerParams().with_seed(123)
        assert params.rrt_connect.seed == 123
        assert params.ara_star.seed == 123
