import numpy as np
import pandas as pd
import pytest

from causalstack.exceptions import OutOfRangeError
from causalstack.variables import (
    CAUSE, EFFECT, Dataset, GoalSpec, Provenance, VariableSet, VariableSpec,
    check_sample, is_success,
)


def e1_variables():
    return VariableSet([
        VariableSpec("xOff1", CAUSE, "continuous", -0.03, 0.03),
        VariableSpec("yOff1", CAUSE, "continuous", -0.03, 0.03),
        VariableSpec("dropOff1", CAUSE, "continuous", 0.005, 0.1),
        VariableSpec("onTop1", EFFECT, "boolean"),
    ])


class TestVariableSpec:
    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            VariableSpec("x", CAUSE, "continuous", 1.0, 0.0)

    def test_rejects_unknown_role(self):
        with pytest.raises(ValueError):
            VariableSpec("x", "treatment", "continuous", 0.0, 1.0)

    def test_boolean_takes_no_bounds(self):
        with pytest.raises(ValueError):
            VariableSpec("x", EFFECT, "boolean", 0.0, 1.0)

    def test_out_of_range_value(self):
        spec = VariableSpec("x", CAUSE, "continuous", 0.0, 1.0)
        with pytest.raises(OutOfRangeError, match="out of range"):
            spec.check_value(1.5)


class TestVariableSet:
    def test_unique_names_enforced(self):
        with pytest.raises(ValueError, match="unique"):
            VariableSet([
                VariableSpec("x", CAUSE, "continuous", 0.0, 1.0),
                VariableSpec("x", EFFECT, "boolean"),
            ])

    def test_role_partitions(self):
        vs = e1_variables()
        assert vs.cause_names == ("xOff1", "yOff1", "dropOff1")
        assert vs.effect_names == ("onTop1",)

    def test_json_round_trip(self):
        vs = e1_variables()
        assert VariableSet.from_json(vs.to_json()) == vs


class TestSample:
    def test_complete_sample_passes(self):
        vs = e1_variables()
        s = {"xOff1": 0.0, "yOff1": 0.01, "dropOff1": 0.05, "onTop1": True}
        assert check_sample(s, vs)["onTop1"] is True

    def test_missing_variable(self):
        with pytest.raises(KeyError):
            check_sample({"xOff1": 0.0}, e1_variables())

    def test_out_of_range(self):
        s = {"xOff1": 0.05, "yOff1": 0.0, "dropOff1": 0.05, "onTop1": False}
        with pytest.raises(OutOfRangeError):
            check_sample(s, e1_variables())


class TestGoalSpec:
    def test_epsilon_bounds(self):
        with pytest.raises(ValueError):
            GoalSpec(("onTop1",), ({"onTop1": True},), epsilon=1.0)

    def test_parametrization_must_cover_exactly(self):
        with pytest.raises(ValueError):
            GoalSpec(("onTop1", "onTop2"), ({"onTop1": True},))

    def test_needs_goal_variables(self):
        with pytest.raises(ValueError):
            GoalSpec((), ())

    def test_json_round_trip(self):
        g = GoalSpec(("onTop1",), ({"onTop1": True},), 0.8)
        assert GoalSpec.from_json(g.to_json()) == g


class TestIsSuccess:
    def test_single_stack_goal_met(self):
        goal = GoalSpec(("onTop1",), ({"onTop1": True},))
        assert is_success({"xOff1": 0.1, "onTop1": True}, goal)

    def test_single_stack_goal_missed(self):
        goal = GoalSpec(("onTop1",), ({"onTop1": True},))
        assert not is_success({"onTop1": False}, goal)

    def test_three_stack_goal_checks_only_final_flag(self):
        goal = GoalSpec(("onTop3",), ({"onTop3": True},))
        sample = {"onTop1": True, "onTop2": True, "onTop3": False}
        assert not is_success(sample, goal)

    def test_invariant_to_non_goal_variables(self):
        goal = GoalSpec(("onTop1",), ({"onTop1": True},))
        a = {"onTop1": True, "xOff1": -0.02}
        b = {"onTop1": True, "xOff1": 0.02, "extra": 7}
        assert is_success(a, goal) == is_success(b, goal)

    def test_accepts_interval_assignment_states(self):
        goal = GoalSpec(("onTop1",), ({"onTop1": True},))
        assert is_success({"onTop1": 1}, goal)
        assert not is_success({"onTop1": 0}, goal)

    def test_missing_goal_variable(self):
        goal = GoalSpec(("onTop1",), ({"onTop1": True},))
        with pytest.raises(KeyError, match="onTop1"):
            is_success({"xOff1": 0.0}, goal)


class TestDatasetCsv:
    def _dataset(self):
        vs = e1_variables()
        frame = pd.DataFrame({
            "xOff1": [0.001, -0.02],
            "yOff1": [0.0, 0.015],
            "dropOff1": [0.01, 0.09],
            "onTop1": [True, False],
        })
        return Dataset(vs, frame, Provenance("test", 0, 2))

    def test_round_trip(self, tmp_path):
        ds = self._dataset()
        path = tmp_path / "data.csv"
        ds.write_csv(path)
        back = Dataset.read_csv(path, ds.variables)
        assert np.allclose(back.frame["xOff1"], ds.frame["xOff1"])
        assert list(back.frame["onTop1"]) == [True, False]

    def test_booleans_serialized_as_bits(self, tmp_path):
        path = tmp_path / "data.csv"
        self._dataset().write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "xOff1,yOff1,dropOff1,onTop1"
        assert lines[1].endswith(",1")
        assert lines[2].endswith(",0")

    def test_floats_carry_enough_digits(self, tmp_path):
        path = tmp_path / "data.csv"
        self._dataset().write_csv(path)
        first = path.read_text().splitlines()[1].split(",")[0]
        assert len(first.split(".")[1]) >= 6

    def test_write_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        self._dataset().write_csv(a)
        self._dataset().write_csv(b)
        assert a.read_bytes() == b.read_bytes()

    def test_column_mismatch_rejected(self, tmp_path):
        ds = self._dataset()
        path = tmp_path / "data.csv"
        ds.write_csv(path)
        wrong = VariableSet([
            VariableSpec("xOff1", CAUSE, "continuous", -0.03, 0.03),
            VariableSpec("onTop1", EFFECT, "boolean"),
        ])
        with pytest.raises(ValueError, match="columns"):
            Dataset.read_csv(path, wrong)

    def test_dataset_validates_ranges(self):
        vs = e1_variables()
        frame = pd.DataFrame({
            "xOff1": [0.1], "yOff1": [0.0], "dropOff1": [0.01], "onTop1": [True],
        })
        with pytest.raises(OutOfRangeError):
            Dataset(vs, frame)
