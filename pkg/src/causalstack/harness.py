"""End-to-end experiment pipelines: train a model on randomized episodes,
then replay a paired test set with and without prospective corrections.

Both arms of a replay consume the episode's pre-drawn action and landing
noise (common random numbers), so outcome differences are attributable to
the corrections alone.
"""

from __future__ import annotations

import itertools
import json
import logging
import re
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .discretize import discretize_dataset, discretize_sample, fit_scheme
from .exceptions import NoSuccessStateError, StructureLearningError
from .inference import success_probability
from .parameters import CausalModel, fit_cpts
from .prevention import CORRECTED, PROCEED, precompute_corrections
from .search import closest_success
from .simulator import (
    SimConfig, StackAction, TowerState, _settle_with_noise, e1_config,
    e2_config, episode_draws, execute, run_episodes,
)
from .structure import pc_stable
from .variables import Dataset, GoalSpec, VariableSet

log = logging.getLogger(__name__)

E1_BINS = {"xOff1": 5, "yOff1": 5, "dropOff1": 3}
ONE_STACK_BINS = {"xOff1": 5, "yOff1": 5, "dropOff1": 3}
E2_BINS = {
    "xOff1": 5, "yOff1": 5, "xOff2": 5, "yOff2": 5,
    "xOff3": 3, "yOff3": 3,
    "dropOff1": 3, "dropOff2": 3, "dropOff3": 3,
}
MIN_E2_TRAIN = 100_000


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "e1"
    train_seed: int = 1
    test_seed: int = 2
    train_episodes: int | None = None  # default: 40,000 (e1) / 200,000 (e2)
    test_episodes: int = 40_000
    one_stack_subset: int = 40_000     # e2: rows used for the single-stack model
    alpha: float = 0.05
    iss: float = 1.0
    epsilon: float = 0.8
    noise_per_drop: float | None = None
    margin: float | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def from_json(cls, obj: Mapping) -> "ExperimentConfig":
        return cls(**{k: obj[k] for k in obj if k in cls.__dataclass_fields__})

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def sim_overrides(self) -> dict:
        out = {}
        if self.noise_per_drop is not None:
            out["noise_per_drop"] = self.noise_per_drop
        if self.margin is not None:
            out["margin"] = self.margin
        return out


@dataclass(frozen=True)
class EvaluationReport:
    """Measured statistics of one correction arm against the shared
    uncorrected baseline."""

    scenario: str
    arm: str
    episodes: int
    baseline_failure_rate: float
    corrected_failure_rate: float
    corrected_failure_fraction: float  # fraction of baseline failures removed
    baseline_per_stack: tuple[float, ...]  # share of failures per first-failed stack
    corrected_per_stack: tuple[float, ...]
    confusion: Mapping[str, Mapping[str, float]]
    runtime: Mapping[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "arm": self.arm,
            "episodes": self.episodes,
            "baseline_failure_rate": self.baseline_failure_rate,
            "corrected_failure_rate": self.corrected_failure_rate,
            "corrected_failure_fraction": self.corrected_failure_fraction,
            "baseline_per_stack": list(self.baseline_per_stack),
            "corrected_per_stack": list(self.corrected_per_stack),
            "confusion": {k: dict(v) for k, v in self.confusion.items()},
            "runtime": dict(self.runtime),
        }

    def render(self) -> str:
        lines = [
            f"{self.scenario} ({self.episodes} test episodes) — arm: {self.arm}",
            f"  {'case':24s} {'failure %':>10s} {'failures fixed':>15s}",
            f"  {'no correction':24s} {100 * self.baseline_failure_rate:10.1f} {'-':>15s}",
            f"  {self.arm:24s} {100 * self.corrected_failure_rate:10.1f} "
            f"{100 * self.corrected_failure_fraction:14.1f}%",
        ]
        if len(self.baseline_per_stack) > 1:
            base = " ".join(f"{100 * s:5.1f}" for s in self.baseline_per_stack)
            corr = " ".join(f"{100 * s:5.1f}" for s in self.corrected_per_stack)
            lines.append(f"  failure share per stack, baseline : {base}")
            lines.append(f"  failure share per stack, corrected: {corr}")
        lines.append("  confusion (percent of episodes):")
        lines.append(f"    {'':18s} {'pred. success':>14s} {'pred. failure':>14s}")
        for actual in ("actual_success", "actual_failure"):
            row = self.confusion[actual]
            lines.append(
                f"    {actual:18s} {row['predicted_success']:14.1f} "
                f"{row['predicted_failure']:14.1f}"
            )
        return "\n".join(lines)


def confusion_matrix(predictions: Sequence[bool],
                     actuals: Sequence[bool]) -> dict[str, dict[str, float]]:
    """2x2 percentages of the total, rows = actual, columns = predicted."""
    if len(predictions) != len(actuals):
        raise ValueError("predictions and actuals must align")
    n = len(predictions)
    if n == 0:
        raise ValueError("empty input")
    pred = np.asarray(predictions, dtype=bool)
    act = np.asarray(actuals, dtype=bool)
    pct = 100.0 / n
    return {
        "actual_success": {
            "predicted_success": float((act & pred).sum() * pct),
            "predicted_failure": float((act & ~pred).sum() * pct),
        },
        "actual_failure": {
            "predicted_success": float((~act & pred).sum() * pct),
            "predicted_failure": float((~act & ~pred).sum() * pct),
        },
    }


def cached_predictor(model: CausalModel, goal: GoalSpec,
                     **kw) -> Callable[[Mapping[str, int]], float]:
    """Memoized success-probability evaluator; queries repeat heavily across
    lattice sweeps and episode replays."""
    cache: dict = {}

    def predictor(assignment: Mapping[str, int]) -> float:
        key = tuple(sorted(assignment.items()))
        if key not in cache:
            cache[key] = success_probability(model, assignment, goal, **kw)
        return cache[key]

    return predictor


def required_edges(variables: VariableSet) -> set[tuple[str, str]]:
    """Edges the learned graph must contain for the pipeline to be usable:
    each cube's planar offsets into its outcome, and consecutive outcomes."""
    cubes = sorted(
        int(n[len("onTop"):]) for n in variables.effect_names if n.startswith("onTop")
    )
    need = set()
    for i in cubes:
        need.add((f"xOff{i}", f"onTop{i}"))
        need.add((f"yOff{i}", f"onTop{i}"))
        if i + 1 in cubes:
            need.add((f"onTop{i}", f"onTop{i + 1}"))
    return need


def learn_model(train: Dataset, bins: Mapping[str, int], *, alpha: float,
                iss: float, required: set | None = None,
                metadata: Mapping | None = None) -> CausalModel:
    scheme = fit_scheme(train, bins)
    discrete = discretize_dataset(train, scheme)
    dag = pc_stable(discrete, alpha=alpha, independent_causes=True)
    if required is not None:
        missing = sorted(required - dag.directed)
        if missing or not dag.is_fully_directed:
            raise StructureLearningError(
                f"learned graph unusable: missing={missing}, "
                f"undirected={sorted(dag.undirected)}, "
                f"directed={sorted(dag.directed)}; collect more samples or "
                f"adjust the bin counts"
            )
    meta = {"alpha": alpha}
    meta.update(metadata or {})
    return fit_cpts(discrete, dag, iss=iss, metadata=meta)


def _per_stack_shares(flag_matrix: np.ndarray) -> tuple[float, ...]:
    """Share of failed episodes whose first failure is stack 1, 2, ..."""
    n_cubes = flag_matrix.shape[1]
    failed = ~flag_matrix.all(axis=1)
    total = int(failed.sum())
    if total == 0:
        return tuple(0.0 for _ in range(n_cubes))
    first_fail = np.argmin(flag_matrix, axis=1)  # first False index
    return tuple(
        float(((first_fail == i) & failed).sum() / total) for i in range(n_cubes)
    )


def _e1_goal(epsilon: float) -> GoalSpec:
    return GoalSpec(("onTop1",), ({"onTop1": True},), epsilon)


def _e2_goal(epsilon: float) -> GoalSpec:
    return GoalSpec(("onTop3",), ({"onTop3": True},), epsilon)


def run_e1(config: ExperimentConfig | None = None) -> EvaluationReport:
    """Single-stack pipeline: train, precompute the correction lookup, then
    replay the paired test set uncorrected and corrected."""
    cfg = config or ExperimentConfig(experiment="e1")
    t0 = time.time()
    train_cfg = e1_config(
        episodes=cfg.train_episodes or 40_000, seed=cfg.train_seed,
        **cfg.sim_overrides(),
    )
    train = run_episodes(train_cfg)
    model = learn_model(
        train, E1_BINS, alpha=cfg.alpha, iss=cfg.iss,
        required={("xOff1", "onTop1"), ("yOff1", "onTop1"),
                  ("dropOff1", "onTop1")},
        metadata={"seed": cfg.train_seed, "generator": train.provenance.generator},
    )
    goal = _e1_goal(cfg.epsilon)
    predictor = cached_predictor(model, goal)
    table = precompute_corrections(model, goal, predictor=predictor)
    t_train = time.time() - t0

    test_cfg = e1_config(
        episodes=cfg.test_episodes, seed=cfg.test_seed, **cfg.sim_overrides(),
    )
    base_flags = np.empty((cfg.test_episodes, 1), dtype=bool)
    corr_flags = np.empty((cfg.test_episodes, 1), dtype=bool)
    predicted = np.empty(cfg.test_episodes, dtype=bool)
    for ep in range(cfg.test_episodes):
        draws = episode_draws(test_cfg, ep)
        action = draws.actions[0]
        base_flags[ep] = execute(draws.actions, draws.unit_noise, test_cfg)
        current = {"xOff1": action.x_off, "yOff1": action.y_off,
                   "dropOff1": action.drop_off}
        outcome = table.apply(current, model.scheme)
        predicted[ep] = outcome.decision == PROCEED
        corrected = StackAction(
            1, outcome.values["xOff1"], outcome.values["yOff1"],
            outcome.values["dropOff1"],
        )
        corr_flags[ep] = execute([corrected], draws.unit_noise, test_cfg)

    base_rate = float(1 - base_flags.all(axis=1).mean())
    corr_rate = float(1 - corr_flags.all(axis=1).mean())
    return EvaluationReport(
        scenario="single-stack",
        arm="1-stack model (uniform)",
        episodes=cfg.test_episodes,
        baseline_failure_rate=base_rate,
        corrected_failure_rate=corr_rate,
        corrected_failure_fraction=(base_rate - corr_rate) / base_rate
        if base_rate else 0.0,
        baseline_per_stack=_per_stack_shares(base_flags),
        corrected_per_stack=_per_stack_shares(corr_flags),
        confusion=confusion_matrix(predicted, base_flags[:, 0]),
        runtime={"train_seconds": round(t_train, 3),
                 "evaluate_seconds": round(time.time() - t0 - t_train, 3)},
    )


def _cube_vars(i: int) -> tuple[str, str, str]:
    return (f"xOff{i}", f"yOff{i}", f"dropOff{i}")


def _cube_index(variable: str) -> int:
    return int(re.search(r"(\d+)$", variable).group(1))


def _one_stack_view(train: Dataset, rows: int) -> Dataset:
    """First-stack columns of the first `rows` episodes, as a standalone
    single-cube dataset."""
    names = [*_cube_vars(1), "onTop1"]
    variables = VariableSet([train.variables[n] for n in names])
    frame = train.frame.loc[: rows - 1, names].reset_index(drop=True)
    return Dataset(variables, frame, replace(train.provenance, episodes=rows))


@dataclass(frozen=True)
class E2Models:
    one_stack: CausalModel
    three_stack: CausalModel
    goal_one: GoalSpec
    goal_three: GoalSpec


def train_e2_models(cfg: ExperimentConfig) -> E2Models:
    episodes = cfg.train_episodes or 200_000
    if episodes < MIN_E2_TRAIN:
        warnings.warn(
            f"three-stack training below {MIN_E2_TRAIN} episodes: structure "
            f"recovery degrades", stacklevel=2,
        )
    train_cfg = e2_config(episodes=episodes, seed=cfg.train_seed,
                          **cfg.sim_overrides())
    train = run_episodes(train_cfg)
    three = learn_model(
        train, E2_BINS, alpha=cfg.alpha, iss=cfg.iss,
        required=required_edges(train.variables),
        metadata={"seed": cfg.train_seed, "generator": train.provenance.generator},
    )
    subset = _one_stack_view(train, min(cfg.one_stack_subset, episodes))
    one = learn_model(
        subset, ONE_STACK_BINS, alpha=cfg.alpha, iss=cfg.iss,
        required={("xOff1", "onTop1"), ("yOff1", "onTop1")},
        metadata={"seed": cfg.train_seed,
                  "generator": f"{train.provenance.generator}-first-stack"},
    )
    return E2Models(
        one_stack=one, three_stack=three,
        goal_one=_e1_goal(cfg.epsilon), goal_three=_e2_goal(cfg.epsilon),
    )


def _replay_one_stack_arm(draws, table, scheme, test_cfg) -> tuple[bool, ...]:
    """Correct each cube independently through the single-stack lookup."""
    tower = TowerState()
    for idx, action in enumerate(draws.actions):
        current = {"xOff1": action.x_off, "yOff1": action.y_off,
                   "dropOff1": action.drop_off}
        out = table.apply(current, scheme)
        corrected = StackAction(
            action.cube, out.values["xOff1"], out.values["yOff1"],
            out.values["dropOff1"],
        )
        tower = _settle_with_noise(tower, corrected, draws.unit_noise[idx], test_cfg)
        if tower.failed:
            break
    flags = list(tower.on_top) + [False] * (len(draws.actions) - len(tower.on_top))
    return tuple(flags)


class PreventionCache:
    """Bin-level memo of prevention decisions: two states with identical
    interval assignments (and identical frozen evidence) share the same
    correction, only the concrete values of unchanged variables differ."""

    def __init__(self, model: CausalModel, goal: GoalSpec, predictor):
        self.model = model
        self.goal = goal
        self.predictor = predictor
        self._memo: dict = {}

    def apply(self, current: Mapping[str, float],
              transition_variables: Sequence[str],
              extra_evidence: Mapping[str, int]) -> dict[str, float]:
        assignment = discretize_sample(dict(current), self.model.scheme)
        key = (
            tuple(sorted(assignment.items())),
            tuple(sorted(extra_evidence.items())),
            tuple(transition_variables),
        )
        if key not in self._memo:
            evidence = dict(assignment)
            evidence.update(extra_evidence)
            p = self.predictor(evidence)
            if p >= self.goal.epsilon:
                self._memo[key] = ()
            else:
                try:
                    correction = closest_success(
                        assignment, self.model, self.goal,
                        transition_variables=transition_variables,
                        extra_evidence=extra_evidence,
                        predictor=self.predictor,
                    )
                    self._memo[key] = correction.changed
                except NoSuccessStateError:
                    # nothing reachable clears the threshold: proceed as is
                    self._memo[key] = ()
        values = dict(current)
        for name, _, to_state in self._memo[key]:
            values[name] = self.model.scheme.midpoint(name, to_state)
        return values


def _replay_three_stack_arm(draws, cache: PreventionCache,
                            test_cfg) -> tuple[bool, ...]:
    """Correct with the full-history model before every drop: executed cubes
    are frozen evidence, every not-yet-executed cube's variables are
    transitionable, so the whole remaining plan is repaired at once (and
    re-checked as outcomes realize)."""
    n = len(draws.actions)
    plan = {}
    for action in draws.actions:
        i = action.cube
        plan[f"xOff{i}"] = action.x_off
        plan[f"yOff{i}"] = action.y_off
        plan[f"dropOff{i}"] = action.drop_off
    tower = TowerState()
    history: dict[str, int] = {}
    for idx in range(n):
        i = idx + 1
        remaining_vars = [v for j in range(i, n + 1) for v in _cube_vars(j)]
        remaining = {v: plan[v] for v in remaining_vars}
        plan.update(cache.apply(remaining, remaining_vars, history))
        corrected = StackAction(
            i, plan[f"xOff{i}"], plan[f"yOff{i}"], plan[f"dropOff{i}"],
        )
        tower = _settle_with_noise(tower, corrected, draws.unit_noise[idx], test_cfg)
        history.update(discretize_sample(
            {v: plan[v] for v in _cube_vars(i)}, cache.model.scheme))
        history[f"onTop{i}"] = int(tower.on_top[-1])
        if tower.failed:
            break
    flags = list(tower.on_top) + [False] * (n - len(tower.on_top))
    return tuple(flags)


def run_e2(config: ExperimentConfig | None = None,
           models: E2Models | None = None) -> tuple[EvaluationReport, EvaluationReport]:
    """Three-stack pipeline: one report for the per-cube arm (no history),
    one for the full-history arm, against the shared baseline."""
    cfg = config or ExperimentConfig(experiment="e2")
    t0 = time.time()
    if models is None:
        models = train_e2_models(cfg)
    t_train = time.time() - t0

    pred_one = cached_predictor(models.one_stack, models.goal_one)
    table_one = precompute_corrections(
        models.one_stack, models.goal_one, predictor=pred_one)
    pred_three = cached_predictor(models.three_stack, models.goal_three)
    cache_three = PreventionCache(models.three_stack, models.goal_three, pred_three)

    test_cfg = e2_config(episodes=cfg.test_episodes, seed=cfg.test_seed,
                         **cfg.sim_overrides())
    n, cubes = cfg.test_episodes, test_cfg.cubes
    base = np.empty((n, cubes), dtype=bool)
    arm_one = np.empty((n, cubes), dtype=bool)
    arm_three = np.empty((n, cubes), dtype=bool)
    predicted_one = np.empty(n, dtype=bool)
    predicted_three = np.empty(n, dtype=bool)

    for ep in range(n):
        draws = episode_draws(test_cfg, ep)
        base[ep] = execute(draws.actions, draws.unit_noise, test_cfg)
        # pre-execution predictions on the uncorrected plan
        per_cube_ok = True
        for action in draws.actions:
            state = discretize_sample(
                {"xOff1": action.x_off, "yOff1": action.y_off,
                 "dropOff1": action.drop_off}, models.one_stack.scheme)
            if table_one.outcome(state).decision == CORRECTED:
                per_cube_ok = False
                break
        predicted_one[ep] = per_cube_ok
        full_state = {}
        for action in draws.actions:
            i = action.cube
            full_state.update({f"xOff{i}": action.x_off, f"yOff{i}": action.y_off,
                               f"dropOff{i}": action.drop_off})
        assignment = discretize_sample(full_state, models.three_stack.scheme)
        predicted_three[ep] = (
            pred_three(assignment) >= models.goal_three.epsilon
        )
        arm_one[ep] = _replay_one_stack_arm(
            draws, table_one, models.one_stack.scheme, test_cfg)
        arm_three[ep] = _replay_three_stack_arm(draws, cache_three, test_cfg)

    t_eval = time.time() - t0 - t_train
    base_rate = float(1 - base.all(axis=1).mean())
    reports = []
    for arm_name, flags, predicted in (
        ("1-stack model (gaussian)", arm_one, predicted_one),
        ("3-stack model (gaussian)", arm_three, predicted_three),
    ):
        rate = float(1 - flags.all(axis=1).mean())
        reports.append(EvaluationReport(
            scenario="three-stack",
            arm=arm_name,
            episodes=n,
            baseline_failure_rate=base_rate,
            corrected_failure_rate=rate,
            corrected_failure_fraction=(base_rate - rate) / base_rate
            if base_rate else 0.0,
            baseline_per_stack=_per_stack_shares(base),
            corrected_per_stack=_per_stack_shares(flags),
            confusion=confusion_matrix(predicted, base.all(axis=1)),
            runtime={"train_seconds": round(t_train, 3),
                     "evaluate_seconds": round(t_eval, 3)},
        ))
    return reports[0], reports[1]


TIMELY_SHIFTED_EXAMPLES = {
    "example_1": {
        "xOff1": 0.02, "yOff1": 0.0, "dropOff1": 0.01,
        "xOff2": 0.01, "yOff2": 0.0, "dropOff2": 0.01,
        "xOff3": 0.0, "yOff3": 0.0, "dropOff3": 0.01,
    },
    "example_2": {
        "xOff1": 0.01, "yOff1": -0.01, "dropOff1": 0.01,
        "xOff2": 0.01, "yOff2": -0.01, "dropOff2": 0.01,
        "xOff3": 0.01, "yOff3": -0.01, "dropOff3": 0.01,
    },
    "centered": {
        "xOff1": 0.0, "yOff1": 0.0, "dropOff1": 0.01,
        "xOff2": 0.0, "yOff2": 0.0, "dropOff2": 0.01,
        "xOff3": 0.0, "yOff3": 0.0, "dropOff3": 0.01,
    },
}


def simulated_success(values: Mapping[str, float], cfg: SimConfig,
                      episodes: int = 4000, seed: int = 9) -> float:
    """Monte-Carlo ground truth of a fixed plan under the surrogate physics."""
    actions = [
        StackAction(i, values[f"xOff{i}"], values[f"yOff{i}"], values[f"dropOff{i}"])
        for i in range(1, cfg.cubes + 1)
    ]
    rng = np.random.default_rng(seed)
    ok = 0
    for _ in range(episodes):
        noise = rng.normal(size=(cfg.cubes, 2))
        tower = TowerState()
        for idx, action in enumerate(actions):
            tower = _settle_with_noise(tower, action, noise[idx], cfg)
            if tower.failed:
                break
        ok += len(tower.on_top) == cfg.cubes and not tower.failed
    return ok / episodes


DEMO_TRAIN_EPISODES = 800_000


def demo_timely_shifted(config: ExperimentConfig | None = None,
                        models: E2Models | None = None) -> dict:
    """Replay the fixed demonstration plans through the per-cube and the
    full-history model.

    The interesting signature: a plan whose every individual stack looks
    fine to the single-stack model while the history model predicts failure
    and corrects an earlier cube. The default trains at the full reference
    scale (800k episodes): the graph then carries the long-range
    offset-to-later-outcome edges that let the correction reach back to
    cube 1; at desk scale (200k) those edges are not recovered and the
    correction settles for re-centering cube 3. Reported per example;
    `passed` flags state whether each expected signature held."""
    cfg = config or ExperimentConfig(
        experiment="e2", train_episodes=DEMO_TRAIN_EPISODES)
    if models is None:
        models = train_e2_models(cfg)
    sim_cfg = e2_config(episodes=1, seed=0, **cfg.sim_overrides())
    pred_three = cached_predictor(models.three_stack, models.goal_three)
    pred_one = cached_predictor(models.one_stack, models.goal_one)

    report: dict = {"epsilon": cfg.epsilon, "examples": {}}
    for name, values in TIMELY_SHIFTED_EXAMPLES.items():
        entry: dict = {"input": dict(values)}
        per_cube = []
        for i in (1, 2, 3):
            state = discretize_sample(
                {"xOff1": values[f"xOff{i}"], "yOff1": values[f"yOff{i}"],
                 "dropOff1": values[f"dropOff{i}"]}, models.one_stack.scheme)
            per_cube.append(pred_one(state))
        entry["one_stack_probabilities"] = per_cube
        assignment = discretize_sample(values, models.three_stack.scheme)
        p_full = pred_three(assignment)
        entry["three_stack_probability"] = p_full
        entry["simulated_success"] = simulated_success(values, sim_cfg)
        if p_full < cfg.epsilon:
            correction = closest_success(
                assignment, models.three_stack, models.goal_three,
                predictor=pred_three,
            )
            changed_cubes = sorted({_cube_index(v) for v, _, _ in correction.changed})
            entry["correction"] = {
                "solution": correction.solution,
                "probability": correction.probability,
                "depth": correction.depth,
                "changed": [list(c) for c in correction.changed],
                "changed_cubes": changed_cubes,
                "explanation": correction.explanation,
            }
        else:
            entry["correction"] = None
        report["examples"][name] = entry

    ex1 = report["examples"]["example_1"]
    ex2 = report["examples"]["example_2"]
    ex0 = report["examples"]["centered"]
    eps = cfg.epsilon
    report["passed"] = {
        "example_1_corrects_cube_1": bool(
            ex1["correction"] is not None
            and 1 in ex1["correction"]["changed_cubes"]
        ),
        "example_2_per_cube_all_pass": bool(
            min(ex2["one_stack_probabilities"]) >= eps
        ),
        "example_2_history_model_flags": bool(
            ex2["three_stack_probability"] < eps
        ),
        "example_2_corrects_earlier_cube": bool(
            ex2["correction"] is not None
            and min(ex2["correction"]["changed_cubes"]) < 3
        ),
        "centered_proceeds": bool(
            ex0["correction"] is None
            and min(ex0["one_stack_probabilities"]) >= eps
        ),
    }
    report["all_passed"] = all(report["passed"].values())
    if not report["all_passed"]:
        log.warning("timely-shifted demonstration signature not fully "
                    "reproduced: %s", report["passed"])
    return report


def heatmap_rows(model: CausalModel, goal: GoalSpec,
                 predictor: Callable | None = None) -> list[dict]:
    """Success probability for every cause-variable interval cell, plot-ready
    (interval indices plus midpoints per variable)."""
    predictor = predictor or cached_predictor(model, goal)
    variables = model.variables.cause_names
    rows = []
    for states in itertools.product(
        *(range(model.cardinality(v)) for v in variables)
    ):
        row: dict = {}
        for v, s in zip(variables, states):
            row[f"{v}_interval"] = s
            row[f"{v}_mid"] = model.scheme.midpoint(v, s)
        row["success_probability"] = predictor(dict(zip(variables, states)))
        rows.append(row)
    return rows


def write_heatmap_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        head = list(rows[0])
        fh.write(",".join(head) + "\n")
        for row in rows:
            cells = [
                f"{row[k]:.8f}" if isinstance(row[k], float) else str(row[k])
                for k in head
            ]
            fh.write(",".join(cells) + "\n")
