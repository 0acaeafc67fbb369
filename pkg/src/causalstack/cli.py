"""Command-line interface: simulate episodes, learn a model, query it,
correct states, and run the evaluation pipelines.

All outputs are deterministic for a fixed config and seed: JSON is written
with sorted keys, CSV cells with fixed formatting.
"""

from __future__ import annotations

import argparse
import json
import sys

from .discretize import discretize_sample
from .harness import (
    E1_BINS, E2_BINS, ExperimentConfig, cached_predictor, demo_timely_shifted,
    heatmap_rows, learn_model, required_edges, run_e1, run_e2,
    write_heatmap_csv,
)
from .inference import DEFAULT_BUDGET, inference_method, predict_success
from .parameters import CausalModel
from .prevention import prevent
from .search import closest_success
from .simulator import SimConfig, run_episodes, variable_set
from .variables import Dataset, GoalSpec


def _dump(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_state(path) -> dict:
    state = _load_json(path)
    return {k: (bool(v) if isinstance(v, bool) else float(v))
            for k, v in state.items()}


def cmd_simulate(args) -> int:
    config = SimConfig.load(args.config)
    dataset = run_episodes(config)
    dataset.write_csv(args.out)
    print(f"wrote {len(dataset)} episodes to {args.out}")
    return 0


def cmd_learn(args) -> int:
    config = SimConfig.load(args.sim_config) if args.sim_config else None
    if config is None:
        from .simulator import e1_config, e2_config

        config = e1_config() if args.experiment == "e1" else e2_config()
    variables = variable_set(config)
    data = Dataset.read_csv(args.data, variables)
    bins = E1_BINS if args.experiment == "e1" else E2_BINS
    required = required_edges(variables) if args.check_edges else None
    model = learn_model(
        data, bins, alpha=args.alpha, iss=args.iss, required=required,
        metadata={"source": str(args.data)},
    )
    model.save(args.out)
    print(f"wrote model ({len(model.dag.directed)} edges) to {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = CausalModel.load(args.model)
    goal = GoalSpec.load(args.goal)
    state = _load_state(args.state)
    assignment = discretize_sample(state, model.scheme)
    probability = predict_success(model, assignment, goal, seed=args.seed)
    _dump(
        {
            "probability": probability,
            "method": inference_method(model),
            "budget": DEFAULT_BUDGET,
        },
        args.out,
    )
    return 0


def cmd_explain(args) -> int:
    model = CausalModel.load(args.model)
    goal = GoalSpec.load(args.goal)
    state = _load_state(args.state)
    assignment = discretize_sample(state, model.scheme)
    probability = predict_success(model, assignment, goal, seed=args.seed)
    if probability >= goal.epsilon:
        _dump({"probability": probability, "explanation": "no correction required"},
              args.out)
        return 0
    result = closest_success(assignment, model, goal, seed=args.seed)
    _dump(
        {
            "probability": probability,
            "solution": result.solution,
            "solution_probability": result.probability,
            "depth": result.depth,
            "changed": [list(c) for c in result.changed],
            "explanation": result.explanation,
        },
        args.out,
    )
    if args.out:
        print(result.explanation)
    return 0


def cmd_prevent(args) -> int:
    model = CausalModel.load(args.model)
    goal = GoalSpec.load(args.goal)
    if args.epsilon is not None:
        goal = goal.with_epsilon(args.epsilon)
    state = _load_state(args.state)
    outcome = prevent(state, model, goal, seed=args.seed)
    payload = {
        "decision": outcome.decision,
        "probability_before": outcome.probability_before,
        "values": outcome.values,
    }
    if outcome.correction is not None:
        payload["correction"] = {
            "solution": outcome.correction.solution,
            "probability": outcome.correction.probability,
            "depth": outcome.correction.depth,
            "changed": [list(c) for c in outcome.correction.changed],
            "explanation": outcome.correction.explanation,
        }
    _dump(payload, args.out)
    return 0


def cmd_evaluate(args) -> int:
    config = (ExperimentConfig.load(args.config) if args.config
              else ExperimentConfig(experiment=args.pipeline))
    if args.pipeline == "e1":
        report = run_e1(config)
        _dump(report.to_json(), args.out)
        print(report.render())
    elif args.pipeline == "e2":
        one, three = run_e2(config)
        _dump({"arms": [one.to_json(), three.to_json()]}, args.out)
        print(one.render())
        print(three.render())
    else:
        report = demo_timely_shifted(config if args.config else None)
        _dump(report, args.out)
        print("timely-shifted demonstration:",
              "reproduced" if report["all_passed"] else "NOT reproduced")
        for name, ok in report["passed"].items():
            print(f"  {name}: {'ok' if ok else 'FAILED'}")
    return 0


def cmd_export_heatmap(args) -> int:
    model = CausalModel.load(args.model)
    goal = GoalSpec.load(args.goal)
    rows = heatmap_rows(model, goal, cached_predictor(model, goal))
    write_heatmap_csv(rows, args.out)
    print(f"wrote {len(rows)} grid cells to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalstack",
        description="Learn causal models of action outcomes; predict, "
                    "explain, and prevent execution failures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate stacking episodes to CSV")
    p.add_argument("--config", required=True, help="SimConfig JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("learn", help="fit a causal model from episode CSV")
    p.add_argument("--data", required=True, help="episode CSV")
    p.add_argument("--experiment", choices=["e1", "e2"], required=True)
    p.add_argument("--sim-config", help="SimConfig JSON matching the data")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--iss", type=float, default=1.0)
    p.add_argument("--check-edges", action="store_true",
                   help="fail if the expected experiment edges are missing")
    p.add_argument("--out", required=True, help="output model JSON")
    p.set_defaults(func=cmd_learn)

    for name, func in (("predict", cmd_predict), ("explain", cmd_explain),
                       ("prevent", cmd_prevent)):
        p = sub.add_parser(name)
        p.add_argument("--model", required=True, help="model JSON")
        p.add_argument("--state", required=True, help="state JSON (variable -> value)")
        p.add_argument("--goal", required=True, help="goal JSON")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write JSON here instead of stdout")
        if name == "prevent":
            p.add_argument("--epsilon", type=float,
                           help="override the goal's success threshold")
        p.set_defaults(func=func)

    p = sub.add_parser("evaluate", help="run an experiment pipeline")
    p.add_argument("pipeline", choices=["e1", "e2", "demo"])
    p.add_argument("--config", help="ExperimentConfig JSON")
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-heatmap",
                       help="success probability per interval-grid cell")
    p.add_argument("--model", required=True)
    p.add_argument("--goal", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_heatmap)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
