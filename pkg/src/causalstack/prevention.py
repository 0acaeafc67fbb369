"""Predict the success of a concrete parametrization and correct it when a
failure is expected.

When the predicted success probability of the discretized current state
falls below the goal threshold, the closest successful interval assignment
is searched for and materialized by replacing only the changed variables
with their interval midpoints; everything else keeps its current value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .discretize import discretize_sample
from .exceptions import StateSpaceCapError
from .inference import success_probability
from .parameters import CausalModel
from .search import CorrectionResult, closest_success
from .variables import GoalSpec, Sample, Value

PROCEED = "proceed"
CORRECTED = "corrected"
DEFAULT_LATTICE_CAP = 100_000


@dataclass(frozen=True)
class PreventionOutcome:
    decision: str  # "proceed" or "corrected"
    probability_before: float
    values: dict[str, Value]  # concrete parametrization to execute
    correction: CorrectionResult | None = None


def prevent(current: Sample, model: CausalModel, goal: GoalSpec, *,
            transition_variables: Sequence[str] | None = None,
            extra_evidence: Mapping[str, int] | None = None,
            predictor: Callable[[dict[str, int]], float] | None = None,
            **infer_kwargs) -> PreventionOutcome:
    """Proceed unchanged when the current state predicts success at or above
    the threshold; otherwise return the corrected parametrization built from
    the closest successful intervals."""
    variables = tuple(transition_variables or model.variables.cause_names)
    missing = [v for v in variables if v not in current]
    if missing:
        raise ValueError(f"current state is missing {missing}")
    assignment = discretize_sample(
        {v: current[v] for v in variables}, model.scheme
    )
    evidence = dict(assignment)
    evidence.update(extra_evidence or {})
    if predictor is not None:
        p = predictor(evidence)
    else:
        p = success_probability(model, evidence, goal, **infer_kwargs)
    if p >= goal.epsilon:
        return PreventionOutcome(PROCEED, p, {v: current[v] for v in variables})

    correction = closest_success(
        assignment, model, goal,
        transition_variables=variables,
        extra_evidence=extra_evidence,
        predictor=predictor,
        **infer_kwargs,
    )
    values = {v: current[v] for v in variables}
    for name, _, to_state in correction.changed:
        values[name] = model.scheme.midpoint(name, to_state)
    return PreventionOutcome(CORRECTED, p, values, correction)


@dataclass(frozen=True)
class CorrectionTable:
    """Exhaustive prevention decisions over the cause-variable lattice."""

    variables: tuple[str, ...]
    entries: Mapping[tuple[int, ...], PreventionOutcome]

    def outcome(self, assignment: Mapping[str, int]) -> PreventionOutcome:
        return self.entries[tuple(assignment[v] for v in self.variables)]

    def apply(self, current: Sample, scheme) -> PreventionOutcome:
        """Same semantics as `prevent` but answered from the table: changed
        variables move to their solution midpoints, the rest keep their
        current concrete values."""
        assignment = discretize_sample(
            {v: current[v] for v in self.variables}, scheme
        )
        entry = self.outcome(assignment)
        values = {v: current[v] for v in self.variables}
        if entry.correction is not None:
            for name, _, to_state in entry.correction.changed:
                values[name] = scheme.midpoint(name, to_state)
        return PreventionOutcome(
            entry.decision, entry.probability_before, values, entry.correction
        )

    def write_csv(self, path, scheme) -> None:
        with open(path, "w", newline="") as fh:
            head = list(self.variables) + [
                "decision", "probability", "solution", "depth", "changed"
            ]
            fh.write(",".join(head) + "\n")
            for states in sorted(self.entries):
                out = self.entries[states]
                if out.correction is None:
                    solution, depth, changed = "", "", ""
                else:
                    solution = " ".join(
                        str(out.correction.solution[v]) for v in self.variables
                    )
                    depth = str(out.correction.depth)
                    changed = " ".join(
                        f"{n}:{a}->{b}" for n, a, b in out.correction.changed
                    )
                row = [str(s) for s in states] + [
                    out.decision, f"{out.probability_before:.8f}",
                    solution, depth, changed,
                ]
                fh.write(",".join(row) + "\n")


def precompute_corrections(model: CausalModel, goal: GoalSpec, *,
                           cap: int = DEFAULT_LATTICE_CAP,
                           predictor: Callable[[dict[str, int]], float] | None = None,
                           **infer_kwargs) -> CorrectionTable:
    """Prevention decision for every cause-variable interval assignment.

    The corrected values in each entry are interval midpoints throughout
    (there is no concrete input to preserve); `prevent` remains the
    value-preserving path for live states.
    """
    variables = model.variables.cause_names
    cards = [model.cardinality(v) for v in variables]
    size = 1
    for c in cards:
        size *= c
    if size > cap:
        raise StateSpaceCapError(
            f"lattice size {size} exceeds cap {cap}; use prevent() on demand"
        )
    entries = {}
    for states in itertools.product(*(range(c) for c in cards)):
        midpoints = {
            v: model.scheme.midpoint(v, s) for v, s in zip(variables, states)
        }
        entries[states] = prevent(
            midpoints, model, goal, predictor=predictor, **infer_kwargs
        )
    return CorrectionTable(variables=variables, entries=entries)
