"""Breadth-first search for the closest successful interval assignment.

From a failing assignment, states are expanded by moving one cause variable
to an adjacent interval per step, so BFS depth equals the lattice distance
(sum of absolute interval-index differences). The first expanded state whose
predicted success exceeds the goal threshold is returned together with a
contrastive explanation of what had to change.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Sequence

from .discretize import IntervalScheme
from .exceptions import NoSuccessStateError
from .inference import success_probability
from .parameters import CausalModel
from .variables import EFFECT, GoalSpec, IntervalAssignment


@dataclass(frozen=True)
class TransitionModel:
    """One-step neighborhood of the interval lattice over given cause
    variables: per step, one variable moves to an adjacent interval."""

    variables: tuple[str, ...]
    cardinalities: tuple[int, ...]

    def children_states(self, states: tuple[int, ...]):
        for i, (state, card) in enumerate(zip(states, self.cardinalities)):
            if state > 0:
                yield states[:i] + (state - 1,) + states[i + 1:]
            if state < card - 1:
                yield states[:i] + (state + 1,) + states[i + 1:]

    def children(self, assignment: IntervalAssignment) -> list[dict[str, int]]:
        states = tuple(assignment[v] for v in self.variables)
        return [dict(zip(self.variables, c)) for c in self.children_states(states)]


def generate_transitions(scheme: IntervalScheme,
                         cause_vars: Sequence[str]) -> TransitionModel:
    variables = tuple(cause_vars)
    for name in variables:
        if scheme.variables[name].role == EFFECT:
            raise ValueError(f"effect variable {name!r} cannot be transitioned")
    return TransitionModel(
        variables=variables,
        cardinalities=tuple(scheme.n_states(v) for v in variables),
    )


@dataclass(frozen=True)
class CorrectionResult:
    """Closest predicted-successful assignment and how it differs from the
    failing one."""

    solution: dict[str, int]
    probability: float
    depth: int
    changed: tuple[tuple[str, int, int], ...]  # (variable, from, to)
    explanation: str


_OFFSET_NAME = re.compile(r"^(xOff|yOff|dropOff)(\d+)$")


def _direction_hint(name: str, from_state: int, to_state: int) -> str | None:
    m = _OFFSET_NAME.match(name)
    if not m:
        return None
    axis, cube = m.group(1), m.group(2)
    decreased = to_state < from_state
    if axis == "xOff":
        return f"cube {cube} was stacked too far to the {'right' if decreased else 'left'}"
    if axis == "yOff":
        return f"cube {cube} was stacked too far to the {'front' if decreased else 'back'}"
    return f"cube {cube} was dropped from too {'high' if decreased else 'low'}"


def render_explanation(result: CorrectionResult, scheme: IntervalScheme) -> str:
    """One contrastive sentence per changed variable: the failing interval
    against the corrective one."""
    if not result.changed:
        return "no correction required"
    sentences = []
    for name, from_state, to_state in result.changed:
        contrast = (
            f"{name}={scheme.state_label(name, from_state)} instead of "
            f"{name}={scheme.state_label(name, to_state)}"
        )
        hint = _direction_hint(name, from_state, to_state)
        if hint:
            sentences.append(f"Failure expected because {contrast}: {hint}.")
        else:
            sentences.append(f"Failure expected because {contrast}.")
    return " ".join(sentences)


def closest_success(failure: IntervalAssignment, model: CausalModel,
                    goal: GoalSpec, *,
                    transition_variables: Sequence[str] | None = None,
                    extra_evidence: Mapping[str, int] | None = None,
                    predictor: Callable[[dict[str, int]], float] | None = None,
                    **infer_kwargs) -> CorrectionResult:
    """BFS from the failing assignment to the nearest assignment whose
    predicted success exceeds the goal threshold.

    By default all cause variables are transitionable; the harness narrows
    `transition_variables` to the not-yet-executed ones and freezes executed
    history in `extra_evidence`. The failing root itself is never tested;
    callers decide whether a correction is needed before searching.
    """
    variables = tuple(transition_variables or model.variables.cause_names)
    missing = [v for v in variables if v not in failure]
    if missing:
        raise ValueError(f"failing assignment is missing {missing}")
    transitions = generate_transitions(model.scheme, variables)
    frozen = {k: v for k, v in failure.items() if k not in variables}
    frozen.update(extra_evidence or {})

    def probability(states: tuple[int, ...]) -> float:
        assignment = dict(zip(variables, states))
        assignment.update(frozen)
        if predictor is not None:
            return predictor(assignment)
        return success_probability(model, assignment, goal, **infer_kwargs)

    root = tuple(failure[v] for v in variables)
    queue: deque[tuple[tuple[int, ...], int]] = deque([(root, 0)])
    seen = {root}
    while queue:
        node, depth = queue.popleft()
        for child in transitions.children_states(node):
            if child in seen:
                continue
            seen.add(child)
            p = probability(child)
            if p > goal.epsilon:
                changed = tuple(
                    (v, r, c) for v, r, c in zip(variables, root, child) if r != c
                )
                solution = dict(failure)
                solution.update(zip(variables, child))
                result = CorrectionResult(
                    solution=solution, probability=p, depth=depth + 1,
                    changed=changed, explanation="",
                )
                return replace(
                    result, explanation=render_explanation(result, model.scheme)
                )
            queue.append((child, depth + 1))
    raise NoSuccessStateError("no reachable success state")
