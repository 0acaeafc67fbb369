"""Probability queries on a causal model.

Two engines: forward sampling with rejection of evidence-inconsistent draws
(the general path), and exact enumeration of the joint factorization (used
automatically for small state spaces, and as the test oracle for the
sampler).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .exceptions import EvidenceStarvedError, StateSpaceCapError
from .parameters import CausalModel, parent_config_index
from .variables import GoalSpec, IntervalAssignment

DEFAULT_BUDGET = 100_000
DEFAULT_MIN_ACCEPTED = 100
DEFAULT_STATE_CAP = 10_000_000


@dataclass(frozen=True)
class Query:
    """P(any of `targets` | evidence). Targets are alternative assignments
    over one variable subset, disjoint from the evidence variables."""

    targets: tuple[Mapping[str, int], ...]
    evidence: Mapping[str, int] = field(default_factory=dict)
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not self.targets:
            raise ValueError("query needs at least one target assignment")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        for t in self.targets:
            overlap = set(t) & set(self.evidence)
            if overlap:
                raise ValueError(f"target and evidence overlap on {sorted(overlap)}")


@dataclass(frozen=True)
class SampleEstimate:
    probability: float
    accepted: int
    budget: int


def _forward_sample(model: CausalModel, budget: int,
                    rng: np.random.Generator) -> dict[str, np.ndarray]:
    cards = model.cards
    columns: dict[str, np.ndarray] = {}
    for name in model.topological_order():
        cpt = model.cpts[name]
        if cpt.parents:
            rows = parent_config_index(columns, cpt.parents, cards)
            probs = cpt.table[rows]
        else:
            probs = np.broadcast_to(cpt.table[0], (budget, cpt.n_states))
        u = rng.random(budget)
        states = (u[:, None] > np.cumsum(probs, axis=1)).sum(axis=1)
        columns[name] = np.minimum(states, cpt.n_states - 1)
    return columns


def _match(columns: Mapping[str, np.ndarray],
           assignment: Mapping[str, int]) -> np.ndarray:
    mask = np.ones(len(next(iter(columns.values()))), dtype=bool)
    for name, state in assignment.items():
        mask &= columns[name] == state
    return mask


def logic_sample(model: CausalModel, query: Query, seed: int = 0,
                 min_accepted: int = DEFAULT_MIN_ACCEPTED) -> SampleEstimate:
    """Estimate the query by forward sampling and rejecting draws that
    contradict the evidence. Deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    columns = _forward_sample(model, query.budget, rng)
    keep = _match(columns, query.evidence)
    accepted = int(keep.sum())
    if accepted < max(min_accepted, 1):
        raise EvidenceStarvedError(accepted, max(min_accepted, 1))
    hit = np.zeros(query.budget, dtype=bool)
    for t in query.targets:
        hit |= _match(columns, t)
    matches = int((hit & keep).sum())
    return SampleEstimate(matches / accepted, accepted, query.budget)


def _free_columns(model: CausalModel, free: Sequence[str]) -> dict[str, np.ndarray]:
    cards = [model.cardinality(n) for n in free]
    total = int(np.prod(cards)) if free else 1
    columns = {}
    stride = total
    for name, card in zip(free, cards):
        stride //= card
        columns[name] = (np.arange(total) // stride) % card
    return columns


def exact_infer(model: CausalModel, query: Query,
                cap: int = DEFAULT_STATE_CAP) -> float:
    """Exact P(targets | evidence) by enumerating the factorized joint over
    the unobserved variables."""
    if model.joint_size() > cap:
        raise StateSpaceCapError(
            f"state space {model.joint_size()} exceeds cap {cap}"
        )
    cards = model.cards
    free = [n for n in model.variables.names if n not in query.evidence]
    columns = _free_columns(model, free)
    total = len(next(iter(columns.values()))) if columns else 1

    def column(name: str) -> np.ndarray:
        if name in columns:
            return columns[name]
        return np.full(total, query.evidence[name])

    weights = np.ones(total)
    for name in model.variables.names:
        cpt = model.cpts[name]
        parent_cols = {p: column(p) for p in cpt.parents}
        rows = parent_config_index(parent_cols, cpt.parents, cards) \
            if cpt.parents else np.zeros(total, dtype=np.int64)
        weights = weights * cpt.table[rows, column(name)]

    hit = np.zeros(total, dtype=bool)
    for t in query.targets:
        hit |= _match(columns, t)
    return float(weights[hit].sum() / weights.sum())


def inference_method(model: CausalModel, cap: int = DEFAULT_STATE_CAP) -> str:
    return "exact" if model.joint_size() <= cap else "logic_sampling"


def success_probability(model: CausalModel, evidence: Mapping[str, int],
                        goal: GoalSpec, *, budget: int = DEFAULT_BUDGET,
                        seed: int = 0, cap: int = DEFAULT_STATE_CAP,
                        min_accepted: int = DEFAULT_MIN_ACCEPTED) -> float:
    """P(goal reached | evidence) for arbitrary evidence assignments."""
    evidence = {k: v for k, v in evidence.items() if k not in goal.variables}
    query = Query(targets=goal.parametrizations, evidence=evidence, budget=budget)
    if model.joint_size() <= cap:
        return exact_infer(model, query, cap)
    return logic_sample(model, query, seed, min_accepted).probability


def predict_success(model: CausalModel, assignment: IntervalAssignment,
                    goal: GoalSpec, **kwargs) -> float:
    """Success probability of a concrete (discretized) state: the assignment
    must cover every cause variable; goal variables are never evidence."""
    missing = [c for c in model.variables.cause_names if c not in assignment]
    if missing:
        raise ValueError(f"assignment is missing cause variables {missing}")
    return success_probability(model, assignment, goal, **kwargs)
