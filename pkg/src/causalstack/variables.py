"""Random-variable vocabulary, samples, datasets, and goal definitions.

An action is described by named random variables split into cause variables
(set by the agent, randomized during data collection) and effect variables
(measured outcomes). Success is defined by a goal: a subset of effect
variables together with the assignments of them that count as success.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
import pandas as pd

from .exceptions import OutOfRangeError

Value = float | bool
Sample = Mapping[str, Value]
# Discretized state per variable: interval index for continuous variables,
# 0/1 for booleans.
IntervalAssignment = Mapping[str, int]

CAUSE = "cause"
EFFECT = "effect"


@dataclass(frozen=True)
class VariableSpec:
    """One named random variable: its role and its value domain."""

    name: str
    role: str  # "cause" or "effect"
    kind: str  # "continuous" or "boolean"
    lower: float | None = None  # meters, continuous only
    upper: float | None = None

    def __post_init__(self):
        if self.role not in (CAUSE, EFFECT):
            raise ValueError(f"unknown role {self.role!r} for variable {self.name!r}")
        if self.kind == "continuous":
            if self.lower is None or self.upper is None:
                raise ValueError(f"continuous variable {self.name!r} needs bounds")
            if not self.lower < self.upper:
                raise ValueError(
                    f"variable {self.name!r}: lower {self.lower} must be < upper {self.upper}"
                )
        elif self.kind == "boolean":
            if self.lower is not None or self.upper is not None:
                raise ValueError(f"boolean variable {self.name!r} takes no bounds")
        else:
            raise ValueError(f"unknown kind {self.kind!r} for variable {self.name!r}")

    @property
    def is_continuous(self) -> bool:
        return self.kind == "continuous"

    def check_value(self, value: Value) -> Value:
        if self.is_continuous:
            v = float(value)
            if not (self.lower <= v <= self.upper):
                raise OutOfRangeError(
                    f"{self.name}={v} out of range [{self.lower}, {self.upper}]"
                )
            return v
        return bool(value)

    def to_json(self) -> dict:
        out: dict = {"name": self.name, "role": self.role, "kind": self.kind}
        if self.is_continuous:
            out["lower"] = self.lower
            out["upper"] = self.upper
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "VariableSpec":
        return cls(
            name=obj["name"],
            role=obj["role"],
            kind=obj["kind"],
            lower=obj.get("lower"),
            upper=obj.get("upper"),
        )


class VariableSet:
    """Ordered collection of uniquely named variables."""

    def __init__(self, specs: Iterable[VariableSpec]):
        self._specs = tuple(specs)
        names = [s.name for s in self._specs]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        self._by_name = {s.name: s for s in self._specs}

    def __iter__(self) -> Iterator[VariableSpec]:
        return iter(self._specs)

    def __len__(self) -> int:
        return len(self._specs)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __getitem__(self, name: str) -> VariableSpec:
        return self._by_name[name]

    def __eq__(self, other) -> bool:
        return isinstance(other, VariableSet) and self._specs == other._specs

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self._specs)

    @property
    def cause_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self._specs if s.role == CAUSE)

    @property
    def effect_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self._specs if s.role == EFFECT)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self._specs]

    @classmethod
    def from_json(cls, obj: Sequence[Mapping]) -> "VariableSet":
        return cls(VariableSpec.from_json(o) for o in obj)


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from: enough to regenerate it."""

    generator: str = "unknown"
    seed: int | None = None
    episodes: int | None = None


@dataclass(frozen=True)
class Dataset:
    """Tabular samples over one variable set, column-per-variable."""

    variables: VariableSet
    frame: pd.DataFrame
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        if tuple(self.frame.columns) != self.variables.names:
            raise ValueError("dataset columns must match the variable set, in order")
        for spec in self.variables:
            col = self.frame[spec.name]
            if spec.is_continuous:
                if col.min() < spec.lower or col.max() > spec.upper:
                    raise OutOfRangeError(
                        f"column {spec.name} leaves range [{spec.lower}, {spec.upper}]"
                    )

    def __len__(self) -> int:
        return len(self.frame)

    def column(self, name: str) -> np.ndarray:
        return self.frame[name].to_numpy()

    def sample(self, i: int) -> dict[str, Value]:
        row = self.frame.iloc[i]
        return {
            s.name: (float(row[s.name]) if s.is_continuous else bool(row[s.name]))
            for s in self.variables
        }

    def write_csv(self, path) -> None:
        """Serialize: booleans as 0/1, floats with 8 decimal digits."""
        with open(path, "w", newline="") as fh:
            fh.write(",".join(self.variables.names) + "\n")
            cols = []
            for spec in self.variables:
                raw = self.frame[spec.name].to_numpy()
                if spec.is_continuous:
                    cols.append([f"{v:.8f}" for v in raw])
                else:
                    cols.append(["1" if v else "0" for v in raw])
            for row in zip(*cols):
                fh.write(",".join(row) + "\n")

    @classmethod
    def read_csv(cls, path, variables: VariableSet,
                 provenance: Provenance | None = None) -> "Dataset":
        frame = pd.read_csv(path)
        if tuple(frame.columns) != variables.names:
            raise ValueError(
                f"CSV columns {tuple(frame.columns)} do not match variables {variables.names}"
            )
        for spec in variables:
            if not spec.is_continuous:
                frame[spec.name] = frame[spec.name].astype(int).astype(bool)
            else:
                frame[spec.name] = frame[spec.name].astype(float)
        return cls(variables, frame, provenance or Provenance(generator=str(path)))


def check_sample(sample: Sample, variables: VariableSet) -> dict[str, Value]:
    """Validate completeness and ranges; returns a normalized copy."""
    out = {}
    for spec in variables:
        if spec.name not in sample:
            raise KeyError(f"sample is missing variable {spec.name!r}")
        out[spec.name] = spec.check_value(sample[spec.name])
    return out


def _as_state(value) -> int:
    """Normalize a goal-variable value (bool or state index) to an int state."""
    return int(value)


@dataclass(frozen=True)
class GoalSpec:
    """Goal variables, the assignments of them that count as success, and
    the probability threshold that separates predicted failure from success."""

    variables: tuple[str, ...]
    parametrizations: tuple[Mapping[str, int], ...]
    epsilon: float = 0.8

    def __post_init__(self):
        if not self.variables:
            raise ValueError("goal needs at least one variable")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        norm = []
        for p in self.parametrizations:
            if set(p) != set(self.variables):
                raise ValueError(
                    f"goal parametrization {dict(p)} must assign exactly {self.variables}"
                )
            norm.append({k: _as_state(v) for k, v in p.items()})
        object.__setattr__(self, "parametrizations", tuple(norm))

    def with_epsilon(self, epsilon: float) -> "GoalSpec":
        return GoalSpec(self.variables, self.parametrizations, epsilon)

    def to_json(self) -> dict:
        return {
            "goal_variables": list(self.variables),
            "parametrizations": [dict(p) for p in self.parametrizations],
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "GoalSpec":
        return cls(
            variables=tuple(obj["goal_variables"]),
            parametrizations=tuple(obj["parametrizations"]),
            epsilon=float(obj.get("epsilon", 0.8)),
        )

    @classmethod
    def load(cls, path) -> "GoalSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def is_success(assignment: Mapping[str, Value | int], goal: GoalSpec) -> bool:
    """True iff the assignment restricted to the goal variables is one of
    the goal parametrizations. Accepts raw samples or interval assignments;
    values of variables outside the goal are ignored."""
    try:
        restricted = {g: _as_state(assignment[g]) for g in goal.variables}
    except KeyError as err:
        raise KeyError(f"assignment is missing goal variable {err.args[0]!r}") from None
    return any(restricted == dict(p) for p in goal.parametrizations)
