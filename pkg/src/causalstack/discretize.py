"""Quantile discretization of continuous variables into interval schemes.

Boundary convention: the first interval is closed on both ends, every later
interval is half-open (lo, hi], so the printed scheme for a 5-bin variable
reads [b0,b1], (b1,b2], ..., (b4,b5]. Outer boundaries are always the
variable's declared range limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .exceptions import DegenerateColumnError, OutOfRangeError
from .variables import Dataset, IntervalAssignment, Sample, VariableSet


@dataclass(frozen=True)
class Intervals:
    """Ordered, contiguous intervals covering one continuous variable's range."""

    boundaries: tuple[float, ...]

    def __post_init__(self):
        if len(self.boundaries) < 2:
            raise ValueError("need at least one interval")
        diffs = np.diff(self.boundaries)
        if not np.all(diffs > 0):
            raise ValueError(f"boundaries must be strictly increasing: {self.boundaries}")

    def __len__(self) -> int:
        return len(self.boundaries) - 1

    def bounds(self, index: int) -> tuple[float, float]:
        return self.boundaries[index], self.boundaries[index + 1]

    def index_of(self, value: float) -> int:
        lo, hi = self.boundaries[0], self.boundaries[-1]
        if not (lo <= value <= hi):
            raise OutOfRangeError(f"value {value} out of range [{lo}, {hi}]")
        # count interior boundaries strictly below the value
        return int(np.searchsorted(self.boundaries[1:-1], value, side="left"))

    def indices_of(self, values: np.ndarray) -> np.ndarray:
        lo, hi = self.boundaries[0], self.boundaries[-1]
        if values.size and (values.min() < lo or values.max() > hi):
            raise OutOfRangeError(f"values leave range [{lo}, {hi}]")
        return np.searchsorted(self.boundaries[1:-1], values, side="left").astype(np.int64)

    def midpoint(self, index: int) -> float:
        lo, hi = self.bounds(index)
        return (lo + hi) / 2.0

    def label(self, index: int) -> str:
        lo, hi = self.bounds(index)
        open_lo = "[" if index == 0 else "("
        return f"{open_lo}{lo:.4g}, {hi:.4g}]"


def quantile_discretize(data: Dataset, variable: str, bins: int) -> Intervals:
    """Equal-frequency intervals for one continuous variable.

    Interior boundaries are the empirical j/bins-quantiles of the column;
    outer boundaries are the declared range limits.
    """
    if variable not in data.variables:
        raise KeyError(f"unknown variable {variable!r}")
    spec = data.variables[variable]
    if not spec.is_continuous:
        raise ValueError(f"variable {variable!r} is not continuous")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if len(data) == 0:
        raise ValueError("dataset is empty")
    col = data.column(variable).astype(float)
    if np.unique(col).size < bins:
        raise DegenerateColumnError(
            f"degenerate column {variable!r}: fewer distinct values than {bins} bins"
        )
    interior = np.quantile(col, np.arange(1, bins) / bins) if bins > 1 else np.array([])
    boundaries = (float(spec.lower), *map(float, interior), float(spec.upper))
    if np.any(np.diff(boundaries) <= 0):
        raise DegenerateColumnError(
            f"degenerate column {variable!r}: quantile boundaries collide"
        )
    return Intervals(boundaries)


@dataclass(frozen=True)
class IntervalScheme:
    """Discretization of a whole variable set: intervals per continuous
    variable, the two states {False, True} per boolean variable."""

    variables: VariableSet
    intervals: Mapping[str, Intervals]

    def __post_init__(self):
        for spec in self.variables:
            if spec.is_continuous:
                iv = self.intervals.get(spec.name)
                if iv is None:
                    raise ValueError(f"no intervals for continuous variable {spec.name!r}")
                if iv.boundaries[0] != spec.lower or iv.boundaries[-1] != spec.upper:
                    raise ValueError(
                        f"intervals for {spec.name!r} must span its declared range"
                    )

    def n_states(self, name: str) -> int:
        return len(self.intervals[name]) if self.variables[name].is_continuous else 2

    def cardinalities(self, names=None) -> tuple[int, ...]:
        return tuple(self.n_states(n) for n in (names or self.variables.names))

    def state_label(self, name: str, state: int) -> str:
        if self.variables[name].is_continuous:
            return self.intervals[name].label(state)
        return "True" if state else "False"

    def midpoint(self, name: str, state: int) -> float:
        return self.intervals[name].midpoint(state)

    def to_json(self) -> dict:
        return {
            name: list(iv.boundaries) for name, iv in sorted(self.intervals.items())
        }

    @classmethod
    def from_json(cls, variables: VariableSet, obj: Mapping) -> "IntervalScheme":
        return cls(variables, {n: Intervals(tuple(b)) for n, b in obj.items()})


def fit_scheme(data: Dataset, bins: Mapping[str, int] | int) -> IntervalScheme:
    """Quantile-discretize every continuous variable; bins is a per-variable
    map or one count for all."""
    intervals = {}
    for spec in data.variables:
        if spec.is_continuous:
            b = bins if isinstance(bins, int) else bins[spec.name]
            intervals[spec.name] = quantile_discretize(data, spec.name, b)
    return IntervalScheme(data.variables, intervals)


def midpoint_of(interval: tuple[float, float]) -> float:
    """Middle value of a bounded interval."""
    lo, hi = interval
    return (lo + hi) / 2.0


def discretize_sample(sample: Sample, scheme: IntervalScheme) -> dict[str, int]:
    """Map every value in the sample to its interval index or boolean state.

    Variables absent from the scheme's variable set are rejected; values on
    the lower range bound fall in the first interval.
    """
    out = {}
    for name, value in sample.items():
        spec = scheme.variables[name]
        if spec.is_continuous:
            out[name] = scheme.intervals[name].index_of(float(value))
        else:
            out[name] = int(bool(value))
    return out


@dataclass(frozen=True)
class DiscreteData:
    """Column-wise integer view of a discretized dataset."""

    variables: VariableSet
    scheme: IntervalScheme
    columns: Mapping[str, np.ndarray] = field(repr=False)
    n_rows: int = 0

    def cardinality(self, name: str) -> int:
        return self.scheme.n_states(name)

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]


def discretize_dataset(data: Dataset, scheme: IntervalScheme) -> DiscreteData:
    columns = {}
    for spec in data.variables:
        raw = data.column(spec.name)
        if spec.is_continuous:
            columns[spec.name] = scheme.intervals[spec.name].indices_of(raw.astype(float))
        else:
            columns[spec.name] = raw.astype(bool).astype(np.int64)
    return DiscreteData(data.variables, scheme, columns, len(data))
