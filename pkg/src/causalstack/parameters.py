"""Conditional probability tables and the assembled causal model.

Each node's table is the posterior mean under a uniform Dirichlet prior
whose total weight (the equivalent sample size) is shared across the whole
table, so every entry is strictly positive and unobserved parent
configurations fall back to the uniform distribution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .discretize import DiscreteData, IntervalScheme
from .structure import Dag
from .variables import VariableSet

DEFAULT_ISS = 1.0


@dataclass(frozen=True)
class Cpt:
    """P(child | parents) as a dense table: one row per parent configuration
    (mixed-radix over the parent domains, first parent most significant),
    one column per child state."""

    child: str
    parents: tuple[str, ...]
    table: np.ndarray = field(repr=False)
    iss: float = DEFAULT_ISS

    def __post_init__(self):
        if self.table.ndim != 2:
            raise ValueError("table must be two-dimensional")
        if not np.allclose(self.table.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError(f"CPT rows for {self.child!r} must sum to 1")
        if not np.all(self.table > 0):
            raise ValueError(f"CPT for {self.child!r} must be strictly positive")

    @property
    def n_rows(self) -> int:
        return self.table.shape[0]

    @property
    def n_states(self) -> int:
        return self.table.shape[1]

    def row_index(self, assignment: Mapping[str, int],
                  cards: Mapping[str, int]) -> int:
        idx = 0
        for p in self.parents:
            idx = idx * cards[p] + assignment[p]
        return idx


def parent_config_index(columns: Mapping[str, np.ndarray],
                        parents: tuple[str, ...],
                        cards: Mapping[str, int]) -> np.ndarray:
    idx = np.zeros(len(next(iter(columns.values()))) if columns else 0, dtype=np.int64)
    for p in parents:
        idx = idx * cards[p] + columns[p]
    return idx


@dataclass(frozen=True)
class CausalModel:
    """A learned network: variables, their discretization, the graph, and
    one conditional probability table per node."""

    variables: VariableSet
    scheme: IntervalScheme
    dag: Dag
    cpts: Mapping[str, Cpt]
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.dag.is_fully_directed:
            raise ValueError("model requires a fully directed graph")
        for name in self.variables.names:
            cpt = self.cpts.get(name)
            if cpt is None:
                raise ValueError(f"missing CPT for {name!r}")
            if cpt.parents != self.dag.parents(name):
                raise ValueError(f"CPT parents for {name!r} disagree with the graph")

    def cardinality(self, name: str) -> int:
        return self.scheme.n_states(name)

    @property
    def cards(self) -> dict[str, int]:
        return {n: self.cardinality(n) for n in self.variables.names}

    def topological_order(self) -> tuple[str, ...]:
        return self.dag.topological_order()

    def joint_size(self) -> int:
        size = 1
        for n in self.variables.names:
            size *= self.cardinality(n)
        return size

    def to_json(self) -> dict:
        return {
            "variables": self.variables.to_json(),
            "intervals": self.scheme.to_json(),
            "edges": self.dag.to_json(),
            "cpts": [
                {
                    "child": name,
                    "parents": list(self.cpts[name].parents),
                    "iss": self.cpts[name].iss,
                    "rows": self.cpts[name].table.tolist(),
                }
                for name in self.variables.names
            ],
            "metadata": dict(self.metadata),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def from_json(cls, obj: Mapping) -> "CausalModel":
        variables = VariableSet.from_json(obj["variables"])
        scheme = IntervalScheme.from_json(variables, obj["intervals"])
        dag = Dag.from_json(obj["edges"])
        cpts = {
            c["child"]: Cpt(
                child=c["child"],
                parents=tuple(c["parents"]),
                table=np.asarray(c["rows"], dtype=float),
                iss=float(c["iss"]),
            )
            for c in obj["cpts"]
        }
        return cls(variables, scheme, dag, cpts, dict(obj.get("metadata", {})))

    @classmethod
    def load(cls, path) -> "CausalModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def fit_cpt(data: DiscreteData, child: str, parents: tuple[str, ...],
            iss: float = DEFAULT_ISS) -> Cpt:
    cards = {n: data.cardinality(n) for n in (child, *parents)}
    r = cards[child]
    q = 1
    for p in parents:
        q *= cards[p]
    rows = parent_config_index(data.columns, parents, cards)
    flat = rows * r + data.column(child)
    counts = np.bincount(flat, minlength=q * r).reshape(q, r).astype(float)
    table = (counts + iss / (r * q)) / (counts.sum(axis=1, keepdims=True) + iss / q)
    return Cpt(child=child, parents=parents, table=table, iss=iss)


def fit_cpts(data: DiscreteData, dag: Dag, iss: float = DEFAULT_ISS,
             metadata: Mapping[str, object] | None = None) -> CausalModel:
    """Fit every node's table against its graph parents."""
    if not dag.is_fully_directed:
        raise ValueError("graph must be fully directed before fitting tables")
    cpts = {
        name: fit_cpt(data, name, dag.parents(name), iss)
        for name in data.variables.names
    }
    meta = {"samples": data.n_rows, "iss": iss}
    meta.update(metadata or {})
    return CausalModel(
        variables=data.variables,
        scheme=data.scheme,
        dag=dag,
        cpts=cpts,
        metadata=meta,
    )
