"""Shared builders: tiny hand-specified models and random synthetic models
used as ground truth across the suite."""

import itertools

import numpy as np
import pytest

from causalstack.discretize import IntervalScheme, Intervals
from causalstack.parameters import CausalModel, Cpt
from causalstack.structure import Dag
from causalstack.variables import CAUSE, EFFECT, GoalSpec, VariableSet, VariableSpec


def make_model(cause_cards, effect_table, iss=1.0):
    """Model with continuous cause variables A, B, ... (unit range split
    into the given interval counts) all feeding one boolean effect 'ok'.

    effect_table maps each cause-state combination (row-major over the cause
    domains) to P(ok=True).
    """
    names = [chr(ord("A") + i) for i in range(len(cause_cards))]
    specs = [VariableSpec(n, CAUSE, "continuous", 0.0, 1.0) for n in names]
    specs.append(VariableSpec("ok", EFFECT, "boolean"))
    variables = VariableSet(specs)
    intervals = {
        n: Intervals(tuple(np.linspace(0.0, 1.0, card + 1)))
        for n, card in zip(names, cause_cards)
    }
    scheme = IntervalScheme(variables, intervals)
    dag = Dag(nodes=variables.names, directed={(n, "ok") for n in names})
    cpts = {
        n: Cpt(n, (), np.full((1, card), 1.0 / card))
        for n, card in zip(names, cause_cards)
    }
    rows = np.array([[1.0 - p, p] for p in effect_table])
    cpts["ok"] = Cpt("ok", tuple(names), rows)
    return CausalModel(variables, scheme, dag, cpts)


def random_model(rng, max_causes=4, max_intervals=5):
    """Random cause->effect model with a dense random success table."""
    n_causes = rng.integers(2, max_causes + 1)
    cards = [int(rng.integers(2, max_intervals + 1)) for _ in range(n_causes)]
    n_rows = int(np.prod(cards))
    table = rng.uniform(0.01, 0.99, size=n_rows)
    return make_model(cards, table)


def goal_ok(epsilon=0.8):
    return GoalSpec(("ok",), ({"ok": True},), epsilon)


def random_dag_model(rng, n_nodes=5, edge_prob=0.4, max_card=3):
    """Random DAG over boolean/ternary variables with random CPTs, for
    structure- and inference-oracle tests. Returns a CausalModel."""
    names = [chr(ord("A") + i) for i in range(n_nodes)]
    specs = [VariableSpec(n, CAUSE, "continuous", 0.0, 1.0) for n in names]
    variables = VariableSet(specs)
    cards = {n: int(rng.integers(2, max_card + 1)) for n in names}
    edges = set()
    for i, j in itertools.combinations(range(n_nodes), 2):
        if rng.random() < edge_prob:
            edges.add((names[i], names[j]))
    dag = Dag(nodes=variables.names, directed=edges)
    scheme = IntervalScheme(variables, {
        n: Intervals(tuple(np.linspace(0.0, 1.0, cards[n] + 1))) for n in names
    })
    cpts = {}
    for n in names:
        parents = dag.parents(n)
        q = int(np.prod([cards[p] for p in parents])) if parents else 1
        # skew rows hard so edges carry detectable signal
        raw = rng.dirichlet(np.full(cards[n], 0.35), size=q)
        table = np.clip(raw, 0.02, None)
        table /= table.sum(axis=1, keepdims=True)
        cpts[n] = Cpt(n, parents, table)
    return CausalModel(variables, scheme, dag, cpts)


@pytest.fixture(scope="session")
def rng_session():
    return np.random.default_rng(20240811)
