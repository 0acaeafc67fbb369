"""Structure learning against forward-sampling oracles from known graphs."""

import itertools

import numpy as np
import pytest

from causalstack.discretize import DiscreteData, IntervalScheme, Intervals
from causalstack.structure import Dag, pc_stable
from causalstack.variables import CAUSE, EFFECT, VariableSet, VariableSpec

from conftest import random_dag_model


def model_to_discrete(model, n, rng):
    """Forward-sample a known model into a DiscreteData (test oracle: direct
    ancestral sampling, no library code)."""
    cards = model.cards
    columns = {}
    for name in model.topological_order():
        cpt = model.cpts[name]
        if cpt.parents:
            idx = np.zeros(n, dtype=np.int64)
            for p in cpt.parents:
                idx = idx * cards[p] + columns[p]
            probs = cpt.table[idx]
        else:
            probs = np.tile(cpt.table[0], (n, 1))
        u = rng.random(n)
        columns[name] = np.minimum(
            (u[:, None] > probs.cumsum(axis=1)).sum(axis=1), cards[name] - 1
        )
    return DiscreteData(model.variables, model.scheme, columns, n)


def cpdag_of(dag: Dag):
    """Pattern of a DAG: skeleton, colliders, then sound closure rules.
    Written independently of the learner for use as the truth oracle."""
    directed = set()
    undirected = {tuple(sorted(e)) for e in dag.directed}
    adj = {n: dag.adjacent(n) for n in dag.nodes}
    parents = {n: set(dag.parents(n)) for n in dag.nodes}
    for z in dag.nodes:
        for x, y in itertools.combinations(sorted(parents[z]), 2):
            if y not in adj[x]:
                for s in (x, y):
                    if tuple(sorted((s, z))) in undirected:
                        undirected.discard(tuple(sorted((s, z))))
                        directed.add((s, z))
    changed = True
    while changed:
        changed = False
        for u, v in sorted(undirected):
            for a, b in ((u, v), (v, u)):
                r1 = any((c, a) in directed and b not in adj[c] for c in adj[a])
                r2 = any((a, c) in directed and (c, b) in directed for c in adj[a])
                mids = [c for c in adj[a]
                        if tuple(sorted((a, c))) in undirected and (c, b) in directed]
                r3 = any(d not in adj[c] for c, d in itertools.combinations(mids, 2))
                if r1 or r2 or r3:
                    undirected.discard(tuple(sorted((a, b))))
                    directed.add((a, b))
                    changed = True
                    break
            if changed:
                break
    return directed, undirected


def edge_types(directed, undirected, nodes):
    types = {}
    for x, y in itertools.combinations(sorted(nodes), 2):
        if (x, y) in directed:
            types[(x, y)] = ">"
        elif (y, x) in directed:
            types[(x, y)] = "<"
        elif tuple(sorted((x, y))) in undirected:
            types[(x, y)] = "-"
        else:
            types[(x, y)] = " "
    return types


def shd(got: Dag, want_directed, want_undirected) -> int:
    a = edge_types(got.directed, got.undirected, got.nodes)
    b = edge_types(want_directed, want_undirected, got.nodes)
    return sum(a[k] != b[k] for k in a)


def independent_data(rng, n=8000, k=4):
    names = [chr(ord("a") + i) for i in range(k)]
    variables = VariableSet(
        [VariableSpec(m, CAUSE, "continuous", 0.0, 1.0) for m in names]
    )
    scheme = IntervalScheme(variables, {
        m: Intervals((0.0, 0.5, 1.0)) for m in names
    })
    cols = {m: rng.integers(0, 2, n) for m in names}
    return DiscreteData(variables, scheme, cols, n)


class TestDag:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self loop"):
            Dag(nodes=("a", "b"), directed={("a", "a")})

    def test_rejects_cycle(self):
        with pytest.raises(ValueError, match="cycle"):
            Dag(nodes=("a", "b", "c"),
                directed={("a", "b"), ("b", "c"), ("c", "a")})

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValueError, match="duplicate"):
            Dag(nodes=("a", "b"), directed={("a", "b")}, undirected={("a", "b")})

    def test_rejects_undeclared_nodes(self):
        with pytest.raises(ValueError, match="undeclared"):
            Dag(nodes=("a",), directed={("a", "b")})

    def test_parents_follow_node_order(self):
        dag = Dag(nodes=("a", "b", "c"), directed={("b", "c"), ("a", "c")})
        assert dag.parents("c") == ("a", "b")

    def test_topological_order(self):
        dag = Dag(nodes=("a", "b", "c"), directed={("a", "b"), ("b", "c")})
        assert dag.topological_order() == ("a", "b", "c")

    def test_json_round_trip(self):
        dag = Dag(nodes=("a", "b", "c"), directed={("a", "c")},
                  undirected={("a", "b")})
        back = Dag.from_json(dag.to_json())
        assert back.directed == dag.directed
        assert back.undirected == dag.undirected

    def test_dot_export(self):
        dag = Dag(nodes=("a", "b"), directed={("a", "b")})
        assert '"a" -> "b";' in dag.to_dot()


class TestPcStable:
    def test_independent_variables_give_empty_graph(self):
        rng = np.random.default_rng(0)
        dag = pc_stable(independent_data(rng))
        assert not dag.directed and not dag.undirected

    def test_collider_recovered_and_oriented(self, rng_session):
        model = _collider_model()
        data = model_to_discrete(model, 10_000, np.random.default_rng(12))
        dag = pc_stable(data, orient_by_role=False)
        assert dag.directed == {("A", "ok"), ("B", "ok")}

    def test_column_order_invariance(self):
        model = _collider_model()
        data = model_to_discrete(model, 6_000, np.random.default_rng(3))
        permuted_vars = VariableSet([model.variables[n] for n in ("ok", "B", "A")])
        permuted = DiscreteData(
            permuted_vars, model.scheme,
            {n: data.column(n) for n in ("ok", "B", "A")}, data.n_rows,
        )
        a = pc_stable(data, orient_by_role=False)
        b = pc_stable(permuted, orient_by_role=False)
        assert a.directed == b.directed
        assert a.undirected == b.undirected

    def test_removed_edges_have_sepsets(self):
        rng = np.random.default_rng(4)
        dag = pc_stable(independent_data(rng))
        assert len(dag.sepsets) == 6  # every pair separated and recorded

    def test_random_dags_close_to_truth(self, rng_session):
        trials, close = 25, 0
        for t in range(trials):
            rng = np.random.default_rng(1000 + t)
            model = random_dag_model(rng)
            data = model_to_discrete(model, 10_000, rng)
            got = pc_stable(data, orient_by_role=False)
            want_d, want_u = cpdag_of(model.dag)
            close += shd(got, want_d, want_u) <= 1
            for u, v in got.directed:
                assert not _reachable(got.directed, v, u), "orientation cycle"
        assert close >= 0.8 * trials

    def test_role_orientation_resolves_cause_effect_ties(self):
        # two dependent variables with no collider to orient them: the
        # cause/effect roles decide
        rng = np.random.default_rng(8)
        n = 6000
        a = rng.integers(0, 2, n)
        z = (rng.random(n) < np.where(a == 1, 0.9, 0.2)).astype(np.int64)
        variables = VariableSet([
            VariableSpec("a", CAUSE, "continuous", 0.0, 1.0),
            VariableSpec("z", EFFECT, "boolean"),
        ])
        scheme = IntervalScheme(variables, {"a": Intervals((0.0, 0.5, 1.0))})
        data = DiscreteData(variables, scheme, {"a": a, "z": z}, n)
        dag = pc_stable(data)
        assert dag.directed == {("a", "z")}
        assert not dag.warnings

    def test_independent_causes_background_knowledge(self):
        rng = np.random.default_rng(21)
        n = 4000
        # heavily dependent pair of causes would normally create an edge;
        # the randomized-design knowledge forbids it
        a = rng.integers(0, 2, n)
        b = a.copy()
        variables = VariableSet([
            VariableSpec("a", CAUSE, "continuous", 0.0, 1.0),
            VariableSpec("b", CAUSE, "continuous", 0.0, 1.0),
        ])
        scheme = IntervalScheme(variables, {
            "a": Intervals((0.0, 0.5, 1.0)), "b": Intervals((0.0, 0.5, 1.0)),
        })
        data = DiscreteData(variables, scheme, {"a": a, "b": b}, n)
        assert pc_stable(data).undirected  # dependence honestly reported
        dag = pc_stable(data, independent_causes=True)
        assert not dag.directed and not dag.undirected

    def test_needs_two_variables(self):
        rng = np.random.default_rng(0)
        data = independent_data(rng, n=100, k=1)
        with pytest.raises(ValueError):
            pc_stable(data)


def _collider_model():
    from conftest import make_model

    # marginal and joint dependence of C on both causes (no pure parity:
    # a constraint-based learner cannot see interaction-only edges)
    return make_model([2, 2], [0.95, 0.6, 0.5, 0.05])


def _reachable(directed, start, target):
    stack, seen = [start], set()
    while stack:
        n = stack.pop()
        if n == target:
            return True
        if n in seen:
            continue
        seen.add(n)
        stack.extend(b for a, b in directed if a == n)
    return False
