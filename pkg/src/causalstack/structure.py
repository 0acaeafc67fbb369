"""Constraint-based structure learning: order-independent skeleton search,
collider orientation, and orientation-rule closure.

The skeleton phase starts from the complete undirected graph and removes an
edge (x, y) at level l if some conditioning set of size l drawn from the
level-start adjacency snapshot renders x and y independent; snapshotting the
adjacencies per level is what makes the output invariant to variable order.
Unshielded triples x - z - y are oriented as colliders x -> z <- y when z is
outside the recorded separating set of (x, y), orientation rules are applied
to closure, and leftover undirected edges are resolved cause -> effect when
the variable roles disambiguate them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from .discretize import DiscreteData
from .independence import DEFAULT_ALPHA, DEFAULT_MAX_COND, ci_test
from .variables import CAUSE, EFFECT, VariableSet

log = logging.getLogger(__name__)


def _pair(x: str, y: str) -> tuple[str, str]:
    return (x, y) if x < y else (y, x)


@dataclass
class Dag:
    """Graph over named nodes with directed and (possibly) undirected edges.

    Fully directed graphs are proper DAGs; undirected leftovers from
    structure learning are kept separately and flagged in `warnings`.
    """

    nodes: tuple[str, ...]
    directed: set = field(default_factory=set)
    undirected: set = field(default_factory=set)
    sepsets: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        self.directed = {tuple(e) for e in self.directed}
        self.undirected = {_pair(*e) for e in self.undirected}
        declared = set(self.nodes)
        for u, v in list(self.directed) + list(self.undirected):
            if u == v:
                raise ValueError(f"self loop on {u!r}")
            if u not in declared or v not in declared:
                raise ValueError(f"edge ({u}, {v}) uses undeclared nodes")
        for u, v in self.directed:
            if (v, u) in self.directed or _pair(u, v) in self.undirected:
                raise ValueError(f"duplicate edge between {u} and {v}")
        cycle = self._find_cycle()
        if cycle:
            raise ValueError(f"directed cycle: {' -> '.join(cycle)}")

    def _find_cycle(self) -> list[str] | None:
        color = {n: 0 for n in self.nodes}
        children = {n: [] for n in self.nodes}
        for u, v in self.directed:
            children[u].append(v)
        path: list[str] = []

        def visit(n: str) -> list[str] | None:
            color[n] = 1
            path.append(n)
            for c in sorted(children[n]):
                if color[c] == 1:
                    return path[path.index(c):] + [c]
                if color[c] == 0:
                    found = visit(c)
                    if found:
                        return found
            color[n] = 2
            path.pop()
            return None

        for n in self.nodes:
            if color[n] == 0:
                found = visit(n)
                if found:
                    return found
        return None

    @property
    def is_fully_directed(self) -> bool:
        return not self.undirected

    def parents(self, node: str) -> tuple[str, ...]:
        order = {n: i for i, n in enumerate(self.nodes)}
        ps = [u for u, v in self.directed if v == node]
        return tuple(sorted(ps, key=order.__getitem__))

    def adjacent(self, node: str) -> set:
        out = set()
        for u, v in self.directed:
            if u == node:
                out.add(v)
            elif v == node:
                out.add(u)
        for u, v in self.undirected:
            if u == node:
                out.add(v)
            elif v == node:
                out.add(u)
        return out

    def topological_order(self) -> tuple[str, ...]:
        if not self.is_fully_directed:
            raise ValueError("graph is not fully directed")
        remaining = dict.fromkeys(self.nodes, 0)
        for _, v in self.directed:
            remaining[v] += 1
        order, ready = [], [n for n in self.nodes if remaining[n] == 0]
        while ready:
            n = ready.pop(0)
            order.append(n)
            for u, v in sorted(self.directed):
                if u == n:
                    remaining[v] -= 1
                    if remaining[v] == 0:
                        ready.append(v)
        return tuple(order)

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "directed": sorted(list(e) for e in self.directed),
            "undirected": sorted(list(e) for e in self.undirected),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Dag":
        return cls(
            nodes=tuple(obj["nodes"]),
            directed={tuple(e) for e in obj["directed"]},
            undirected={tuple(e) for e in obj.get("undirected", [])},
        )

    def to_dot(self) -> str:
        lines = ["digraph g {"]
        for n in self.nodes:
            lines.append(f'  "{n}";')
        for u, v in sorted(self.directed):
            lines.append(f'  "{u}" -> "{v}";')
        for u, v in sorted(self.undirected):
            lines.append(f'  "{u}" -> "{v}" [dir=none];')
        lines.append("}")
        return "\n".join(lines)


def _learn_skeleton(data: DiscreteData, alpha: float, max_cond_size: int,
                    forbidden: set | None = None):
    names = sorted(data.variables.names)
    adj = {n: {m for m in names if m != n} for n in names}
    sepsets: dict[tuple[str, str], frozenset] = {}
    for x, y in forbidden or ():
        adj[x].discard(y)
        adj[y].discard(x)
        sepsets[_pair(x, y)] = frozenset()
    tests = 0

    for level in range(max_cond_size + 1):
        snapshot = {n: sorted(adj[n]) for n in names}
        any_candidates = False
        for x, y in combinations(names, 2):
            if y not in adj[x]:
                continue
            separated = False
            for side, other in ((x, y), (y, x)):
                candidates = [z for z in snapshot[side] if z != other]
                if len(candidates) < level:
                    continue
                any_candidates = True
                for cond in combinations(candidates, level):
                    tests += 1
                    res = ci_test(data, x, y, cond, alpha, max_cond_size)
                    if res.independent:
                        sepsets[_pair(x, y)] = frozenset(cond)
                        separated = True
                        break
                if separated:
                    break
            if separated:
                adj[x].discard(y)
                adj[y].discard(x)
        if not any_candidates:
            break
    log.debug("skeleton finished after %d CI tests", tests)
    edges = {_pair(x, y) for x in names for y in adj[x] if x < y}
    return edges, sepsets


def _orient_colliders(nodes, edges, sepsets):
    adj = {n: set() for n in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    directed: set = set()
    undirected = set(edges)
    for z in sorted(nodes):
        for x, y in combinations(sorted(adj[z]), 2):
            if y in adj[x]:
                continue  # shielded
            if z in sepsets.get(_pair(x, y), frozenset()):
                continue
            for spoke in (x, y):
                if _pair(spoke, z) in undirected:
                    undirected.discard(_pair(spoke, z))
                    directed.add((spoke, z))
                # already oriented the other way by a conflicting collider:
                # keep the first orientation, deterministically
    return directed, undirected


def _closes_cycle(directed: set, u: str, v: str) -> bool:
    """Would adding u -> v create a directed cycle (i.e. v reaches u)?"""
    stack, seen = [v], set()
    while stack:
        n = stack.pop()
        if n == u:
            return True
        if n in seen:
            continue
        seen.add(n)
        stack.extend(b for a, b in directed if a == n)
    return False


def _apply_orientation_rules(nodes, directed: set, undirected: set):
    """Repeatedly apply the sound orientation rules until fixpoint.

    R1: a -> b, b - c, a and c nonadjacent        =>  b -> c
    R2: a -> b -> c, a - c                        =>  a -> c
    R3: a - b, a - c, a - d, c -> b, d -> b,
        c and d nonadjacent                       =>  a -> b
    Orientations that would close a directed cycle are skipped.
    """

    def adjacent(n):
        out = set()
        for a, b in directed:
            if a == n:
                out.add(b)
            elif b == n:
                out.add(a)
        for a, b in undirected:
            if a == n:
                out.add(b)
            elif b == n:
                out.add(a)
        return out

    def orient(u, v) -> bool:
        if _pair(u, v) not in undirected or _closes_cycle(directed, u, v):
            return False
        undirected.discard(_pair(u, v))
        directed.add((u, v))
        return True

    def rule_applies(u, v) -> bool:
        # R1
        if any((a, u) in directed and v not in adjacent(a)
               for a in adjacent(u)):
            return True
        # R2
        if any((u, m) in directed and (m, v) in directed
               for m in adjacent(u)):
            return True
        # R3
        mids = [m for m in sorted(adjacent(u))
                if _pair(u, m) in undirected and (m, v) in directed]
        return any(d not in adjacent(c) for c, d in combinations(mids, 2))

    changed = True
    while changed:
        changed = False
        for b, c in sorted(undirected):
            for u, v in ((b, c), (c, b)):
                if rule_applies(u, v) and orient(u, v):
                    changed = True
                    break
            if changed:
                break  # re-scan: the sorted snapshot is stale after a change
    return directed, undirected


def _orient_by_role(variables: VariableSet, directed: set, undirected: set):
    """Direct leftover cause - effect edges from the cause side; the
    experimenter knows which variables were randomized."""
    warnings = []
    for u, v in sorted(undirected):
        ru, rv = variables[u].role, variables[v].role
        if ru == CAUSE and rv == EFFECT:
            edge = (u, v)
        elif ru == EFFECT and rv == CAUSE:
            edge = (v, u)
        else:
            continue
        if _closes_cycle(directed, *edge):
            warnings.append(f"role orientation of {u} - {v} would close a cycle")
            continue
        undirected.discard(_pair(u, v))
        directed.add(edge)
    return directed, undirected, warnings


def pc_stable(data: DiscreteData, alpha: float = DEFAULT_ALPHA,
              max_cond_size: int = DEFAULT_MAX_COND,
              orient_by_role: bool = True,
              independent_causes: bool = False) -> Dag:
    """Learn a graph over the dataset's variables.

    Returns a fully directed graph when colliders, rule closure, and role
    orientation suffice; otherwise leftover edges are returned undirected
    and listed in `warnings` (more data or different bin counts may help).

    `independent_causes` encodes the randomized data-collection design as
    background knowledge: cause variables are drawn independently of each
    other, so cause - cause adjacencies are excluded up front (with empty
    separating sets). Without it, a spuriously retained cause - cause edge
    can never be removed at higher levels, because the only shared neighbor
    of two causes is their common effect and conditioning on a common
    effect induces dependence.
    """
    names = data.variables.names
    if len(names) < 2:
        raise ValueError("need at least two variables")
    if data.n_rows == 0:
        raise ValueError("no data")

    forbidden = set()
    if independent_causes:
        forbidden = {
            _pair(x, y) for x, y in combinations(data.variables.cause_names, 2)
        }
    edges, sepsets = _learn_skeleton(data, alpha, max_cond_size, forbidden)
    directed, undirected = _orient_colliders(names, edges, sepsets)
    directed, undirected = _apply_orientation_rules(names, directed, undirected)
    warnings: list[str] = []
    if orient_by_role:
        directed, undirected, warnings = _orient_by_role(
            data.variables, directed, undirected)
        if undirected:  # role orientations can enable further closure
            directed, undirected = _apply_orientation_rules(
                names, directed, undirected)
    for u, v in sorted(undirected):
        warnings.append(f"edge {u} - {v} left undirected")
    if warnings:
        log.warning("structure learning: %s", "; ".join(warnings))
    return Dag(
        nodes=names,
        directed=directed,
        undirected=undirected,
        sepsets={k: set(v) for k, v in sepsets.items()},
        warnings=tuple(warnings),
    )
