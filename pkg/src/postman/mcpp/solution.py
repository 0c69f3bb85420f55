"""Traversal-count certificates for MCPP and closed-walk extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import networkx as nx

from ..graph_core import Edge, InstanceError, MixedGraph, Verdict


@dataclass(frozen=True)
class McppSolution:
    """How often each element is traversed.

    ``arc_counts[id]`` for arcs; ``edge_counts[id] = (fwd, bwd)`` for edges,
    where fwd means from the edge's stored ``u`` to ``v``.
    """

    arc_counts: Mapping[int, int] = field(default_factory=dict)
    edge_counts: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "arc_counts", dict(sorted(
            (int(k), int(v)) for k, v in self.arc_counts.items())))
        object.__setattr__(self, "edge_counts", dict(sorted(
            (int(k), (int(v[0]), int(v[1])))
            for k, v in self.edge_counts.items())))

    def weight(self, g: MixedGraph) -> int:
        w = 0
        for aid, c in self.arc_counts.items():
            w += g.element(aid).weight * c
        for eid, (f, b) in self.edge_counts.items():
            w += g.element(eid).weight * (f + b)
        return w

    def total(self, element_id: int) -> int:
        if element_id in self.arc_counts:
            return self.arc_counts[element_id]
        f, b = self.edge_counts.get(element_id, (0, 0))
        return f + b

    def traversals(self, g: MixedGraph) -> list[tuple[int, int, int, bool]]:
        """Each traversal as ``(element id, tail, head, forward)``."""
        out = []
        for aid, c in self.arc_counts.items():
            a = g.element(aid)
            out += [(aid, a.tail, a.head, True)] * c
        for eid, (f, b) in self.edge_counts.items():
            e = g.element(eid)
            out += [(eid, e.u, e.v, True)] * f
            out += [(eid, e.v, e.u, False)] * b
        return out

    def to_json(self) -> dict:
        return {
            "arcs": {str(k): v for k, v in self.arc_counts.items()},
            "edges": {str(k): list(v) for k, v in self.edge_counts.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "McppSolution":
        return cls({int(k): v for k, v in data.get("arcs", {}).items()},
                   {int(k): tuple(v) for k, v in data.get("edges", {}).items()})


def _uses_known_ids(g: MixedGraph, sol: McppSolution) -> str | None:
    for aid in sol.arc_counts:
        if aid not in g._by_id or isinstance(g.element(aid), Edge):
            return f"arc count for non-arc {aid}"
    for eid in sol.edge_counts:
        if eid not in g._by_id or not isinstance(g.element(eid), Edge):
            return f"edge count for non-edge {eid}"
    return None


def verify_mcpp_solution(g: MixedGraph, sol: McppSolution) -> Verdict:
    """Coverage, balance and support connectivity; ``weight`` on success."""
    bad = _uses_known_ids(g, sol)
    if bad:
        return Verdict(False, bad)
    for a in g.arcs:
        c = sol.arc_counts.get(a.id, 0)
        if c < 1:
            return Verdict(False, "arc not covered", a.id)
    for e in g.edges:
        f, b = sol.edge_counts.get(e.id, (0, 0))
        if f < 0 or b < 0:
            return Verdict(False, "negative traversal count", e.id)
        if f + b < 1:
            return Verdict(False, "edge not covered", e.id)
    bal = [0] * g.vertex_count
    parent = list(range(g.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touched: set[int] = set()
    for _, t, h, _ in sol.traversals(g):
        bal[t] += 1
        bal[h] -= 1
        touched.update((t, h))
        parent[find(t)] = find(h)
    for v, b in enumerate(bal):
        if b:
            return Verdict(False, "unbalanced", v)
    if len({find(v) for v in touched}) > 1:
        return Verdict(False, "support is disconnected")
    return Verdict(True, weight=sol.weight(g))


@dataclass(frozen=True)
class ClosedWalk:
    """``steps[i] = (element id, forward)``; the walk starts at ``start``."""

    start: int
    steps: tuple[tuple[int, bool], ...]

    def vertices(self, g: MixedGraph) -> list[int]:
        out = [self.start]
        for eid, fwd in self.steps:
            el = g.element(eid)
            if isinstance(el, Edge):
                t, h = (el.u, el.v) if fwd else (el.v, el.u)
            else:
                t, h = el.tail, el.head
            if t != out[-1]:
                raise InstanceError(f"walk breaks at element {eid}")
            out.append(h)
        return out

    def to_solution(self, g: MixedGraph) -> McppSolution:
        arcs: dict[int, int] = {}
        edges: dict[int, list[int]] = {}
        for eid, fwd in self.steps:
            if isinstance(g.element(eid), Edge):
                edges.setdefault(eid, [0, 0])[0 if fwd else 1] += 1
            else:
                arcs[eid] = arcs.get(eid, 0) + 1
        return McppSolution(arcs, {k: tuple(v) for k, v in edges.items()})

    def to_json(self) -> list:
        return [[eid, "+" if fwd else "-"] for eid, fwd in self.steps]


def extract_closed_walk(g: MixedGraph, sol: McppSolution) -> ClosedWalk:
    """Eulerian circuit through the traversal multiset."""
    verdict = verify_mcpp_solution(g, sol)
    if not verdict:
        raise InstanceError(f"not a valid solution: {verdict.reason}")
    walk = nx.MultiDiGraph()
    steps = []
    for eid, t, h, fwd in sol.traversals(g):
        walk.add_edge(t, h, key=len(steps))
        steps.append((eid, fwd))
    if not steps:
        return ClosedWalk(0, ())
    start = min(walk.nodes)
    circuit = nx.eulerian_circuit(walk, source=start, keys=True)
    return ClosedWalk(start, tuple(steps[k] for _, _, k in circuit))


def normalize_solution(g: MixedGraph, sol: McppSolution) -> McppSolution:
    """Remove opposite traversal pairs from edges used in both directions.

    Afterwards an edge is either used one way only or exactly once each way.
    """
    verdict = verify_mcpp_solution(g, sol)
    if not verdict:
        raise InstanceError(f"not a valid solution: {verdict.reason}")
    edges = {}
    for eid, (f, b) in sol.edge_counts.items():
        if f >= 1 and b >= 1:
            # removing an opposite pair keeps balance, coverage and support
            k = f - 1 if f == b else min(f, b)
            f, b = f - k, b - k
        edges[eid] = (f, b)
    out = McppSolution(sol.arc_counts, edges)
    assert verify_mcpp_solution(g, out)
    return out


def is_normalized(sol: McppSolution) -> bool:
    return all(not (f >= 1 and b >= 1) or (f, b) == (1, 1)
               for f, b in sol.edge_counts.values())

