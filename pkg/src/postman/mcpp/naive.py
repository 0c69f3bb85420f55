"""The per-element closed-walk solution: every count is at most m + 1."""

from __future__ import annotations

from collections import deque

from ..graph_core import MixedGraph, validate_mcpp_instance
from .solution import McppSolution


def shortest_return_path(g: MixedGraph, source: int,
                         target: int) -> list[tuple[int, bool]]:
    """BFS path as ``(element id, forward)`` steps; edges go either way.

    Neighbours are scanned in element-id order so the path is deterministic.
    """
    moves: dict[int, list[tuple[int, int, bool]]] = {
        v: [] for v in range(g.vertex_count)}
    for e in g.edges:
        moves[e.u].append((e.id, e.v, True))
        moves[e.v].append((e.id, e.u, False))
    for a in g.arcs:
        moves[a.tail].append((a.id, a.head, True))
    for v in moves:
        moves[v].sort()
    prev: dict[int, tuple[int, int, bool] | None] = {source: None}
    queue = deque([source])
    while queue and target not in prev:
        x = queue.popleft()
        for eid, y, fwd in moves[x]:
            if y not in prev:
                prev[y] = (x, eid, fwd)
                queue.append(y)
    path = []
    v = target
    while prev[v] is not None:
        x, eid, fwd = prev[v]
        path.append((eid, fwd))
        v = x
    path.reverse()
    return path


def naive_mcpp_solution(g: MixedGraph) -> McppSolution:
    """Union of one closed walk per element.

    An edge contributes one traversal each way. An arc contributes itself
    plus a shortest path back from its head to its tail.
    """
    validate_mcpp_instance(g)
    arcs = {a.id: 0 for a in g.arcs}
    edges = {e.id: [0, 0] for e in g.edges}
    for e in g.edges:
        edges[e.id][0] += 1
        edges[e.id][1] += 1
    for a in g.arcs:
        arcs[a.id] += 1
        for eid, fwd in shortest_return_path(g, a.head, a.tail):
            if eid in arcs:
                arcs[eid] += 1
            else:
                edges[eid][0 if fwd else 1] += 1
    return McppSolution(arcs, {k: tuple(v) for k, v in edges.items()})
