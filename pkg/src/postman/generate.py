"""Seeded random instance generators for tests, benchmarks and ``gen``."""

from __future__ import annotations

import random
from typing import Optional

from .graph_core import (Arc, ColoredGraph, Edge, InstanceError, MixedGraph,
                         PbsArc, PbsInstance, is_strongly_connected,
                         underlying_graph)

MAX_TRIES = 10_000


def _rng(seed: Optional[int], rng: Optional[random.Random]) -> random.Random:
    return rng if rng is not None else random.Random(seed)


def random_mixed_graph(n: int, m: int, seed: Optional[int] = None,
                       rng: Optional[random.Random] = None,
                       edge_prob: float = 0.5,
                       simple: bool = False) -> MixedGraph:
    """Strongly connected mixed graph with ``n`` vertices and ``m`` elements.

    Draws uniformly random elements and rejects graphs that are not strongly
    connected. With ``simple`` at most one element joins any vertex pair.
    """
    r = _rng(seed, rng)
    if n < 1 or m < 0:
        raise InstanceError("need n >= 1 and m >= 0")
    if n > 1 and m < n - 1:
        raise InstanceError(f"{m} elements cannot connect {n} vertices")
    if simple and m > n * (n - 1) // 2:
        raise InstanceError("too many elements for a simple graph")
    if n == 1:
        if m:
            raise InstanceError("a single vertex admits no elements")
        return MixedGraph(1)
    for _ in range(MAX_TRIES):
        used: set[frozenset] = set()
        edges, arcs = [], []
        for i in range(m):
            while True:
                u, v = r.sample(range(n), 2)
                if not simple or frozenset((u, v)) not in used:
                    break
            used.add(frozenset((u, v)))
            if r.random() < edge_prob:
                edges.append(Edge(i, u, v))
            else:
                arcs.append(Arc(i, u, v))
        g = MixedGraph(n, tuple(edges), tuple(arcs))
        if is_strongly_connected(g):
            return g
    raise InstanceError(f"no strongly connected graph found for n={n} m={m}")


def random_restricted_pbs(n: int, arcs: int, seed: Optional[int] = None,
                          rng: Optional[random.Random] = None,
                          double_pairs: int = 1,
                          forbidden_pairs: int = 1) -> PbsInstance:
    """PBS instance obeying the FPT weight restriction.

    Double-pair arcs weigh 0, forbidden-pair arcs -1, every other arc +-1.
    ``arcs`` counts all arcs including those in pairs.
    """
    r = _rng(seed, rng)
    if 2 * (double_pairs + forbidden_pairs) > arcs or n < 2:
        raise InstanceError("not enough arcs or vertices for the pairs")
    out: list[PbsArc] = []
    dp, fp = [], []
    for _ in range(double_pairs):
        u, v = r.sample(range(n), 2)
        dp.append((len(out), len(out) + 1))
        out += [PbsArc(len(out), u, v, 0), PbsArc(len(out) + 1, u, v, 0)]
    for _ in range(forbidden_pairs):
        u, v = r.sample(range(n), 2)
        fp.append((len(out), len(out) + 1))
        out += [PbsArc(len(out), u, v, -1), PbsArc(len(out) + 1, v, u, -1)]
    while len(out) < arcs:
        u, v = r.sample(range(n), 2)
        out.append(PbsArc(len(out), u, v, r.choice((-1, 1, 1))))
    return PbsInstance(n, tuple(out), tuple(dp), tuple(fp))


def random_pbs(n: int, arcs: int, seed: Optional[int] = None,
               rng: Optional[random.Random] = None,
               weights: tuple[int, ...] = (-1, 0, 1),
               double_pairs: int = 0, forbidden_pairs: int = 0) -> PbsInstance:
    """PBS instance with arbitrary small weights, pairs included."""
    r = _rng(seed, rng)
    if 2 * (double_pairs + forbidden_pairs) > arcs or n < 2:
        raise InstanceError("not enough arcs or vertices for the pairs")
    out: list[PbsArc] = []
    dp, fp = [], []
    for _ in range(double_pairs):
        u, v = r.sample(range(n), 2)
        dp.append((len(out), len(out) + 1))
        out += [PbsArc(len(out), u, v, r.choice(weights)),
                PbsArc(len(out) + 1, u, v, r.choice(weights))]
    for _ in range(forbidden_pairs):
        u, v = r.sample(range(n), 2)
        fp.append((len(out), len(out) + 1))
        out += [PbsArc(len(out), u, v, r.choice(weights)),
                PbsArc(len(out) + 1, v, u, r.choice(weights))]
    while len(out) < arcs:
        u, v = r.sample(range(n), 2)
        out.append(PbsArc(len(out), u, v, r.choice(weights)))
    return PbsInstance(n, tuple(out), tuple(dp), tuple(fp))


def random_reduction_input(zero_arcs: int, double_pairs: int,
                           n: int = 4, seed: Optional[int] = None,
                           rng: Optional[random.Random] = None) -> PbsInstance:
    """PBS instance in clique-reduction output form.

    One arc of weight -1, ``zero_arcs`` plain arcs of weight 0,
    ``double_pairs`` double pairs of weight 0 and no forbidden pairs. The
    underlying graph is connected, so the MCPP reduction of the result is
    strongly connected.
    """
    r = _rng(seed, rng)
    if n < 2:
        raise InstanceError("need at least two vertices")
    if 1 + zero_arcs + double_pairs < n - 1:
        raise InstanceError(f"too few arcs to connect {n} vertices")
    for _ in range(MAX_TRIES):
        u, v = r.sample(range(n), 2)
        out = [PbsArc(0, u, v, -1)]
        for _ in range(zero_arcs):
            u, v = r.sample(range(n), 2)
            out.append(PbsArc(len(out), u, v, 0))
        dp = []
        for _ in range(double_pairs):
            u, v = r.sample(range(n), 2)
            dp.append((len(out), len(out) + 1))
            out += [PbsArc(len(out), u, v, 0), PbsArc(len(out) + 1, u, v, 0)]
        p = PbsInstance(n, tuple(out), tuple(dp), ())
        if _connected(underlying_graph(p)):
            return p
    raise InstanceError(f"no connected instance found for n={n}")


def _connected(adj: dict) -> bool:
    start = next(iter(adj))
    seen, stack = {start}, [start]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(adj)


def random_colored_graph(k: int, class_size: int, edge_prob: float,
                         seed: Optional[int] = None,
                         rng: Optional[random.Random] = None) -> ColoredGraph:
    r = _rng(seed, rng)
    if k < 1 or class_size < 1 or not 0 <= edge_prob <= 1:
        raise InstanceError("need k >= 1, class_size >= 1, 0 <= p <= 1")
    classes = tuple(tuple(range(i * class_size, (i + 1) * class_size))
                    for i in range(k))
    edges = []
    for i in range(k):
        for j in range(i + 1, k):
            for x in classes[i]:
                for y in classes[j]:
                    if r.random() < edge_prob:
                        edges.append((len(edges) + 1, x, y))
    return ColoredGraph(classes, tuple(edges))


def random_shallow_host(n: int, depth: int, arcs: int,
                        seed: Optional[int] = None,
                        rng: Optional[random.Random] = None
                        ) -> tuple[dict, list[tuple[int, int]]]:
    """A random rooted forest of the given depth and random arcs along it.

    Every arc joins a vertex to one of its proper ancestors (either
    direction), so the forest embeds the underlying graph. Returns the
    parent map and the arc list.
    """
    r = _rng(seed, rng)
    parent: dict[int, Optional[int]] = {0: None}
    level = {0: 1}
    for v in range(1, n):
        cands = [u for u in range(v) if level[u] < depth]
        p = r.choice(cands) if cands else None
        parent[v] = p
        level[v] = 1 if p is None else level[p] + 1
    pairs = []
    for v in range(n):
        p = parent[v]
        while p is not None:
            pairs.append((p, v))
            p = parent[p]
    if not pairs:
        return parent, []
    out = []
    for _ in range(arcs):
        a, b = r.choice(pairs)
        out.append((a, b) if r.random() < 0.5 else (b, a))
    return parent, out
