"""Splitting a properly balanced subgraph into small properly balanced parts.

The construction works by induction on the depth of a tree embedding:

1. Split the subgraph into blocks (2-connected pieces); each block of a
   balanced graph is itself balanced.
2. For a single block, restrict the embedding to its vertices. The root
   ``x`` then has exactly one child ``y``. Set aside the arcs between ``x``
   and ``y``, merge ``y`` into ``x`` and recurse; the merged tree is one
   level shallower.
3. The recursive parts together with the set-aside arcs (double pairs kept
   together) are balanced everywhere except at ``x`` and ``y``. Regroup
   them by walking partial sums of their imbalance at ``x`` until a sum
   repeats; the items between the two equal sums form a balanced part.

Every part has at most ``2 ** (2 ** k)`` arcs for an embedding of depth k.
"""

from __future__ import annotations

from typing import Iterable

import networkx as nx

from ..graph_core import InstanceError, PbsInstance
from ..params import TreeEmbedding, verify_tree_embedding
from ..graph_core import underlying_graph
from .check import check_properly_balanced


def f_bound(k: int) -> int:
    """Part-size bound for embeddings of depth ``k``."""
    return 2 ** (2 ** k)


def regroup_zero_sum(t: list[int]) -> list[list[int]]:
    """Partition indices of ``t`` (summing to 0) into zero-sum groups.

    Each group comes from the partial-sum walk: start with the entry of
    smallest absolute value (lowest index on ties), then repeatedly add the
    lowest-index unused entry of sign opposite to the running sum, and cut
    at the first repeated partial sum (the empty prefix counts as 0).
    """
    if sum(t) != 0:
        raise InstanceError("imbalances do not sum to zero")
    left = list(range(len(t)))
    groups = []
    while left:
        first = min(left, key=lambda i: (abs(t[i]), i))
        seq = [first]
        sums = {0: 0}
        total = t[first]
        while total not in sums:
            sums[total] = len(seq)
            want_negative = total > 0
            nxt = next(i for i in left if i not in seq
                       and (t[i] < 0 if want_negative else t[i] > 0))
            seq.append(nxt)
            total += t[nxt]
        group = seq[sums[total]:]
        groups.append(sorted(group))
        left = [i for i in left if i not in group]
    return groups


def _restrict(parent: dict, keep: set) -> dict:
    out = {}
    for v in keep:
        p = parent[v]
        while p is not None and p not in keep:
            p = parent[p]
        out[v] = p
    return out


def _depth(parent: dict) -> int:
    best = 0
    for v in parent:
        d = 1
        p = parent[v]
        while p is not None:
            d += 1
            p = parent[p]
        best = max(best, d)
    return best


def _blocks(arcs: dict[int, tuple[int, int]]) -> list[list[int]]:
    g = nx.Graph()
    for t, h in arcs.values():
        g.add_edge(t, h)
    where: dict[frozenset, int] = {}
    blocks: list[list[int]] = []
    for i, edges in enumerate(nx.biconnected_component_edges(g)):
        blocks.append([])
        for x, y in edges:
            where[frozenset((x, y))] = i
    for aid in sorted(arcs):
        t, h = arcs[aid]
        blocks[where[frozenset((t, h))]].append(aid)
    return [b for b in blocks if b]


def _decompose(arcs: dict[int, tuple[int, int]], parent: dict,
               partner: dict[int, int]) -> list[list[int]]:
    if not arcs:
        return []
    blocks = _blocks(arcs)
    if len(blocks) > 1:
        out = []
        for b in blocks:
            out.extend(_decompose({a: arcs[a] for a in b}, parent, partner))
        return out

    verts = {v for th in arcs.values() for v in th}
    tree = _restrict(parent, verts)
    roots = [v for v, p in tree.items() if p is None]
    if len(roots) != 1:
        raise InstanceError("embedding does not keep the block connected")
    x = roots[0]
    kids = [v for v, p in tree.items() if p == x]
    if len(kids) != 1:
        raise InstanceError("root of a 2-connected block has several children")
    y = kids[0]

    between = sorted(a for a, (t, h) in arcs.items() if {t, h} == {x, y})
    rest = {}
    for a, (t, h) in arcs.items():
        if a in between:
            continue
        rest[a] = (x if t == y else t, x if h == y else h)
    merged = {v: (x if p == y else p) for v, p in tree.items() if v != y}
    items: list[list[int]] = _decompose(rest, merged, partner)

    seen: set[int] = set()
    for a in between:
        if a in seen:
            continue
        mate = partner.get(a)
        if mate is not None and mate in between:
            items.append(sorted((a, mate)))
            seen.update((a, mate))
        else:
            items.append([a])
            seen.add(a)

    def at_x(item: list[int]) -> int:
        s = 0
        for a in item:
            t, h = arcs[a]
            s += (t == x) - (h == x)
        return s

    t = [at_x(item) for item in items]
    parts = []
    for group in regroup_zero_sum(t):
        parts.append(sorted(a for i in group for a in items[i]))
    return parts


def decompose_balanced_subgraph(p: PbsInstance, h: Iterable[int],
                                emb: TreeEmbedding) -> list[frozenset[int]]:
    """Partition ``h`` into properly balanced parts of bounded size.

    ``emb`` must embed the underlying graph of ``p``; its depth k gives the
    part-size bound ``min(2 ** (2 ** k), |h|)``.
    """
    h = frozenset(h)
    verdict = check_properly_balanced(p, h)
    if not verdict:
        raise InstanceError(f"selection is not properly balanced: "
                            f"{verdict.reason} at {verdict.witness}")
    if not verify_tree_embedding(underlying_graph(p), emb):
        raise InstanceError("tree embedding is not valid for the instance")
    partner = {}
    for x, y in p.double_pairs:
        partner[x] = y
        partner[y] = x
    arcs = {a: (p.arcs[a].tail, p.arcs[a].head) for a in h}
    parts = _decompose(arcs, dict(emb.parent), partner)
    return [frozenset(q) for q in sorted(parts, key=min)]
