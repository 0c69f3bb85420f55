"""Exhaustive oracle for negative properly balanced subgraphs.

Arcs that are interchangeable (same endpoints, same weight, same pair role)
are grouped, so the search branches over how many of each group to take
rather than over individual subsets. Vertices are closed in a fixed order
and any partial choice that leaves a closed vertex unbalanced is cut.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..graph_core import InstanceError, PbsInstance
from .check import selection_weight

DEFAULT_NODE_LIMIT = 2_000_000


class SearchTooLarge(InstanceError):
    pass


@dataclass(frozen=True)
class _Group:
    # each option: (arc ids, weight, imbalance deltas as (vertex, delta) tuple)
    options: tuple[tuple[tuple[int, ...], int, tuple[tuple[int, int], ...]], ...]
    vertices: frozenset[int]


def _groups(p: PbsInstance) -> list[_Group]:
    singles: dict[tuple, list[int]] = {}
    doubles: dict[tuple, list[tuple[int, int]]] = {}
    forbidden: dict[tuple, list[tuple[int, int]]] = {}
    for a in p.arcs:
        if p.pair_of(a.id) is None:
            singles.setdefault((a.tail, a.head, a.weight), []).append(a.id)
    for x, y in p.double_pairs:
        a, b = p.arcs[x], p.arcs[y]
        doubles.setdefault((a.tail, a.head, a.weight + b.weight),
                           []).append((x, y))
    for x, y in p.forbidden_pairs:
        a, b = p.arcs[x], p.arcs[y]
        if (a.tail, a.head) > (b.tail, b.head):
            x, y, a, b = y, x, b, a
        forbidden.setdefault((a.tail, a.head, a.weight, b.weight),
                             []).append((x, y))

    out = []
    for (t, h, w), ids in singles.items():
        opts = tuple((tuple(ids[:c]), c * w, ((t, c), (h, -c)))
                     for c in range(len(ids) + 1))
        out.append(_Group(opts, frozenset((t, h))))
    for (t, h, w), pairs in doubles.items():
        opts = tuple((tuple(i for pr in pairs[:c] for i in pr), c * w,
                      ((t, 2 * c), (h, -2 * c)))
                     for c in range(len(pairs) + 1))
        out.append(_Group(opts, frozenset((t, h))))
    for (t, h, wa, wb), pairs in forbidden.items():
        opts = []
        n = len(pairs)
        for ca in range(n + 1):
            for cb in range(n - ca + 1):
                ids = tuple(x for x, _ in pairs[:ca]) + \
                    tuple(y for _, y in pairs[ca:ca + cb])
                opts.append((ids, ca * wa + cb * wb,
                             ((t, ca - cb), (h, cb - ca))))
        out.append(_Group(tuple(opts), frozenset((t, h))))
    return out


def brute_force_negative_pbs(p: PbsInstance, max_arcs: int | None = None,
                             node_limit: int = DEFAULT_NODE_LIMIT
                             ) -> frozenset[int] | None:
    """Minimum-weight properly balanced selection of negative weight, or None.

    ``max_arcs`` restricts the search to selections of at most that many
    arcs. Raises ``SearchTooLarge`` once ``node_limit`` search nodes have
    been expanded without finishing.
    """
    groups = _groups(p)
    if not groups:
        return None
    # close vertices in BFS order so constraints bite early
    adj: dict[int, set[int]] = {v: set() for v in range(p.vertex_count)}
    for a in p.arcs:
        adj[a.tail].add(a.head)
        adj[a.head].add(a.tail)
    rank: dict[int, int] = {}
    for s in range(p.vertex_count):
        if s in rank:
            continue
        rank[s] = len(rank)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x]):
                if y not in rank:
                    rank[y] = len(rank)
                    queue.append(y)
    groups.sort(key=lambda g: (max(rank[v] for v in g.vertices),
                               min(rank[v] for v in g.vertices)))
    closes: list[list[int]] = [[] for _ in groups]
    last: dict[int, int] = {}
    for i, g in enumerate(groups):
        for v in g.vertices:
            last[v] = i
    for v, i in last.items():
        closes[i].append(v)
    # cheapest possible completion from group i onward
    suffix_min = [0] * (len(groups) + 1)
    for i in range(len(groups) - 1, -1, -1):
        suffix_min[i] = suffix_min[i + 1] + min(o[1] for o in groups[i].options)

    cap = len(p.arcs) if max_arcs is None else max_arcs
    best: list = [0, None]  # weight to beat, ids
    bal = [0] * p.vertex_count
    chosen: list[tuple[int, ...]] = []
    nodes = 0

    def dfs(i: int, weight: int, size: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise SearchTooLarge(
                f"brute-force search exceeded {node_limit} nodes")
        if weight + suffix_min[i] >= best[0]:
            return
        if i == len(groups):
            best[0] = weight
            best[1] = frozenset(x for ids in chosen for x in ids)
            return
        for ids, w, delta in groups[i].options:
            if size + len(ids) > cap:
                continue
            for v, d in delta:
                bal[v] += d
            if all(bal[v] == 0 for v in closes[i]):
                chosen.append(ids)
                dfs(i + 1, weight + w, size + len(ids))
                chosen.pop()
            for v, d in delta:
                bal[v] -= d

    dfs(0, 0, 0)
    return best[1]


def exhaustive_negative_pbs(p: PbsInstance) -> frozenset[int] | None:
    """Literal 2^m subset scan; only for cross-checking tiny instances."""
    from .check import check_properly_balanced

    m = len(p.arcs)
    if m > 20:
        raise SearchTooLarge("literal subset scan limited to 20 arcs")
    best = None
    best_w = 0
    for mask in range(1, 1 << m):
        s = frozenset(i for i in range(m) if mask >> i & 1)
        w = selection_weight(p, s)
        if w < best_w and check_properly_balanced(p, s):
            best, best_w = s, w
    return best


def enumerate_properly_balanced(p: PbsInstance,
                                limit: int = DEFAULT_NODE_LIMIT):
    """Yield every properly balanced selection, the empty one included.

    Works on individual arcs (no grouping), so interchangeable arcs give
    distinct selections. Units are single arcs, whole double pairs and
    forbidden pairs (none, either arc); vertices are closed in BFS order.
    """
    units: list[tuple[tuple[int, ...], ...]] = []
    for a in p.arcs:
        pair = p.pair_of(a.id)
        if pair is None:
            units.append(((), (a.id,)))
        elif pair[1] > a.id:
            if pair[0] == "double":
                units.append(((), (a.id, pair[1])))
            else:
                units.append(((), (a.id,), (pair[1],)))
    adj: dict[int, set[int]] = {v: set() for v in range(p.vertex_count)}
    for a in p.arcs:
        adj[a.tail].add(a.head)
        adj[a.head].add(a.tail)
    rank: dict[int, int] = {}
    for s in range(p.vertex_count):
        if s in rank:
            continue
        rank[s] = len(rank)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x]):
                if y not in rank:
                    rank[y] = len(rank)
                    queue.append(y)

    def verts(u) -> set[int]:
        return {v for ids in u for x in ids
                for v in (p.arcs[x].tail, p.arcs[x].head)}

    units.sort(key=lambda u: max(rank[v] for v in verts(u)))
    last: dict[int, int] = {}
    for i, u in enumerate(units):
        for v in verts(u):
            last[v] = i
    closes: list[list[int]] = [[] for _ in units]
    for v, i in last.items():
        closes[i].append(v)
    bal = [0] * p.vertex_count
    chosen: list[int] = []
    nodes = 0

    def rec(i: int):
        nonlocal nodes
        nodes += 1
        if nodes > limit:
            raise SearchTooLarge(f"enumeration exceeded {limit} nodes")
        if i == len(units):
            yield frozenset(chosen)
            return
        for ids in units[i]:
            for x in ids:
                bal[p.arcs[x].tail] += 1
                bal[p.arcs[x].head] -= 1
            if all(bal[v] == 0 for v in closes[i]):
                chosen.extend(ids)
                yield from rec(i + 1)
                del chosen[len(chosen) - len(ids):]
            for x in ids:
                bal[p.arcs[x].tail] -= 1
                bal[p.arcs[x].head] += 1

    yield from rec(0)
