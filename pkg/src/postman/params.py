"""Tree-depth and pathwidth of undirected graphs.

Graphs are adjacency dicts ``{vertex: set(neighbours)}``; use
``graph_core.underlying_graph`` to get one from an instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .graph_core import InstanceError, Verdict

Adjacency = Mapping[Hashable, Iterable[Hashable]]

DEFAULT_TD_CAP = 20
EXACT_PW_LIMIT = 12


class ComponentTooLarge(InstanceError):
    pass


def _normalise(adj: Adjacency) -> dict:
    out: dict = {v: set() for v in adj}
    for v, ns in adj.items():
        for w in ns:
            if w == v:
                continue
            out[v].add(w)
            out.setdefault(w, set()).add(v)
    return out


def components(adj: Adjacency) -> list[list]:
    adj = _normalise(adj)
    seen: set = set()
    comps = []
    for s in adj:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        i = 0
        while i < len(comp):
            for w in adj[comp[i]]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
            i += 1
        comps.append(comp)
    return comps


# ---------------------------------------------------------------------------
# Tree-depth


@dataclass(frozen=True)
class TreeEmbedding:
    """Rooted forest over the vertices; ``parent[r] is None`` for roots.

    ``depth`` counts vertices on the longest root-to-leaf path.
    """

    parent: dict
    depth: int

    @property
    def roots(self) -> list:
        return [v for v, p in self.parent.items() if p is None]

    @property
    def root(self):
        roots = self.roots
        return roots[0] if len(roots) == 1 else None

    def children(self) -> dict:
        ch: dict = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is not None:
                ch[p].append(v)
        return ch

    def ancestors(self, v) -> list:
        """Proper ancestors of ``v``, nearest first."""
        out = []
        p = self.parent[v]
        while p is not None:
            out.append(p)
            p = self.parent[p]
        return out

    def level(self, v) -> int:
        return len(self.ancestors(v)) + 1


def tree_depth_exact(adj: Adjacency,
                     cap: int = DEFAULT_TD_CAP) -> tuple[int, TreeEmbedding]:
    """Exact tree-depth with an optimal embedding (a forest if disconnected)."""
    adj = _normalise(adj)
    parent: dict = {}
    best = 0
    for comp in components(adj):
        if len(comp) > cap:
            raise ComponentTooLarge(
                f"component of {len(comp)} vertices exceeds cap {cap}")
        t, sub = _td_component(adj, sorted(comp, key=repr))
        best = max(best, t)
        parent.update(sub)
    return best, TreeEmbedding(parent, best)


def _td_component(adj: dict, verts: list) -> tuple[int, dict]:
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    nbr = [0] * n
    for v in verts:
        for w in adj[v]:
            nbr[index[v]] |= 1 << index[w]

    def split(mask: int) -> list[int]:
        parts = []
        while mask:
            low = mask & -mask
            comp = low
            frontier = low
            while frontier:
                b = frontier & -frontier
                frontier ^= b
                new = nbr[b.bit_length() - 1] & mask & ~comp
                comp |= new
                frontier |= new
            parts.append(comp)
            mask &= ~comp
        return parts

    memo: dict[int, tuple[int, int]] = {}

    def td(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        size = bin(mask).count("1")
        if size == 1:
            memo[mask] = (1, mask.bit_length() - 1)
            return 1
        lower = size.bit_length()  # ceil(log2(size + 1))
        best, choice = size + 1, -1
        m = mask
        while m:
            b = m & -m
            m ^= b
            worst = 0
            for part in split(mask & ~b):
                worst = max(worst, td(part))
                if worst + 1 >= best:
                    break
            if worst + 1 < best:
                best, choice = worst + 1, b.bit_length() - 1
                if best <= lower:
                    break
        memo[mask] = (best, choice)
        return best

    parent: dict = {}

    def build(mask: int, above) -> None:
        td(mask)
        r = memo[mask][1]
        parent[verts[r]] = above
        for part in split(mask & ~(1 << r)):
            build(part, verts[r])

    full = (1 << n) - 1
    t = td(full)
    build(full, None)
    return t, parent


def verify_tree_embedding(adj: Adjacency, emb: TreeEmbedding) -> Verdict:
    adj = _normalise(adj)
    if set(emb.parent) != set(adj):
        return Verdict(False, "embedding vertex set differs from graph",
                       sorted(set(emb.parent) ^ set(adj), key=repr))
    for v in emb.parent:
        seen = {v}
        p = emb.parent[v]
        while p is not None:
            if p in seen or p not in emb.parent:
                return Verdict(False, "parent map is not a forest", v)
            seen.add(p)
            p = emb.parent[p]
    anc = {v: set(emb.ancestors(v)) for v in emb.parent}
    for v, ns in adj.items():
        for w in ns:
            if w not in anc[v] and v not in anc[w]:
                return Verdict(False, "edge joins unrelated vertices", (v, w))
    actual = max((len(a) + 1 for a in anc.values()), default=0)
    if actual != emb.depth:
        return Verdict(False, f"depth field {emb.depth} but longest path "
                       f"{actual}", actual)
    return Verdict(True)


# ---------------------------------------------------------------------------
# Pathwidth


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset, ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


@dataclass(frozen=True)
class PathwidthBound:
    width: int
    decomposition: PathDecomposition
    exact: bool
    source: str


def verify_path_decomposition(adj: Adjacency,
                              dec: PathDecomposition) -> Verdict:
    adj = _normalise(adj)
    where: dict = {}
    for i, bag in enumerate(dec.bags):
        for v in bag:
            if v not in adj:
                return Verdict(False, "bag holds unknown vertex", v)
            where.setdefault(v, []).append(i)
    for v in adj:
        idx = where.get(v)
        if not idx:
            return Verdict(False, "vertex missing from every bag", v)
        if idx[-1] - idx[0] + 1 != len(idx):
            return Verdict(False, "bags containing vertex are not contiguous",
                           v)
    for v, ns in adj.items():
        for w in ns:
            if not any(w in dec.bags[i] for i in where[v]):
                return Verdict(False, "edge not covered by any bag", (v, w))
    return Verdict(True, weight=dec.width)


def decomposition_from_ordering(adj: Adjacency,
                                order: Sequence) -> PathDecomposition:
    """Bag i is the boundary of the first i-1 vertices plus vertex i."""
    adj = _normalise(adj)
    pos = {v: i for i, v in enumerate(order)}
    last = {v: max([pos[v]] + [pos[w] for w in adj[v]]) for v in order}
    bags = []
    active: set = set()
    for i, v in enumerate(order):
        bags.append(frozenset(active | {v}))
        active.add(v)
        active = {u for u in active if last[u] > i}
    return PathDecomposition(tuple(bags))


def decomposition_from_embedding(adj: Adjacency,
                                 emb: TreeEmbedding) -> PathDecomposition:
    """One bag per leaf (its root path), leaves in DFS order; width depth-1."""
    ch = emb.children()
    bags = []
    for r in sorted(emb.roots, key=repr):
        stack = [(r, (r,))]
        while stack:
            v, path = stack.pop()
            kids = sorted(ch[v], key=repr, reverse=True)
            if not kids:
                bags.append(frozenset(path))
            for c in kids:
                stack.append((c, path + (c,)))
    return PathDecomposition(tuple(bags))


def _exact_vertex_separation(adj: dict, verts: list) -> list:
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    nbr = [0] * n
    for v in verts:
        for w in adj[v]:
            nbr[index[v]] |= 1 << index[w]
    full = (1 << n) - 1
    boundary = [0] * (1 << n)
    for s in range(1 << n):
        c = 0
        m = s
        while m:
            b = m & -m
            m ^= b
            if nbr[b.bit_length() - 1] & ~s & full:
                c += 1
        boundary[s] = c
    f = [0] * (1 << n)
    pick = [0] * (1 << n)
    for s in range(1, 1 << n):
        best, arg = n + 1, -1
        m = s
        while m:
            b = m & -m
            m ^= b
            val = f[s ^ b]
            if val < best:
                best, arg = val, b.bit_length() - 1
        f[s] = max(best, boundary[s])
        pick[s] = arg
    order = []
    s = full
    while s:
        v = pick[s]
        order.append(verts[v])
        s ^= 1 << v
    order.reverse()
    return order


def _greedy_ordering(adj: dict) -> list:
    """Place next the vertex that leaves the smallest active boundary."""
    pending = {v: len(adj[v]) for v in adj}  # unplaced neighbours
    placed: set = set()
    active: set = set()
    frontier: set = set()
    order = []
    while len(order) < len(adj):
        pool = frontier or [v for v in adj if v not in placed]
        best = None
        for v in pool:
            closed = sum(1 for u in adj[v] if u in active and pending[u] == 1)
            size = len(active) - closed + (1 if pending[v] > 0 else 0)
            key = (size, pending[v], repr(v))
            if best is None or key < best[0]:
                best = (key, v)
        v = best[1]
        placed.add(v)
        order.append(v)
        frontier.discard(v)
        for u in adj[v]:
            pending[u] -= 1
            if u in active and pending[u] == 0:
                active.discard(u)
            if u not in placed:
                frontier.add(u)
        if pending[v] > 0:
            active.add(v)
    return order


def pathwidth_upper_bound(adj: Adjacency, budget: int | None = None,
                          hints: Iterable[PathDecomposition] = (),
                          exact_limit: int = EXACT_PW_LIMIT) -> PathwidthBound:
    """Width of a verified path decomposition.

    Components with at most ``exact_limit`` vertices are solved exactly by
    subset DP over vertex orderings; larger ones use a greedy ordering.
    ``hints`` are caller-supplied decompositions (e.g. built alongside a
    reduction); each is verified and the narrowest valid candidate wins.
    ``budget`` bounds the number of greedy steps; when exceeded the trivial
    decomposition is used for that component.
    """
    adj = _normalise(adj)
    if not adj:
        return PathwidthBound(-1, PathDecomposition(()), True, "exact")
    bags: list[frozenset] = []
    exact = True
    steps = 0
    for comp in components(adj):
        comp = sorted(comp, key=repr)
        sub = {v: adj[v] for v in comp}
        if len(comp) <= exact_limit:
            order = _exact_vertex_separation(sub, comp)
        elif budget is not None and steps + len(comp) ** 2 > budget:
            exact = False
            bags.append(frozenset(comp))
            continue
        else:
            exact = False
            steps += len(comp) ** 2
            order = _greedy_ordering(sub)
        bags.extend(decomposition_from_ordering(sub, order).bags)
    best = PathwidthBound(PathDecomposition(tuple(bags)).width,
                          PathDecomposition(tuple(bags)), exact,
                          "exact" if exact else "greedy")
    for hint in hints:
        if verify_path_decomposition(adj, hint) and hint.width < best.width:
            best = PathwidthBound(hint.width, hint, False, "hint")
    return best


def pathwidth_exact(adj: Adjacency) -> int:
    adj = _normalise(adj)
    if len(adj) > 20:
        raise ComponentTooLarge("exact pathwidth limited to 20 vertices")
    return pathwidth_upper_bound(adj, exact_limit=20).width


def join_path_decomposition(host: PathDecomposition,
                            pieces: Sequence[tuple[frozenset,
                                                   PathDecomposition]]
                            ) -> PathDecomposition:
    """Splice piece decompositions into a host decomposition.

    Each piece is ``(anchor, dec)`` where ``anchor`` is the host vertex set
    the piece is glued along (the endpoints of a joined arc). The smallest
    host bag containing the anchor is duplicated and the piece's bags,
    each extended by that host bag, are inserted in between.
    """
    inserts: dict[int, list[PathDecomposition]] = {}
    for anchor, dec in pieces:
        cands = [i for i, b in enumerate(host.bags) if anchor <= b]
        if not cands:
            raise InstanceError(f"no host bag contains {sorted(anchor, key=repr)}")
        i = min(cands, key=lambda j: (len(host.bags[j]), j))
        inserts.setdefault(i, []).append(dec)
    out: list[frozenset] = []
    for i, bag in enumerate(host.bags):
        out.append(bag)
        for dec in inserts.get(i, ()):
            out.extend(b | bag for b in dec.bags)
            out.append(bag)
    return PathDecomposition(tuple(out))


def add_to_every_bag(dec: PathDecomposition,
                     extra: Iterable) -> PathDecomposition:
    extra = frozenset(extra)
    return PathDecomposition(tuple(b | extra for b in dec.bags))
