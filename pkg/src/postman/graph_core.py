"""Instance models, text formats and structural validation.

Three instance kinds live here:

* ``MixedGraph``: vertices, undirected edges and directed arcs (an MCPP instance).
* ``PbsInstance``: a directed multigraph with integer arc weights, double pairs
  and forbidden pairs.
* ``ColoredGraph``: a k-partitioned graph for multicolored clique.

All three are immutable. Arc selections on a ``PbsInstance`` are plain
``frozenset`` objects of arc ids.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Union


class InstanceError(ValueError):
    """An instance violates a structural invariant."""


class ParseError(InstanceError):
    """A text document could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotStronglyConnected(InstanceError):
    def __init__(self, witness: tuple[int, int]):
        self.witness = witness
        super().__init__(f"no path from {witness[0]} to {witness[1]}")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check. Truthy iff the check passed."""

    ok: bool
    reason: str | None = None
    witness: Any = None
    weight: int | None = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# Mixed graphs


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    weight: int = 1


@dataclass(frozen=True)
class Arc:
    id: int
    tail: int
    head: int
    weight: int = 1


@dataclass(frozen=True)
class MixedGraph:
    """A mixed multigraph; edge and arc ids share one id space."""

    vertex_count: int
    edges: tuple[Edge, ...] = ()
    arcs: tuple[Arc, ...] = ()
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if self.vertex_count < 0:
            raise InstanceError("negative vertex count")
        by_id: dict[int, Edge | Arc] = {}
        for el in (*self.edges, *self.arcs):
            if el.id in by_id:
                raise InstanceError(f"duplicate element id {el.id}")
            by_id[el.id] = el
            ends = (el.u, el.v) if isinstance(el, Edge) else (el.tail, el.head)
            for x in ends:
                if not 0 <= x < self.vertex_count:
                    raise InstanceError(
                        f"element {el.id}: endpoint {x} out of range")
            if ends[0] == ends[1]:
                raise InstanceError(f"element {el.id}: self-loop at {ends[0]}")
            if el.weight < 1:
                raise InstanceError(f"element {el.id}: weight must be positive")
        object.__setattr__(self, "_by_id", by_id)

    @property
    def element_count(self) -> int:
        return len(self.edges) + len(self.arcs)

    def element(self, element_id: int) -> Edge | Arc:
        return self._by_id[element_id]

    def element_ids(self) -> list[int]:
        return sorted(self._by_id)

    def total_weight(self) -> int:
        return sum(el.weight for el in self._by_id.values())


def _tokens(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _ints(parts: list[str], count: int, lineno: int) -> list[int]:
    if len(parts) != count:
        raise ParseError(
            f"expected {count} fields after '{parts[0] if parts else ''}'",
            lineno)
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise ParseError(f"non-integer field in {' '.join(parts)!r}", lineno)


def _header(text: str, key: str) -> tuple[int, Iterable[tuple[int, list[str]]]]:
    it = iter(_tokens(text))
    first = next(it, None)
    if first is None:
        raise ParseError(f"missing '{key} <n>' header", 1)
    lineno, parts = first
    if parts[0] != key:
        raise ParseError(f"expected '{key} <n>' header, got {parts[0]!r}",
                         lineno)
    (n,) = _ints(parts[1:], 1, lineno)
    if n < 0:
        raise ParseError("negative count", lineno)
    return n, it


def parse_mixed_graph(text: str) -> MixedGraph:
    """Parse the line-based mixed-graph format.

    ``v <n>`` header, then ``e <u> <v> <w>`` and ``a <tail> <head> <w>``
    lines. Element ids are assigned in file order starting at 0.
    """
    n, rest = _header(text, "v")
    edges: list[Edge] = []
    arcs: list[Arc] = []
    next_id = 0
    for lineno, parts in rest:
        kind = parts[0]
        if kind not in ("e", "a"):
            raise ParseError(f"unknown record {kind!r}", lineno)
        x, y, w = _ints(parts[1:], 3, lineno)
        for z in (x, y):
            if not 0 <= z < n:
                raise ParseError(f"endpoint {z} out of range (v {n})", lineno)
        if x == y:
            raise ParseError(f"self-loop at {x}", lineno)
        if w < 1:
            raise ParseError("weight must be positive", lineno)
        if kind == "e":
            edges.append(Edge(next_id, x, y, w))
        else:
            arcs.append(Arc(next_id, x, y, w))
        next_id += 1
    return MixedGraph(n, tuple(edges), tuple(arcs))


def serialize_mixed_graph(g: MixedGraph) -> str:
    lines = [f"v {g.vertex_count}"]
    for eid in g.element_ids():
        el = g.element(eid)
        if isinstance(el, Edge):
            lines.append(f"e {el.u} {el.v} {el.weight}")
        else:
            lines.append(f"a {el.tail} {el.head} {el.weight}")
    return "\n".join(lines) + "\n"


def arc_expanded_successors(g: MixedGraph) -> dict[int, set[int]]:
    """Out-neighbours with every edge usable in both directions."""
    succ: dict[int, set[int]] = {v: set() for v in range(g.vertex_count)}
    for e in g.edges:
        succ[e.u].add(e.v)
        succ[e.v].add(e.u)
    for a in g.arcs:
        succ[a.tail].add(a.head)
    return succ


def _reach(succ: Mapping[int, Iterable[int]], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in succ[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def validate_mcpp_instance(g: MixedGraph) -> None:
    """Raise ``NotStronglyConnected`` unless ``g`` is strongly connected."""
    n = g.vertex_count
    if n <= 1:
        return
    succ = arc_expanded_successors(g)
    fwd = _reach(succ, 0)
    for y in range(n):
        if y not in fwd:
            raise NotStronglyConnected((0, y))
    pred: dict[int, set[int]] = {v: set() for v in range(n)}
    for x, ys in succ.items():
        for y in ys:
            pred[y].add(x)
    back = _reach(pred, 0)
    for x in range(n):
        if x not in back:
            raise NotStronglyConnected((x, 0))


def is_strongly_connected(g: MixedGraph) -> bool:
    try:
        validate_mcpp_instance(g)
    except NotStronglyConnected:
        return False
    return True


# ---------------------------------------------------------------------------
# PBS instances


@dataclass(frozen=True)
class PbsArc:
    id: int
    tail: int
    head: int
    weight: int


@dataclass(frozen=True)
class PbsInstance:
    """Directed multigraph with double pairs and forbidden pairs.

    Arc ids are dense: ``arcs[i].id == i``. Pair invariants are checked on
    construction and violations raise ``InstanceError``.
    """

    vertex_count: int
    arcs: tuple[PbsArc, ...] = ()
    double_pairs: tuple[tuple[int, int], ...] = ()
    forbidden_pairs: tuple[tuple[int, int], ...] = ()
    _partner: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "double_pairs",
                           tuple(tuple(p) for p in self.double_pairs))
        object.__setattr__(self, "forbidden_pairs",
                           tuple(tuple(p) for p in self.forbidden_pairs))
        n = self.vertex_count
        if n < 0:
            raise InstanceError("negative vertex count")
        for i, a in enumerate(self.arcs):
            if a.id != i:
                raise InstanceError(f"arc at position {i} has id {a.id}")
            if not (0 <= a.tail < n and 0 <= a.head < n):
                raise InstanceError(f"arc {i}: endpoint out of range")
            if a.tail == a.head:
                raise InstanceError(f"arc {i}: self-loop at {a.tail}")
        partner: dict[int, tuple[str, int]] = {}
        m = len(self.arcs)
        for kind, pairs in (("double", self.double_pairs),
                            ("forbidden", self.forbidden_pairs)):
            for x, y in pairs:
                for z in (x, y):
                    if not 0 <= z < m:
                        raise InstanceError(
                            f"{kind} pair references unknown arc {z}")
                if x == y:
                    raise InstanceError(f"{kind} pair ({x}, {y}) repeats an arc")
                for z in (x, y):
                    if z in partner:
                        raise InstanceError(
                            f"arc {z} appears in more than one pair")
                a, b = self.arcs[x], self.arcs[y]
                if kind == "double" and (a.tail, a.head) != (b.tail, b.head):
                    raise InstanceError(
                        f"double pair ({x}, {y}) has mismatched endpoints")
                if kind == "forbidden" and (a.tail, a.head) != (b.head, b.tail):
                    raise InstanceError(
                        f"forbidden pair ({x}, {y}) is not mutually reverse")
                partner[x] = (kind, y)
                partner[y] = (kind, x)
        object.__setattr__(self, "_partner", partner)

    def pair_of(self, arc_id: int) -> tuple[str, int] | None:
        """``("double"|"forbidden", partner id)`` or ``None``."""
        return self._partner.get(arc_id)

    @property
    def arc_ids(self) -> frozenset[int]:
        return frozenset(range(len(self.arcs)))


def parse_pbs_instance(text: str) -> PbsInstance:
    """Parse the PBS format: ``v``, ``a <t> <h> <w>``, ``d <id> <id>``, ``f <id> <id>``."""
    n, rest = _header(text, "v")
    arcs: list[PbsArc] = []
    doubles: list[tuple[int, int]] = []
    forbidden: list[tuple[int, int]] = []
    pair_lines: list[tuple[int, str, int, int]] = []
    for lineno, parts in rest:
        kind = parts[0]
        if kind == "a":
            x, y, w = _ints(parts[1:], 3, lineno)
            for z in (x, y):
                if not 0 <= z < n:
                    raise ParseError(f"endpoint {z} out of range (v {n})",
                                     lineno)
            if x == y:
                raise ParseError(f"self-loop at {x}", lineno)
            arcs.append(PbsArc(len(arcs), x, y, w))
        elif kind in ("d", "f"):
            x, y = _ints(parts[1:], 2, lineno)
            pair_lines.append((lineno, kind, x, y))
            (doubles if kind == "d" else forbidden).append((x, y))
        else:
            raise ParseError(f"unknown record {kind!r}", lineno)
    # re-check pairs one at a time so errors carry a line number
    seen: set[int] = set()
    for lineno, kind, x, y in pair_lines:
        for z in (x, y):
            if not 0 <= z < len(arcs):
                raise ParseError(f"pair references unknown arc {z}", lineno)
            if z in seen:
                raise ParseError(f"arc {z} appears in more than one pair",
                                 lineno)
        if x == y:
            raise ParseError("pair repeats an arc", lineno)
        seen.update((x, y))
        a, b = arcs[x], arcs[y]
        if kind == "d" and (a.tail, a.head) != (b.tail, b.head):
            raise ParseError(f"double pair ({x}, {y}) has mismatched endpoints",
                             lineno)
        if kind == "f" and (a.tail, a.head) != (b.head, b.tail):
            raise ParseError(f"forbidden pair ({x}, {y}) is not mutually reverse",
                             lineno)
    return PbsInstance(n, tuple(arcs), tuple(doubles), tuple(forbidden))


def serialize_pbs_instance(p: PbsInstance) -> str:
    lines = [f"v {p.vertex_count}"]
    lines += [f"a {a.tail} {a.head} {a.weight}" for a in p.arcs]
    lines += [f"d {x} {y}" for x, y in p.double_pairs]
    lines += [f"f {x} {y}" for x, y in p.forbidden_pairs]
    return "\n".join(lines) + "\n"


def check_selection(p: PbsInstance, chosen: Iterable[int]) -> frozenset[int]:
    """Return ``chosen`` as a frozenset after checking it names arcs of ``p``."""
    s = frozenset(chosen)
    bad = [x for x in s if not 0 <= x < len(p.arcs)]
    if bad:
        raise InstanceError(f"selection references unknown arcs {sorted(bad)}")
    return s


# ---------------------------------------------------------------------------
# Colored graphs


@dataclass(frozen=True)
class ColoredGraph:
    """A graph whose vertices are split into classes V_1..V_k.

    ``classes[i]`` lists the vertices of class ``i + 1``. ``edges`` holds
    ``(r, x, y)`` triples where ``r`` is the 1-based edge index.
    """

    classes: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int, int], ...] = ()
    _color: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes",
                           tuple(tuple(c) for c in self.classes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        color: dict[int, int] = {}
        for i, cls in enumerate(self.classes, start=1):
            for v in cls:
                if v in color:
                    raise InstanceError(f"vertex {v} is in two classes")
                color[v] = i
        seen_r: set[int] = set()
        for r, x, y in self.edges:
            if r in seen_r:
                raise InstanceError(f"duplicate edge index {r}")
            seen_r.add(r)
            for z in (x, y):
                if z not in color:
                    raise InstanceError(f"edge e{r}: unknown vertex {z}")
            if color[x] == color[y]:
                raise InstanceError(f"edge e{r} joins two vertices of class "
                                    f"{color[x]}")
        object.__setattr__(self, "_color", color)

    @property
    def k(self) -> int:
        return len(self.classes)

    def color(self, v: int) -> int:
        return self._color[v]

    def neighbours_in(self, v: int, j: int) -> list[tuple[int, int]]:
        """``(r, w)`` for every edge e_r joining ``v`` to class ``j``, by r."""
        out = []
        for r, x, y in sorted(self.edges):
            if x == v and self._color[y] == j:
                out.append((r, y))
            elif y == v and self._color[x] == j:
                out.append((r, x))
        return out

    def edge_between(self, x: int, y: int) -> int | None:
        for r, a, b in self.edges:
            if {a, b} == {x, y}:
                return r
        return None

    def is_multicolored_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        if len(vs) != self.k:
            return False
        if sorted(self.color(v) if v in self._color else -1 for v in vs) != \
                list(range(1, self.k + 1)):
            return False
        return all(self.edge_between(x, y) is not None
                   for i, x in enumerate(vs) for y in vs[i + 1:])


def parse_colored_graph(text: str) -> ColoredGraph:
    """Parse ``k <k>``, ``c <class> <vertex>`` and ``e <u> <v>`` records."""
    k, rest = _header(text, "k")
    classes: list[list[int]] = [[] for _ in range(k)]
    edges: list[tuple[int, int, int]] = []
    color: dict[int, int] = {}
    for lineno, parts in rest:
        kind = parts[0]
        if kind == "c":
            c, v = _ints(parts[1:], 2, lineno)
            if not 1 <= c <= k:
                raise ParseError(f"class {c} out of range 1..{k}", lineno)
            if v in color:
                raise ParseError(f"vertex {v} listed twice", lineno)
            color[v] = c
            classes[c - 1].append(v)
        elif kind == "e":
            x, y = _ints(parts[1:], 2, lineno)
            for z in (x, y):
                if z not in color:
                    raise ParseError(f"unknown vertex {z}", lineno)
            if color[x] == color[y]:
                raise ParseError("edge inside one class", lineno)
            edges.append((len(edges) + 1, x, y))
        else:
            raise ParseError(f"unknown record {kind!r}", lineno)
    return ColoredGraph(tuple(tuple(c) for c in classes), tuple(edges))


def serialize_colored_graph(cg: ColoredGraph) -> str:
    """Serialize; edges are written in index order so indices survive."""
    if [r for r, _, _ in sorted(cg.edges)] != list(range(1, len(cg.edges) + 1)):
        raise InstanceError("edge indices must be 1..m to serialize")
    lines = [f"k {cg.k}"]
    for i, cls in enumerate(cg.classes, start=1):
        lines += [f"c {i} {v}" for v in cls]
    lines += [f"e {x} {y}" for _, x, y in sorted(cg.edges)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Underlying undirected graphs


Instance = Union[MixedGraph, PbsInstance]


def underlying_graph(obj: Instance) -> dict[int, set[int]]:
    """Simple undirected graph underlying a mixed graph or PBS instance."""
    adj: dict[int, set[int]] = {v: set() for v in range(obj.vertex_count)}
    if isinstance(obj, MixedGraph):
        pairs = [(e.u, e.v) for e in obj.edges] + \
                [(a.tail, a.head) for a in obj.arcs]
    else:
        pairs = [(a.tail, a.head) for a in obj.arcs]
    for x, y in pairs:
        adj[x].add(y)
        adj[y].add(x)
    return adj
