"""Duplication, Choice and Checksum gadgets and the join operation.

All gadget arcs weigh 0. Joining two arcs identifies their tails and their
heads, keeps both arcs and makes them a double pair, so a properly
balanced subgraph uses both or neither. Gadgets chained through joins act
as circuits: a Duplication gadget whose input is used uses every output, a
Choice gadget exactly one, and a Checksum gadget as many left inputs as
right inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..graph_core import InstanceError, PbsArc, PbsInstance
from ..params import PathDecomposition

DUPLICATION, CHOICE, CHECKSUM = "Duplication", "Choice", "Checksum"
KINDS = (DUPLICATION, CHOICE, CHECKSUM)


@dataclass(frozen=True)
class GadgetHandle:
    """Arc and vertex ids of one gadget inside some instance.

    ``parts`` groups the gadget's arcs: for a Duplication gadget the whole
    cycle; for a Choice gadget the spine ``w x y z`` followed by one branch
    ``z u_i v_i w`` per output; for a Checksum gadget the left paths
    followed by the right paths. ``named`` maps vertex names (``x``,
    ``u1``, ...) to ids.
    """

    kind: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...] = ()
    left_inputs: tuple[int, ...] = ()
    right_inputs: tuple[int, ...] = ()
    parts: tuple[tuple[int, ...], ...] = ()
    named: dict = field(default_factory=dict)

    @property
    def input(self) -> int:
        if self.kind == CHECKSUM:
            raise InstanceError("a Checksum gadget has several inputs")
        return self.inputs[0]

    @property
    def arc_ids(self) -> frozenset[int]:
        return frozenset(x for part in self.parts for x in part)

    def relabel(self, vmap: dict[int, int], arc_offset: int = 0
                ) -> "GadgetHandle":
        shift = lambda ids: tuple(x + arc_offset for x in ids)  # noqa: E731
        return GadgetHandle(self.kind, shift(self.inputs), shift(self.outputs),
                            shift(self.left_inputs), shift(self.right_inputs),
                            tuple(shift(p) for p in self.parts),
                            {k: vmap[v] for k, v in self.named.items()})

    def to_json(self) -> dict:
        return {"kind": self.kind, "inputs": list(self.inputs),
                "outputs": list(self.outputs),
                "left_inputs": list(self.left_inputs),
                "right_inputs": list(self.right_inputs),
                "parts": [list(p) for p in self.parts], "named": self.named}

    @classmethod
    def from_json(cls, data: dict) -> "GadgetHandle":
        return cls(data["kind"], tuple(data["inputs"]), tuple(data["outputs"]),
                   tuple(data["left_inputs"]), tuple(data["right_inputs"]),
                   tuple(tuple(p) for p in data["parts"]),
                   {k: int(v) for k, v in data["named"].items()})


def gadget_selection(h: GadgetHandle, choice=None) -> frozenset[int]:
    """Arcs of the gadget in its active state.

    ``choice`` is ignored for Duplication, is the selected output position
    for Choice, and is ``(left positions, right positions)`` of equal size
    for Checksum.
    """
    if h.kind == DUPLICATION:
        return frozenset(h.parts[0])
    if h.kind == CHOICE:
        return frozenset(h.parts[0] + h.parts[1 + choice])
    left, right = choice
    if len(left) != len(right):
        raise InstanceError("a Checksum gadget needs as many left as right inputs")
    nl = len(h.left_inputs)
    return frozenset(x for i in left for x in h.parts[i]) | \
        frozenset(x for i in right for x in h.parts[nl + i])


def gadget_decomposition(h: GadgetHandle) -> PathDecomposition:
    """Path decomposition of one gadget (width 2 or 3).

    Removing ``x`` leaves a Duplication cycle a path; removing ``w`` and
    ``z`` leaves the other gadgets a union of two-vertex paths.
    """
    nv = h.named
    if h.kind == DUPLICATION:
        t = len(h.outputs)
        path = [nv["y"]] + [nv[f"{c}{i}"] for i in range(1, t + 1)
                            for c in "uv"]
        return PathDecomposition(tuple(
            frozenset((nv["x"], a, b)) for a, b in zip(path, path[1:])))
    hub = {nv["w"], nv["z"]}
    pairs = []
    if h.kind == CHOICE:
        pairs.append((nv["x"], nv["y"]))
        pairs += [(nv[f"u{i}"], nv[f"v{i}"])
                  for i in range(1, len(h.outputs) + 1)]
    else:
        pairs += [(nv[f"x{i}"], nv[f"y{i}"])
                  for i in range(1, len(h.left_inputs) + 1)]
        pairs += [(nv[f"u{i}"], nv[f"v{i}"])
                  for i in range(1, len(h.right_inputs) + 1)]
    return PathDecomposition(tuple(frozenset(hub | set(p)) for p in pairs))


class Builder:
    """Mutable PBS instance under construction.

    Joins identify vertices through a union-find; ``finish`` compacts the
    surviving vertices to dense ids in order of first creation. Arc ids
    never change.
    """

    def __init__(self) -> None:
        self.parent: list[int] = []
        self.arcs: list[list[int]] = []  # [tail, head, weight]
        self.doubles: list[tuple[int, int]] = []
        self.forbidden: list[tuple[int, int]] = []
        self.indeg: list[int] = []
        self.outdeg: list[int] = []
        self.paired: set[int] = set()

    @classmethod
    def from_instance(cls, p: PbsInstance) -> "Builder":
        b = cls()
        for _ in range(p.vertex_count):
            b.vertex()
        for a in p.arcs:
            b.arc(a.tail, a.head, a.weight)
        b.doubles = list(p.double_pairs)
        b.forbidden = list(p.forbidden_pairs)
        b.paired = {x for pr in (*p.double_pairs, *p.forbidden_pairs)
                    for x in pr}
        return b

    def vertex(self) -> int:
        self.parent.append(len(self.parent))
        self.indeg.append(0)
        self.outdeg.append(0)
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def arc(self, tail: int, head: int, weight: int = 0) -> int:
        self.arcs.append([tail, head, weight])
        self.outdeg[self.find(tail)] += 1
        self.indeg[self.find(head)] += 1
        return len(self.arcs) - 1

    def gadget(self, kind: str, sizes) -> GadgetHandle:
        if kind == DUPLICATION:
            return self._duplication(_size(sizes))
        if kind == CHOICE:
            return self._choice(_size(sizes))
        if kind == CHECKSUM:
            if isinstance(sizes, int) or len(sizes) != 2:
                raise InstanceError("Checksum sizes must be (t_l, t_r)")
            return self._checksum(_size(sizes[0]), _size(sizes[1]))
        raise InstanceError(f"unknown gadget kind {kind!r}")

    def _duplication(self, t: int) -> GadgetHandle:
        nv = {"x": self.vertex(), "y": self.vertex()}
        for i in range(1, t + 1):
            nv[f"u{i}"] = self.vertex()
            nv[f"v{i}"] = self.vertex()
        cycle = ["x", "y"] + [f"{c}{i}" for i in range(1, t + 1) for c in "uv"]
        ids = [self.arc(nv[a], nv[b]) for a, b in zip(cycle, cycle[1:] + ["x"])]
        outputs = tuple(ids[2 * i] for i in range(1, t + 1))
        return GadgetHandle(DUPLICATION, (ids[0],), outputs,
                            parts=(tuple(ids),), named=nv)

    def _choice(self, t: int) -> GadgetHandle:
        nv = {c: self.vertex() for c in "xyzw"}
        spine = (self.arc(nv["w"], nv["x"]), self.arc(nv["x"], nv["y"]),
                 self.arc(nv["y"], nv["z"]))
        branches = []
        for i in range(1, t + 1):
            u, v = nv[f"u{i}"], nv[f"v{i}"] = self.vertex(), self.vertex()
            branches.append((self.arc(nv["z"], u), self.arc(u, v),
                             self.arc(v, nv["w"])))
        return GadgetHandle(CHOICE, (spine[1],),
                            tuple(b[1] for b in branches),
                            parts=(spine, *branches), named=nv)

    def _checksum(self, tl: int, tr: int) -> GadgetHandle:
        nv = {"w": self.vertex(), "z": self.vertex()}
        paths = []
        for i in range(1, tl + 1):
            x, y = nv[f"x{i}"], nv[f"y{i}"] = self.vertex(), self.vertex()
            paths.append((self.arc(nv["w"], x), self.arc(x, y),
                          self.arc(y, nv["z"])))
        for i in range(1, tr + 1):
            u, v = nv[f"u{i}"], nv[f"v{i}"] = self.vertex(), self.vertex()
            paths.append((self.arc(nv["z"], u), self.arc(u, v),
                          self.arc(v, nv["w"])))
        left = tuple(p[1] for p in paths[:tl])
        right = tuple(p[1] for p in paths[tl:])
        return GadgetHandle(CHECKSUM, left + right, left_inputs=left,
                            right_inputs=right, parts=tuple(paths), named=nv)

    def join(self, a: int, b: int) -> None:
        """Identify the endpoints of arcs ``a`` and ``b``; pair them."""
        self.check_joinable(a, b)
        self.merge(a, b)

    def check_joinable(self, a: int, b: int) -> None:
        m = len(self.arcs)
        if not (0 <= a < m and 0 <= b < m) or a == b:
            raise InstanceError(f"cannot join arcs {a} and {b}")
        for x in (a, b):
            if x in self.paired:
                raise InstanceError(f"arc {x} is already paired")
        for v in {self.find(v) for v in (*self.arcs[a][:2], *self.arcs[b][:2])}:
            if self.indeg[v] != 1 or self.outdeg[v] != 1:
                raise InstanceError(
                    f"joining {a} and {b}: vertex {v} has in-degree "
                    f"{self.indeg[v]} and out-degree {self.outdeg[v]}, not 1")

    def merge(self, a: int, b: int) -> None:
        for i in (0, 1):
            x, y = self.find(self.arcs[a][i]), self.find(self.arcs[b][i])
            if x == y:
                continue
            keep, gone = min(x, y), max(x, y)
            self.parent[gone] = keep
            self.indeg[keep] += self.indeg[gone]
            self.outdeg[keep] += self.outdeg[gone]
        self.doubles.append((a, b))
        self.paired.update((a, b))

    def finish(self) -> tuple[PbsInstance, dict[int, int]]:
        """The instance and the map from builder vertices to its ids."""
        roots = sorted({self.find(v) for v in range(len(self.parent))})
        dense = {r: i for i, r in enumerate(roots)}
        vmap = {v: dense[self.find(v)] for v in range(len(self.parent))}
        arcs = tuple(PbsArc(i, vmap[t], vmap[h], w)
                     for i, (t, h, w) in enumerate(self.arcs))
        p = PbsInstance(len(roots), arcs, tuple(self.doubles),
                        tuple(self.forbidden))
        return p, vmap


def _size(t) -> int:
    if not isinstance(t, int) or t < 1:
        raise InstanceError(f"gadget size must be a positive integer, got {t!r}")
    return t


def build_gadget(kind: str, sizes) -> tuple[PbsInstance, GadgetHandle]:
    """A lone gadget; ``sizes`` is ``t`` or ``(t_l, t_r)`` for Checksum."""
    b = Builder()
    h = b.gadget(kind, sizes)
    p, vmap = b.finish()
    return p, h.relabel(vmap)


def disjoint_union(parts: Sequence[PbsInstance]
                   ) -> tuple[PbsInstance, list[tuple[int, int]]]:
    """Side-by-side copy; also returns each part's (vertex, arc) offsets."""
    arcs, doubles, forbidden, offsets = [], [], [], []
    nv = 0
    for p in parts:
        na = len(arcs)
        offsets.append((nv, na))
        arcs += [PbsArc(na + a.id, nv + a.tail, nv + a.head, a.weight)
                 for a in p.arcs]
        doubles += [(na + x, na + y) for x, y in p.double_pairs]
        forbidden += [(na + x, na + y) for x, y in p.forbidden_pairs]
        nv += p.vertex_count
    return PbsInstance(nv, tuple(arcs), tuple(doubles),
                       tuple(forbidden)), offsets


def join_arcs(d: PbsInstance, a: int, b: int) -> PbsInstance:
    """Join arcs ``a`` and ``b`` of ``d``; vertex ids are re-compacted."""
    return join_many(d, [(a, b)])


def join_many(d: PbsInstance, pairs: Iterable[tuple[int, int]]) -> PbsInstance:
    """Join several arc pairs; every pair is checked on the unjoined ``d``."""
    b = Builder.from_instance(d)
    pairs = list(pairs)
    used = [x for pr in pairs for x in pr]
    if len(set(used)) != len(used):
        raise InstanceError("an arc appears in two joins")
    for x, y in pairs:
        b.check_joinable(x, y)
    for x, y in pairs:
        b.merge(x, y)
    return b.finish()[0]
