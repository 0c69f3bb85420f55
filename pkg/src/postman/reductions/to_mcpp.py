"""PBS (clique-reduction form) to MCPP.

Input: no forbidden pairs, one arc a* of weight -1 outside any double pair,
every other arc weight 0. Each arc or double pair u->v becomes a gadget
of standard (weight 1) and heavy (weight M) elements:

* weight-0 arc: new z; standard z->u, z->v; heavy u->z twice, v->z once;
* weight -1 arc: new z, w; standard z->u, z->w, v->w; heavy u->z twice,
  w->z once, w->v twice;
* double pair: a heavy arc u->v and a heavy edge {u, v}.

With every heavy element used once, each gadget has a passive state
(balanced) and an active state (imbalance of the PBS arcs at u and v).
Active costs the same as passive except for a*, which saves 1, so the
MCPP optimum is W - 1 iff a negative selection exists and W otherwise.
With M = m1 + 3 (m1 weight-0 arcs, m2 double pairs) no optimal solution
uses a heavy element twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..graph_core import (Arc, Edge, InstanceError, MixedGraph, PbsInstance,
                          is_strongly_connected, underlying_graph)
from ..mcpp.solution import McppSolution, verify_mcpp_solution
from ..params import (PathDecomposition, join_path_decomposition,
                      pathwidth_upper_bound)
from ..pbs.check import check_properly_balanced, selection_weight

ZERO, NEGATIVE, DOUBLE = "zero", "negative", "double"

# standard element counts (passive, active) per discriminating role
STATES = {
    ZERO: {"z_u": (2, 1), "z_v": (1, 2)},
    NEGATIVE: {"z_u": (2, 1), "z_w": (1, 2), "v_w": (2, 1)},
}


@dataclass(frozen=True)
class ElementGadget:
    """Where one PBS arc or double pair went.

    ``standard`` maps role names to element ids; ``heavy`` lists each heavy
    element as a chain of element ids (one id when compressed, M unit
    elements when expanded) oriented from its tail to its head, together
    with whether it is an edge.
    """

    case: str
    arcs: tuple[int, ...]
    u: int
    v: int
    extra: tuple[int, ...]
    standard: dict = field(default_factory=dict)
    heavy: tuple[tuple[tuple[int, ...], bool], ...] = ()

    def to_json(self) -> dict:
        return {"case": self.case, "arcs": list(self.arcs), "u": self.u,
                "v": self.v, "extra": list(self.extra),
                "standard": self.standard,
                "heavy": [[list(c), e] for c, e in self.heavy]}

    @classmethod
    def from_json(cls, d: dict) -> "ElementGadget":
        return cls(d["case"], tuple(d["arcs"]), d["u"], d["v"],
                   tuple(d["extra"]), {k: int(x) for k, x in
                                       d["standard"].items()},
                   tuple((tuple(c), bool(e)) for c, e in d["heavy"]))


@dataclass
class McppCertificate:
    """Gadget map and constants of a PBS to MCPP reduction."""

    instance: PbsInstance
    graph: MixedGraph
    gadgets: tuple[ElementGadget, ...]
    m1: int
    m2: int
    M: int
    W: int
    expand_heavy: bool

    @property
    def total_weight(self) -> int:
        return (3 * self.m1 + 2 * self.m2 + 5) * self.M + 2 * self.m1 + 3

    def to_json(self) -> dict:
        return {"reduction": "pbs-to-mcpp", "m1": self.m1, "m2": self.m2,
                "M": self.M, "W": self.W, "expand_heavy": self.expand_heavy,
                "gadgets": [g.to_json() for g in self.gadgets]}

    @classmethod
    def from_json(cls, data: dict, instance: PbsInstance,
                  graph: MixedGraph) -> "McppCertificate":
        if data.get("reduction") != "pbs-to-mcpp":
            raise InstanceError("not a pbs-to-mcpp certificate")
        return cls(instance, graph,
                   tuple(ElementGadget.from_json(g) for g in data["gadgets"]),
                   data["m1"], data["m2"], data["M"], data["W"],
                   data["expand_heavy"])


def reduction_constants(p: PbsInstance) -> tuple[int, int, int, int]:
    """``(m1, m2, M, W)``; raises unless ``p`` has the required form."""
    if p.forbidden_pairs:
        raise InstanceError("forbidden pairs are not allowed")
    negatives = []
    for a in p.arcs:
        pair = p.pair_of(a.id)
        if a.weight == -1 and pair is None:
            negatives.append(a.id)
        elif a.weight != 0:
            raise InstanceError(f"arc {a.id} has weight {a.weight}; only a* "
                                f"may be nonzero")
    if len(negatives) != 1:
        raise InstanceError(f"need exactly one arc of weight -1, found "
                            f"{len(negatives)}")
    m2 = len(p.double_pairs)
    m1 = len(p.arcs) - 2 * m2 - 1
    M = m1 + 3
    W = (3 * m1 + 2 * m2 + 5) * M + 3 * m1 + 5
    return m1, m2, M, W


class _GraphBuilder:
    def __init__(self, n: int, M: int, expand: bool):
        self.n = n
        self.M = M
        self.expand = expand
        self.edges: list[Edge] = []
        self.arcs: list[Arc] = []
        self.count = 0

    def vertex(self) -> int:
        self.n += 1
        return self.n - 1

    def element(self, t: int, h: int, w: int, edge: bool) -> int:
        i = self.count
        self.count += 1
        if edge:
            self.edges.append(Edge(i, t, h, w))
        else:
            self.arcs.append(Arc(i, t, h, w))
        return i

    def standard(self, t: int, h: int) -> int:
        return self.element(t, h, 1, False)

    def heavy(self, t: int, h: int, edge: bool = False
              ) -> tuple[tuple[int, ...], bool]:
        if not self.expand:
            return (self.element(t, h, self.M, edge),), edge
        path = [t] + [self.vertex() for _ in range(self.M - 1)] + [h]
        return tuple(self.element(a, b, 1, edge)
                     for a, b in zip(path, path[1:])), edge


def pbs_to_mcpp(p: PbsInstance, expand_heavy: bool = False
                ) -> tuple[MixedGraph, int, McppCertificate]:
    """Mixed graph whose optimum is ``W - 1`` iff ``p`` has a negative PBS.

    PBS vertices keep their ids; gadget vertices follow. Heavy elements
    are single elements of weight M unless ``expand_heavy``, which makes
    them unit paths of length M.
    """
    m1, m2, M, W = reduction_constants(p)
    b = _GraphBuilder(p.vertex_count, M, expand_heavy)
    gadgets = []
    for a in p.arcs:
        pair = p.pair_of(a.id)
        u, v = a.tail, a.head
        if pair is not None:
            if pair[1] < a.id:
                continue
            heavy = (b.heavy(u, v), b.heavy(u, v, edge=True))
            gadgets.append(ElementGadget(DOUBLE, (a.id, pair[1]), u, v, (),
                                         {}, heavy))
        elif a.weight == 0:
            z = b.vertex()
            std = {"z_u": b.standard(z, u), "z_v": b.standard(z, v)}
            heavy = (b.heavy(u, z), b.heavy(u, z), b.heavy(v, z))
            gadgets.append(ElementGadget(ZERO, (a.id,), u, v, (z,), std,
                                         heavy))
        else:
            z, w = b.vertex(), b.vertex()
            std = {"z_u": b.standard(z, u), "z_w": b.standard(z, w),
                   "v_w": b.standard(v, w)}
            heavy = (b.heavy(u, z), b.heavy(u, z), b.heavy(w, z),
                     b.heavy(w, v), b.heavy(w, v))
            gadgets.append(ElementGadget(NEGATIVE, (a.id,), u, v, (z, w), std,
                                         heavy))
    g = MixedGraph(b.n, tuple(b.edges), tuple(b.arcs))
    cert = McppCertificate(p, g, tuple(gadgets), m1, m2, M, W, expand_heavy)
    if not expand_heavy:
        assert g.total_weight() == cert.total_weight
    return g, W, cert


def mcpp_solution_from_pbs_solution(cert: McppCertificate,
                                    s=None) -> McppSolution:
    """Active gadgets for the arcs of ``s``, passive elsewhere."""
    s = frozenset(s or ())
    if not is_strongly_connected(cert.graph):
        raise InstanceError("reduced graph is not strongly connected; the "
                            "input's underlying graph must be connected")
    verdict = check_properly_balanced(cert.instance, s)
    if not verdict:
        raise InstanceError(f"selection not properly balanced: {verdict.reason}")
    arcs: dict[int, int] = {}
    edges: dict[int, tuple[int, int]] = {}
    for gd in cert.gadgets:
        active = gd.arcs[0] in s
        for role, eid in gd.standard.items():
            arcs[eid] = STATES[gd.case][role][int(active)]
        for chain, is_edge in gd.heavy:
            for eid in chain:
                if is_edge:
                    # passive walks the edge v -> u, active u -> v
                    edges[eid] = (1, 0) if active else (0, 1)
                else:
                    arcs[eid] = 1
    sol = McppSolution(arcs, edges)
    check = verify_mcpp_solution(cert.graph, sol)
    if not check:
        raise AssertionError(f"lifted solution fails: {check.reason}")
    assert check.weight == cert.W + verdict.weight
    return sol


def pbs_solution_from_mcpp_solution(cert: McppCertificate,
                                    sol: McppSolution) -> frozenset[int]:
    """Arcs whose gadget is active; empty when every gadget is passive."""
    g = cert.graph
    verdict = verify_mcpp_solution(g, sol)
    if not verdict:
        raise InstanceError(f"not a valid solution: {verdict.reason}")
    chosen: set[int] = set()
    for gd in cert.gadgets:
        where = f"gadget of arc {gd.arcs[0]}"
        direction = set()
        for chain, is_edge in gd.heavy:
            for eid in chain:
                if is_edge:
                    f, bwd = sol.edge_counts[eid]
                    if f + bwd != 1:
                        raise InstanceError(f"{where}: heavy edge used "
                                            f"{f + bwd} times")
                    direction.add(f == 1)
                elif sol.arc_counts[eid] != 1:
                    raise InstanceError(f"{where}: heavy arc used "
                                        f"{sol.arc_counts[eid]} times")
        if gd.case == DOUBLE:
            if len(direction) != 1:
                raise InstanceError(f"{where}: heavy edge path is split")
            active = direction.pop()
        else:
            counts = tuple(sol.arc_counts[gd.standard[r]]
                           for r in STATES[gd.case])
            states = tuple(zip(*STATES[gd.case].values()))
            if counts not in states:
                raise InstanceError(f"{where}: counts {counts} are neither "
                                    f"passive nor active")
            active = counts == states[1]
        if active:
            chosen.update(gd.arcs)
    out = frozenset(chosen)
    check = check_properly_balanced(cert.instance, out)
    if not check:
        raise AssertionError(f"lifted selection fails: {check.reason}")
    if selection_weight(cert.instance, out) != verdict.weight - cert.W:
        raise InstanceError("solution weight does not match its gadget states")
    return out


def lifted_decomposition(cert: McppCertificate,
                         base: PathDecomposition | None = None
                         ) -> PathDecomposition:
    """Path decomposition of the reduced graph from one of the PBS input.

    Each gadget is spliced in next to a bag holding its ``u`` and ``v``;
    its bags hold the gadget's own vertices plus at most two consecutive
    inner vertices of one heavy path, so the width grows by at most 4.
    """
    if base is None:
        base = pathwidth_upper_bound(underlying_graph(cert.instance)
                                     ).decomposition
    g = cert.graph
    ends: dict[int, tuple[int, int]] = {}
    for e in g.edges:
        ends[e.id] = (e.u, e.v)
    for a in g.arcs:
        ends[a.id] = (a.tail, a.head)
    pieces = []
    for gd in cert.gadgets:
        core = frozenset(gd.extra)
        bags = []
        for chain, _ in gd.heavy:
            inner = [ends[eid][1] for eid in chain[:-1]]
            if len(inner) == 1:
                bags.append(core | {inner[0]})
            bags += [core | {x, y} for x, y in zip(inner, inner[1:])]
        if not bags and core:
            bags.append(core)
        if bags:
            pieces.append((frozenset((gd.u, gd.v)),
                           PathDecomposition(tuple(bags))))
    return join_path_decomposition(base, pieces)
