"""Improving an MCPP solution through a PBS instance.

Given a unit-weight mixed graph G and a solution H of weight M, every
element uv of G gets a small gadget D_uv on the vertices u, v. A positive
arc stands for adding one traversal in its direction and a negative arc
for removing one traversal in the opposite direction. Three cases:

* arc u->v traversed t times: t-1 negative v->u, M-t positive u->v;
* edge used t times one way (u->v is the direction of use): a double pair
  v->u of weight 0, t-1 negative v->u, M-t positive u->v, M-1 positive
  v->u;
* edge used once each way: a forbidden pair u->v / v->u of weight -1 and
  M-1 positive arcs in each direction.

A negative properly balanced subgraph of the union exists iff a cheaper
solution exists, and ``apply_improvement`` turns one into the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..graph_core import (Edge, InstanceError, MixedGraph, PbsArc,
                          PbsInstance)
from ..pbs.check import check_properly_balanced
from .solution import McppSolution, is_normalized, verify_mcpp_solution

ARC, ONE_WAY, BOTH_WAYS = "arc", "one-way", "both-ways"

# role names
NEG_VU = "neg_vu"
POS_UV = "pos_uv"
POS_VU = "pos_vu"
DOUBLE = "double"
FORB_UV = "forbidden_uv"
FORB_VU = "forbidden_vu"


@dataclass(frozen=True)
class GadgetRecord:
    """One element's gadget; ``roles`` maps role names to PBS arc ids.

    ``u -> v`` is the gadget orientation. For a one-way edge it is the
    direction H uses, and ``backward`` says whether that opposes the
    edge's stored order.
    """

    element_id: int
    case: str
    u: int
    v: int
    t: int
    s: int
    roles: dict = field(default_factory=dict)
    backward: bool = False


@dataclass(frozen=True)
class CompGadgetMap:
    M: int
    records: tuple[GadgetRecord, ...]
    instance: PbsInstance

    def role_of_arc(self) -> dict[int, tuple[GadgetRecord, str]]:
        return {x: (r, role) for r in self.records
                for role, ids in r.roles.items() for x in ids}


def build_comp_pbs(g: MixedGraph,
                   h: McppSolution) -> tuple[PbsInstance, CompGadgetMap]:
    """PBS instance whose negative solutions are improvements of ``h``."""
    verdict = verify_mcpp_solution(g, h)
    if not verdict:
        raise InstanceError(f"h is not a valid solution: {verdict.reason}")
    if not is_normalized(h):
        raise InstanceError("h must be normalized first")
    if any(el.weight != 1 for el in (*g.edges, *g.arcs)):
        raise InstanceError("gadgets assume unit weights")
    M = verdict.weight
    arcs: list[PbsArc] = []
    doubles: list[tuple[int, int]] = []
    forbidden: list[tuple[int, int]] = []
    records = []
    for eid in g.element_ids():
        el = g.element(eid)
        if not isinstance(el, Edge):
            case, u, v, t, backward = ARC, el.tail, el.head, \
                h.arc_counts[eid], False
        else:
            f, b = h.edge_counts[eid]
            if f >= 1 and b >= 1:
                case, u, v, t, backward = BOTH_WAYS, el.u, el.v, 1, False
            else:
                backward = b > 0
                u, v = (el.v, el.u) if backward else (el.u, el.v)
                case, t = ONE_WAY, (b if backward else f)
        roles = _emit(arcs, doubles, forbidden, case, u, v, t, M)
        records.append(GadgetRecord(eid, case, u, v, t,
                                    1 if case == BOTH_WAYS else 0, roles,
                                    backward))
    p = PbsInstance(g.vertex_count, tuple(arcs), tuple(doubles),
                    tuple(forbidden))
    return p, CompGadgetMap(M, tuple(records), p)


def _emit(arcs: list, doubles: list, forbidden: list, case: str, u: int,
          v: int, t: int, M: int) -> dict[str, tuple[int, ...]]:
    """Append one element's gadget arcs; returns its role map."""

    def add(tail: int, head: int, w: int, count: int) -> tuple[int, ...]:
        ids = []
        for _ in range(count):
            arcs.append(PbsArc(len(arcs), tail, head, w))
            ids.append(len(arcs) - 1)
        return tuple(ids)

    if case == ARC:
        return {NEG_VU: add(v, u, -1, t - 1), POS_UV: add(u, v, 1, M - t)}
    if case == BOTH_WAYS:
        fa = add(u, v, -1, 1) + add(v, u, -1, 1)
        forbidden.append(fa)
        return {FORB_UV: fa[:1], FORB_VU: fa[1:],
                POS_UV: add(u, v, 1, M - 1), POS_VU: add(v, u, 1, M - 1)}
    dp = add(v, u, 0, 2)
    doubles.append(dp)
    return {DOUBLE: dp, NEG_VU: add(v, u, -1, t - 1),
            POS_UV: add(u, v, 1, M - t), POS_VU: add(v, u, 1, M - 1)}


def element_gadget(case: str, t: int, M: int) -> PbsInstance:
    """The gadget of a single element on vertices u = 0 and v = 1.

    ``t`` is the traversal count of the direction in use (1 for the
    both-ways case).
    """
    if case not in (ARC, ONE_WAY, BOTH_WAYS) or not 1 <= t <= M:
        raise InstanceError(f"no gadget for case {case!r} with t={t}, M={M}")
    arcs: list[PbsArc] = []
    doubles: list[tuple[int, int]] = []
    forbidden: list[tuple[int, int]] = []
    _emit(arcs, doubles, forbidden, case, 0, 1, t, M)
    return PbsInstance(2, tuple(arcs), tuple(doubles), tuple(forbidden))


def gadget_update(rec: GadgetRecord, used: dict[str, int]) -> tuple[int, int]:
    """New (u->v, v->u) traversal counts of one element.

    ``used`` counts selected arcs per role. For an arc the second entry is
    always 0.
    """
    pos_uv = used.get(POS_UV, 0)
    neg = used.get(NEG_VU, 0)
    pos_vu = used.get(POS_VU, 0)
    if rec.case == ARC:
        return rec.t + pos_uv - neg, 0
    if rec.case == ONE_WAY:
        d = used.get(DOUBLE, 0)
        if d not in (0, 2):
            raise InstanceError(f"element {rec.element_id}: double pair split")
        if d:
            # drop one u->v traversal, turn it around, add r'+1 reverse ones
            return rec.t + pos_uv - neg - 1, pos_vu + 1
        return rec.t + pos_uv - neg, pos_vu
    fu, fv = used.get(FORB_UV, 0), used.get(FORB_VU, 0)
    if fu and fv:
        raise InstanceError(f"element {rec.element_id}: forbidden pair used")
    if fu:
        return 1 + pos_uv, pos_vu
    if fv:
        return pos_uv, 1 + pos_vu
    return 1 + pos_uv, 1 + pos_vu


def apply_improvement(g: MixedGraph, h: McppSolution, d, gmap: CompGadgetMap
                      ) -> McppSolution:
    """Solution of weight ``w(h) + w(d)`` for a properly balanced ``d``."""
    d = frozenset(d)
    if h.weight(g) != gmap.M:
        raise InstanceError("gadget map was not built from this solution")
    verdict = check_properly_balanced(gmap.instance, d)
    if not verdict:
        raise InstanceError(f"selection not properly balanced: "
                            f"{verdict.reason} at {verdict.witness}")
    where = gmap.role_of_arc()
    used: dict[int, dict[str, int]] = {r.element_id: {} for r in gmap.records}
    for x in d:
        r, role = where[x]
        used[r.element_id][role] = used[r.element_id].get(role, 0) + 1
    arcs, edges = {}, {}
    for r in gmap.records:
        fwd, bwd = gadget_update(r, used[r.element_id])
        if fwd < 0 or bwd < 0 or fwd + bwd < 1:
            raise InstanceError(
                f"element {r.element_id}: infeasible update ({fwd}, {bwd})")
        if r.case == ARC:
            arcs[r.element_id] = fwd
        elif r.backward:
            edges[r.element_id] = (bwd, fwd)
        else:
            edges[r.element_id] = (fwd, bwd)
    out = McppSolution(arcs, edges)
    check = verify_mcpp_solution(g, out)
    if not check:
        raise InstanceError(f"improved solution fails: {check.reason}")
    if check.weight != gmap.M + verdict.weight:
        raise InstanceError("improved weight does not match the selection")
    return out

