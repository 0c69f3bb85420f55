"""Multicolored clique to PBS, with witness lifting in both directions.

The instance is a circuit of gadgets. ``Start`` (Duplication, input a* of
weight -1) feeds one ``ChooseVertex(i)`` Choice gadget per class; each of
its outputs feeds ``AssignVertex(i, v)`` (Duplication, one output per other
class), which feeds ``ChooseEdge(i, v, ->j)`` (Choice over the edges from
v into class j). Choosing e_r feeds ``AssignEdge(i, v, ->j, e_r)``, a
Duplication gadget with r outputs, and these r arcs enter
``CheckEdge(min(i,j), max(i,j))`` on the left side when i < j and on the
right side otherwise. A Checksum gadget balances only if both sides carry
the same count, that is both classes picked the same edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..graph_core import ColoredGraph, InstanceError, PbsInstance
from ..params import (PathDecomposition, add_to_every_bag,
                      join_path_decomposition)
from ..pbs.check import check_properly_balanced
from .gadgets import (CHECKSUM, CHOICE, DUPLICATION, Builder, GadgetHandle,
                      gadget_decomposition, gadget_selection)

START = ("Start",)


def label_text(label: tuple) -> str:
    """``AssignEdge(1,4,->2,e3)`` style rendering of a gadget label."""
    name, *args = label
    if name in ("ChooseEdge", "AssignEdge"):
        args = [*args[:2], f"->{args[2]}", *[f"e{r}" for r in args[3:]]]
    return f"{name}({','.join(map(str, args))})" if args else name


@dataclass
class CliqueCertificate:
    """Gadget label table of a clique reduction.

    ``gadgets`` maps labels such as ``("ChooseEdge", i, v, j)`` to handles.
    ``decomposition`` is the path decomposition assembled alongside the
    construction (not serialized).
    """

    graph: ColoredGraph
    instance: PbsInstance
    gadgets: dict[tuple, GadgetHandle]
    a_star: int
    decomposition: PathDecomposition | None = field(default=None, repr=False)

    @property
    def pathwidth_bound(self) -> int:
        k = self.graph.k
        return k * k - k + 16

    def choice_outputs(self, label: tuple) -> list[tuple[int, int]]:
        """``(arc id, label value)`` per output of a Choice gadget."""
        h = self.gadgets[label]
        if label[0] == "ChooseVertex":
            values = list(self.graph.classes[label[1] - 1])
        else:
            _, i, v, j = label
            values = [r for r, _ in self.graph.neighbours_in(v, j)]
        return list(zip(h.outputs, values))

    def to_json(self) -> dict:
        return {
            "reduction": "clique-to-pbs",
            "k": self.graph.k,
            "a_star": self.a_star,
            "gadgets": [{"label": list(lb), "name": label_text(lb),
                         **h.to_json()} for lb, h in self.gadgets.items()],
        }

    @classmethod
    def from_json(cls, data: dict, graph: ColoredGraph,
                  instance: PbsInstance) -> "CliqueCertificate":
        if data.get("reduction") != "clique-to-pbs":
            raise InstanceError("not a clique-to-pbs certificate")
        gadgets = {tuple(g["label"]): GadgetHandle.from_json(g)
                   for g in data["gadgets"]}
        return cls(graph, instance, gadgets, int(data["a_star"]))


def prune_colored_graph(cg: ColoredGraph) -> ColoredGraph | None:
    """Drop vertices that miss some other class; None if a class empties.

    No dropped vertex lies in a multicolored clique, so cliques are kept.
    Edge indices are renumbered 1..m' in their old order.
    """
    alive = {v for cls in cg.classes for v in cls}
    k = cg.k
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            i = cg.color(v)
            for j in range(1, k + 1):
                if j != i and not any(w in alive
                                      for _, w in cg.neighbours_in(v, j)):
                    alive.discard(v)
                    changed = True
                    break
    classes = tuple(tuple(v for v in cls if v in alive) for cls in cg.classes)
    if any(not cls for cls in classes):
        return None
    kept = [(x, y) for _, x, y in sorted(cg.edges) if x in alive and y in alive]
    return ColoredGraph(classes, tuple((r, x, y)
                                       for r, (x, y) in enumerate(kept, 1)))


def clique_to_pbs(cg: ColoredGraph) -> tuple[PbsInstance, CliqueCertificate]:
    """PBS instance with a negative solution iff ``cg`` has a k-clique.

    Exactly one arc (a*, id 0) weighs -1, all others 0, no forbidden
    pairs. Raises ``InstanceError`` on an empty class or when some
    ChooseEdge gadget would get no outputs (see ``prune_colored_graph``).
    """
    k = cg.k
    if k < 1:
        raise InstanceError("need at least one class")
    for i, cls in enumerate(cg.classes, start=1):
        if not cls:
            raise InstanceError(f"class {i} is empty")
    for i, cls in enumerate(cg.classes, start=1):
        for v in cls:
            for j in range(1, k + 1):
                if j != i and not cg.neighbours_in(v, j):
                    raise InstanceError(
                        f"vertex {v} of class {i} has no neighbour in class "
                        f"{j}: ChooseEdge({i},{v},->{j}) would have no outputs")
    b = Builder()
    gadgets: dict[tuple, GadgetHandle] = {}
    layers: list[list[tuple[int, tuple]]] = [[] for _ in range(4)]

    start = gadgets[START] = b.gadget(DUPLICATION, k)
    b.arcs[start.input][2] = -1
    for i in range(1, k + 1):
        cv = gadgets[("ChooseVertex", i)] = b.gadget(CHOICE,
                                                     len(cg.classes[i - 1]))
        b.join(start.outputs[i - 1], cv.input)
        layers[0].append((start.outputs[i - 1], ("ChooseVertex", i)))
    for i in range(1, k + 1):
        cv = gadgets[("ChooseVertex", i)]
        others = [j for j in range(1, k + 1) if j != i]
        for pos, v in enumerate(cg.classes[i - 1]):
            if not others:
                continue
            av = gadgets[("AssignVertex", i, v)] = b.gadget(DUPLICATION,
                                                            len(others))
            b.join(cv.outputs[pos], av.input)
            layers[1].append((cv.outputs[pos], ("AssignVertex", i, v)))
            for jpos, j in enumerate(others):
                nbrs = cg.neighbours_in(v, j)
                ce = gadgets[("ChooseEdge", i, v, j)] = b.gadget(CHOICE,
                                                                 len(nbrs))
                b.join(av.outputs[jpos], ce.input)
                layers[2].append((av.outputs[jpos], ("ChooseEdge", i, v, j)))
                for epos, (r, _) in enumerate(nbrs):
                    ae = gadgets[("AssignEdge", i, v, j, r)] = b.gadget(
                        DUPLICATION, r)
                    b.join(ce.outputs[epos], ae.input)
                    layers[3].append((ce.outputs[epos],
                                      ("AssignEdge", i, v, j, r)))
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            between = [(r, x, y) for r, x, y in sorted(cg.edges)
                       if {cg.color(x), cg.color(y)} == {i, j}]
            total = sum(r for r, _, _ in between)
            ck = gadgets[("CheckEdge", i, j)] = b.gadget(CHECKSUM,
                                                         (total, total))
            left, right = list(ck.left_inputs), list(ck.right_inputs)
            for r, x, y in between:
                vi, vj = (x, y) if cg.color(x) == i else (y, x)
                for out in gadgets[("AssignEdge", i, vi, j, r)].outputs:
                    b.join(out, left.pop(0))
                for out in gadgets[("AssignEdge", j, vj, i, r)].outputs:
                    b.join(out, right.pop(0))
    p, vmap = b.finish()
    gadgets = {lb: h.relabel(vmap) for lb, h in gadgets.items()}
    cert = CliqueCertificate(cg, p, gadgets, gadgets[START].input)
    cert.decomposition = _decomposition(p, gadgets, layers,
                                        [gadgets[("CheckEdge", i, j)]
                                         for i in range(1, k + 1)
                                         for j in range(i + 1, k + 1)])
    return p, cert


def _decomposition(p: PbsInstance, gadgets: dict, layers: list,
                   checks: list[GadgetHandle]) -> PathDecomposition:
    """Start, then each layer of gadgets spliced in at its joined arc, then
    every CheckEdge hub (w, z) added to every bag."""
    dec = gadget_decomposition(gadgets[START])
    for layer in layers:
        pieces = []
        for arc, label in layer:
            a = p.arcs[arc]
            pieces.append((frozenset((a.tail, a.head)),
                           gadget_decomposition(gadgets[label])))
        if pieces:
            dec = join_path_decomposition(dec, pieces)
    hubs = {h.named[c] for h in checks for c in "wz"}
    return add_to_every_bag(dec, hubs)


def _clique_edges(cert: CliqueCertificate, clique) -> tuple[list[int], dict]:
    cg = cert.graph
    if not cg.is_multicolored_clique(clique):
        raise InstanceError(f"{list(clique)} is not a multicolored clique")
    chosen = sorted(clique, key=cg.color)
    r = {}
    for x in chosen:
        for y in chosen:
            if x != y:
                r[(cg.color(x), cg.color(y))] = cg.edge_between(x, y)
    return chosen, r


def pbs_witness_from_clique(cert: CliqueCertificate, clique) -> frozenset[int]:
    """The weight -1 selection that activates the clique's gadgets."""
    cg = cert.graph
    chosen, r = _clique_edges(cert, clique)
    k = cg.k
    g = cert.gadgets
    sel: set[int] = set(gadget_selection(g[START]))
    for i, v in enumerate(chosen, start=1):
        sel |= gadget_selection(g[("ChooseVertex", i)],
                                cg.classes[i - 1].index(v))
        if k == 1:
            continue
        sel |= gadget_selection(g[("AssignVertex", i, v)])
        for j in range(1, k + 1):
            if j == i:
                continue
            outs = [rr for rr, _ in cg.neighbours_in(v, j)]
            sel |= gadget_selection(g[("ChooseEdge", i, v, j)],
                                    outs.index(r[(i, j)]))
            sel |= gadget_selection(g[("AssignEdge", i, v, j, r[(i, j)])])
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            ck = g[("CheckEdge", i, j)]
            left = _input_positions(cert, ck, i, chosen[i - 1], j, r[(i, j)],
                                    ck.left_inputs)
            right = _input_positions(cert, ck, j, chosen[j - 1], i, r[(j, i)],
                                     ck.right_inputs)
            sel |= gadget_selection(ck, (left, right))
    out = frozenset(sel)
    verdict = check_properly_balanced(cert.instance, out)
    assert verdict and verdict.weight == -1, verdict
    return out


def _input_positions(cert, ck, i, v, j, r, side) -> list[int]:
    """Positions on one Checksum side joined to AssignEdge(i, v, ->j, e_r)."""
    partner = {}
    for x, y in cert.instance.double_pairs:
        partner[x], partner[y] = y, x
    outs = set(cert.gadgets[("AssignEdge", i, v, j, r)].outputs)
    return [pos for pos, arc in enumerate(side) if partner.get(arc) in outs]


def clique_from_pbs_solution(cert: CliqueCertificate, s) -> list[int]:
    """Read the clique off a negative properly balanced selection."""
    s = frozenset(s)
    verdict = check_properly_balanced(cert.instance, s)
    if not verdict:
        raise InstanceError(f"selection not properly balanced: {verdict.reason}")
    if verdict.weight >= 0:
        raise InstanceError("selection is not negative")
    out = []
    for i in range(1, cert.graph.k + 1):
        picked = [v for arc, v in cert.choice_outputs(("ChooseVertex", i))
                  if arc in s]
        if len(picked) != 1:
            raise InstanceError(f"ChooseVertex({i}) selects {len(picked)} outputs")
        out.append(picked[0])
    if not cert.graph.is_multicolored_clique(out):
        raise AssertionError(f"recovered vertices {out} are not a clique")
    return out


def gadget_choice_search(cert: CliqueCertificate) -> list[int] | None:
    """Decide the instance through its gadget laws alone.

    A negative solution must use a*, hence pick one vertex per class and
    one edge per ordered class pair; the CheckEdge gadgets then balance iff
    both directions picked the same edge index. Enumerates those choices.
    """
    cg = cert.graph
    k = cg.k
    for combo in itertools.product(*cg.classes):
        options = []
        pairs = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1)
                 if i != j]
        for i, j in pairs:
            options.append([r for _, r in
                            cert.choice_outputs(("ChooseEdge", i,
                                                 combo[i - 1], j))])
        for picks in itertools.product(*options):
            r = dict(zip(pairs, picks))
            if all(r[(i, j)] == r[(j, i)] for i, j in pairs):
                return list(combo)
    return None
