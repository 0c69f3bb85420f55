from __future__ import annotations

import itertools
import json
import random

import pytest

from postman.generate import random_reduction_input
from postman.graph_core import (ColoredGraph, InstanceError, PbsArc,
                                PbsInstance, is_strongly_connected,
                                underlying_graph)
from postman.mcpp.oracle import exact_mcpp_oracle
from postman.mcpp.solution import verify_mcpp_solution
from postman.params import (join_path_decomposition, pathwidth_exact,
                            verify_path_decomposition)
from postman.pbs.brute import (brute_force_negative_pbs,
                               enumerate_properly_balanced)
from postman.pbs.check import check_properly_balanced, selection_weight
from postman.pbs.fpt import fpt_negative_pbs
from postman.reductions.clique import (START, CliqueCertificate,
                                       clique_from_pbs_solution, clique_to_pbs,
                                       gadget_choice_search,
                                       pbs_witness_from_clique,
                                       prune_colored_graph)
from postman.reductions.gadgets import (CHECKSUM, CHOICE, DUPLICATION,
                                        Builder, build_gadget,
                                        disjoint_union, gadget_decomposition,
                                        gadget_selection, join_arcs)
from postman.reductions.to_mcpp import (DOUBLE, NEGATIVE, ZERO,
                                        McppCertificate, lifted_decomposition,
                                        mcpp_solution_from_pbs_solution,
                                        pbs_solution_from_mcpp_solution,
                                        pbs_to_mcpp, reduction_constants)


def degrees(p):
    ind = [0] * p.vertex_count
    outd = [0] * p.vertex_count
    for a in p.arcs:
        outd[a.tail] += 1
        ind[a.head] += 1
    return ind, outd


def reduction_input(rng, max_n):
    m1, m2 = rng.randint(0, 3), rng.randint(0, 1)
    n = min(rng.randint(2, max_n), m1 + m2 + 2)
    return random_reduction_input(m1, m2, n=n, rng=rng)


def uncapped(p):
    return fpt_negative_pbs(p, td=len(p.arcs), arc_cap=None, strict=False)


# ---------------------------------------------------------------------------
# gadgets


def test_duplication_shape():
    p, h = build_gadget(DUPLICATION, 2)
    assert p.vertex_count == 6 and len(p.arcs) == 6
    assert len(h.inputs) == 1 and len(h.outputs) == 2
    ind, outd = degrees(p)
    assert ind == outd == [1] * 6
    # the arcs form one directed cycle starting with the input arc
    cycle = h.parts[0]
    assert cycle[0] == h.input
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        assert p.arcs[a].head == p.arcs[b].tail


def test_choice_shape():
    p, h = build_gadget(CHOICE, 3)
    assert p.vertex_count == 4 + 6 and len(p.arcs) == 3 + 9
    nv = h.named
    for i, out in enumerate(h.outputs, start=1):
        assert (p.arcs[out].tail, p.arcs[out].head) == (nv[f"u{i}"],
                                                        nv[f"v{i}"])
    assert (p.arcs[h.input].tail, p.arcs[h.input].head) == (nv["x"], nv["y"])


def test_checksum_one_one_is_two_paths():
    p, h = build_gadget(CHECKSUM, (1, 1))
    assert p.vertex_count == 6 and len(p.arcs) == 6
    assert len(h.left_inputs) == len(h.right_inputs) == 1
    sels = set(enumerate_properly_balanced(p))
    assert sels == {frozenset(), frozenset(range(6))}


def test_gadget_inputs_and_outputs_have_unit_degrees():
    for kind, sizes in [(DUPLICATION, 3), (CHOICE, 2), (CHECKSUM, (2, 3))]:
        p, h = build_gadget(kind, sizes)
        ind, outd = degrees(p)
        for a in h.inputs + h.outputs:
            for v in (p.arcs[a].tail, p.arcs[a].head):
                assert ind[v] == outd[v] == 1


def test_invalid_sizes():
    for kind, sizes in [(DUPLICATION, 0), (CHOICE, -1), (CHECKSUM, (1, 0)),
                        (CHECKSUM, 2), ("Other", 1)]:
        with pytest.raises(InstanceError):
            build_gadget(kind, sizes)


def test_gadget_selection_is_properly_balanced():
    p, h = build_gadget(CHOICE, 3)
    for i in range(3):
        s = gadget_selection(h, i)
        assert check_properly_balanced(p, s)
        assert [o for o in h.outputs if o in s] == [h.outputs[i]]
    p, h = build_gadget(CHECKSUM, (2, 2))
    assert check_properly_balanced(p, gadget_selection(h, ([0], [1])))
    with pytest.raises(InstanceError):
        gadget_selection(h, ([0, 1], [1]))


def test_gadget_decompositions():
    for kind, sizes, width in [(DUPLICATION, 3, 2), (CHOICE, 3, 3),
                               (CHECKSUM, (2, 3), 3)]:
        p, h = build_gadget(kind, sizes)
        dec = gadget_decomposition(h)
        assert verify_path_decomposition(underlying_graph(p), dec)
        assert dec.width == width
        assert pathwidth_exact(underlying_graph(p)) == width


# ---------------------------------------------------------------------------
# joins


def test_join_duplication_output_to_choice_input():
    b = Builder()
    dup = b.gadget(DUPLICATION, 2)
    ch = b.gadget(CHOICE, 2)
    b.join(dup.outputs[0], ch.input)
    p, _ = b.finish()
    sels = list(enumerate_properly_balanced(p))
    assert all((dup.outputs[0] in s) == (ch.input in s) for s in sels)
    assert any(ch.input in s for s in sels)


def test_join_two_cycles_bookkeeping():
    two = PbsInstance(2, (PbsArc(0, 0, 1, 0), PbsArc(1, 1, 0, 0)))
    d, _ = disjoint_union([two, two])
    joined = join_arcs(d, 0, 2)
    assert joined.vertex_count == d.vertex_count - 2
    assert len(joined.double_pairs) == len(d.double_pairs) + 1
    assert len(joined.arcs) == len(d.arcs)
    with pytest.raises(InstanceError, match="already paired"):
        join_arcs(joined, 0, 1)


def test_join_rejects_high_degree():
    p, h = build_gadget(CHOICE, 2)
    z_to_u1 = h.parts[1][0]
    with pytest.raises(InstanceError, match="out-degree"):
        join_arcs(p, z_to_u1, h.input)


def test_join_pathwidth_bound():
    b = Builder()
    host = b.gadget(DUPLICATION, 2)
    pieces = [b.gadget(CHOICE, 2), b.gadget(CHECKSUM, (1, 2))]
    b.join(host.outputs[0], pieces[0].input)
    b.join(host.outputs[1], pieces[1].left_inputs[0])
    p, vmap = b.finish()
    host_dec = gadget_decomposition(host.relabel(vmap))
    parts = []
    for arc, piece in zip(host.outputs, pieces):
        anchor = frozenset((p.arcs[arc].tail, p.arcs[arc].head))
        parts.append((anchor, gadget_decomposition(piece.relabel(vmap))))
    dec = join_path_decomposition(host_dec, parts)
    assert verify_path_decomposition(underlying_graph(p), dec)
    assert dec.width <= host_dec.width + max(d.width for _, d in parts) + 1


# ---------------------------------------------------------------------------
# clique reduction

SINGLE_EDGE = ColoredGraph(((0,), (1,)), ((1, 0, 1),))
# one triangle 0-2-4; every vertex still sees both other classes
ONE_TRIANGLE = ColoredGraph(((0, 1), (2, 3), (4, 5)),
                            tuple((r, x, y) for r, (x, y) in enumerate(
                                [(0, 2), (2, 4), (0, 4), (1, 3), (1, 5),
                                 (3, 4), (2, 5)], 1)))


def test_single_edge_reduction():
    p, cert = clique_to_pbs(SINGLE_EDGE)
    assert cert.a_star == 0 and p.arcs[0].weight == -1
    assert all(a.weight == 0 for a in p.arcs[1:])
    assert not p.forbidden_pairs
    assert brute_force_negative_pbs(p) is not None
    assert gadget_choice_search(cert) == [0, 1]
    s = pbs_witness_from_clique(cert, [0, 1])
    assert selection_weight(p, s) == -1
    assert clique_from_pbs_solution(cert, s) == [0, 1]


def test_edgeless_graph_rejected():
    with pytest.raises(InstanceError, match="no outputs|neighbour"):
        clique_to_pbs(ColoredGraph(((0,), (1,)), ()))
    with pytest.raises(InstanceError, match="empty"):
        clique_to_pbs(ColoredGraph(((0,), ()), ()))


def test_gadget_inventory_k3():
    p, cert = clique_to_pbs(ONE_TRIANGLE)
    kinds = {}
    for label, h in cert.gadgets.items():
        kinds.setdefault(label[0], []).append(h.kind)
    assert cert.gadgets[START].kind == DUPLICATION
    assert set(kinds["ChooseVertex"]) == {CHOICE} and \
        len(kinds["ChooseVertex"]) == 3
    assert set(kinds["CheckEdge"]) == {CHECKSUM} and len(kinds["CheckEdge"]) == 3
    # AssignEdge(i, v, ->j, e_r) has r outputs
    for label, h in cert.gadgets.items():
        if label[0] == "AssignEdge":
            assert len(h.outputs) == label[4]
    # CheckEdge(i, j) has sum of r over E_ij inputs per side
    for label, h in cert.gadgets.items():
        if label[0] == "CheckEdge":
            _, i, j = label
            total = sum(r for r, x, y in ONE_TRIANGLE.edges
                        if {ONE_TRIANGLE.color(x), ONE_TRIANGLE.color(y)}
                        == {i, j})
            assert len(h.left_inputs) == len(h.right_inputs) == total


def test_triangle_instance():
    p, cert = clique_to_pbs(ONE_TRIANGLE)
    s = pbs_witness_from_clique(cert, [0, 2, 4])
    assert selection_weight(p, s) == -1
    for label, h in cert.gadgets.items():
        if label[0] == "CheckEdge":
            assert s & h.arc_ids
    assert clique_from_pbs_solution(cert, s) == [0, 2, 4]
    r = uncapped(p)
    assert r.found
    assert clique_from_pbs_solution(cert, r.selection) == [0, 2, 4]


def test_triangle_edge_removed():
    edges = [(x, y) for _, x, y in ONE_TRIANGLE.edges if (x, y) != (0, 4)]
    cg = ColoredGraph(ONE_TRIANGLE.classes,
                      tuple((r, x, y) for r, (x, y) in enumerate(edges, 1)))
    assert not any(cg.is_multicolored_clique(c)
                   for c in itertools.product(*cg.classes))
    pruned = prune_colored_graph(cg)
    if pruned is not None:
        p, cert = clique_to_pbs(pruned)
        r = uncapped(p)
        assert not r.found and r.complete
        assert gadget_choice_search(cert) is None


def test_clique_errors():
    p, cert = clique_to_pbs(ONE_TRIANGLE)
    with pytest.raises(InstanceError):
        pbs_witness_from_clique(cert, [1, 2, 4])
    with pytest.raises(InstanceError):
        clique_from_pbs_solution(cert, ())


def test_prune_keeps_cliques():
    rng = random.Random(3)
    for _ in range(50):
        classes = ((0, 1), (2, 3), (4, 5))
        edges = [(x, y) for i, j in itertools.combinations(range(3), 2)
                 for x in classes[i] for y in classes[j] if rng.random() < 0.5]
        cg = ColoredGraph(classes, tuple((r, x, y) for r, (x, y)
                                         in enumerate(edges, 1)))
        cliques = {c for c in itertools.product(*classes)
                   if cg.is_multicolored_clique(c)}
        pruned = prune_colored_graph(cg)
        if pruned is None:
            assert not cliques
            continue
        assert {c for c in itertools.product(*pruned.classes)
                if pruned.is_multicolored_clique(c)} == cliques


def test_clique_certificate_json_round_trip():
    p, cert = clique_to_pbs(ONE_TRIANGLE)
    data = json.loads(json.dumps(cert.to_json()))
    back = CliqueCertificate.from_json(data, ONE_TRIANGLE, p)
    assert back.gadgets == cert.gadgets and back.a_star == cert.a_star
    s = pbs_witness_from_clique(back, [0, 2, 4])
    assert clique_from_pbs_solution(back, s) == [0, 2, 4]


def test_clique_decomposition_width():
    for cg in (SINGLE_EDGE, ONE_TRIANGLE):
        p, cert = clique_to_pbs(cg)
        assert verify_path_decomposition(underlying_graph(p),
                                         cert.decomposition)
        assert cert.decomposition.width <= cert.pathwidth_bound


# ---------------------------------------------------------------------------
# PBS to MCPP

TWO_CYCLE = PbsInstance(2, (PbsArc(0, 0, 1, -1), PbsArc(1, 1, 0, 0)))


def test_two_cycle_constants_and_optimum():
    g, W, cert = pbs_to_mcpp(TWO_CYCLE)
    assert (cert.m1, cert.m2, cert.M, W) == (1, 0, 4, 40)
    assert g.total_weight() == 37 == cert.total_weight
    opt = exact_mcpp_oracle(g)
    assert opt.weight(g) == 39
    assert pbs_solution_from_mcpp_solution(cert, opt) == {0, 1}


def test_single_negative_arc_graph_is_strongly_connected():
    p = PbsInstance(2, (PbsArc(0, 0, 1, -1),))
    g, W, cert = pbs_to_mcpp(p)
    assert is_strongly_connected(g)
    assert exact_mcpp_oracle(g).weight(g) == W


def test_double_pair_constants():
    p = PbsInstance(4, (PbsArc(0, 0, 1, -1), PbsArc(1, 1, 0, 0),
                        PbsArc(2, 2, 3, 0), PbsArc(3, 2, 3, 0)),
                    ((2, 3),), ())
    assert reduction_constants(p) == (1, 1, 4, 48)
    g, W, cert = pbs_to_mcpp(p)
    assert [gd.case for gd in cert.gadgets] == [NEGATIVE, ZERO, DOUBLE]


def test_reduction_preconditions():
    forb = PbsInstance(2, (PbsArc(0, 0, 1, -1), PbsArc(1, 1, 0, -1)), (),
                       ((0, 1),))
    with pytest.raises(InstanceError):
        pbs_to_mcpp(forb)
    two_neg = PbsInstance(2, (PbsArc(0, 0, 1, -1), PbsArc(1, 1, 0, -1)))
    with pytest.raises(InstanceError):
        pbs_to_mcpp(two_neg)
    pos = PbsInstance(2, (PbsArc(0, 0, 1, -1), PbsArc(1, 1, 0, 1)))
    with pytest.raises(InstanceError):
        pbs_to_mcpp(pos)


def test_lift_pbs_to_mcpp_solutions():
    _, _, cert = pbs_to_mcpp(TWO_CYCLE)
    passive = mcpp_solution_from_pbs_solution(cert, None)
    assert passive.weight(cert.graph) == 40
    active = mcpp_solution_from_pbs_solution(cert, {0, 1})
    assert active.weight(cert.graph) == 39
    assert pbs_solution_from_mcpp_solution(cert, passive) == frozenset()
    assert pbs_solution_from_mcpp_solution(cert, active) == {0, 1}
    with pytest.raises(InstanceError):
        mcpp_solution_from_pbs_solution(cert, {0})


def test_lift_round_trip_random():
    rng = random.Random(8)
    for _ in range(30):
        p = reduction_input(rng, 4)
        _, _, cert = pbs_to_mcpp(p)
        for s in enumerate_properly_balanced(p):
            sol = mcpp_solution_from_pbs_solution(cert, s)
            assert verify_mcpp_solution(cert.graph, sol)
            assert sol.weight(cert.graph) == cert.W + selection_weight(p, s)
            assert pbs_solution_from_mcpp_solution(cert, sol) == s


def test_expanded_heavy_elements():
    g, W, cert = pbs_to_mcpp(TWO_CYCLE, expand_heavy=True)
    assert all(el.weight == 1 for el in (*g.edges, *g.arcs))
    assert exact_mcpp_oracle(g).weight(g) == W - 1
    sol = mcpp_solution_from_pbs_solution(cert, {0, 1})
    assert pbs_solution_from_mcpp_solution(cert, sol) == {0, 1}


def test_lifted_decomposition_width():
    rng = random.Random(12)
    for expand in (False, True):
        for _ in range(10):
            p = reduction_input(rng, 5)
            g, _, cert = pbs_to_mcpp(p, expand_heavy=expand)
            dec = lifted_decomposition(cert)
            assert verify_path_decomposition(underlying_graph(g), dec)
            assert dec.width <= pathwidth_exact(underlying_graph(p)) + 5


def test_mcpp_certificate_json_round_trip():
    g, _, cert = pbs_to_mcpp(TWO_CYCLE)
    data = json.loads(json.dumps(cert.to_json()))
    back = McppCertificate.from_json(data, TWO_CYCLE, g)
    assert back.gadgets == cert.gadgets and back.W == cert.W
    assert pbs_solution_from_mcpp_solution(back, exact_mcpp_oracle(g)) == \
        {0, 1}
