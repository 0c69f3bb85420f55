from __future__ import annotations

import random

import pytest

from postman.generate import random_mixed_graph
from postman.graph_core import ColoredGraph, underlying_graph
from postman.params import (ComponentTooLarge, PathDecomposition,
                            TreeEmbedding, add_to_every_bag,
                            decomposition_from_embedding,
                            decomposition_from_ordering,
                            join_path_decomposition, pathwidth_exact,
                            pathwidth_upper_bound, tree_depth_exact,
                            verify_path_decomposition, verify_tree_embedding)
from postman.reductions.clique import clique_to_pbs


def path(n):
    return {i: {j for j in (i - 1, i + 1) if 0 <= j < n} for i in range(n)}


STAR = {0: {1, 2, 3}, 1: {0}, 2: {0}, 3: {0}}
TRIANGLE = {0: {1, 2}, 1: {0, 2}, 2: {0, 1}}


def test_tree_depth_examples():
    assert tree_depth_exact(STAR)[0] == 2
    assert tree_depth_exact({0: set()})[0] == 1
    assert tree_depth_exact(path(4))[0] == 3
    assert tree_depth_exact(path(7))[0] == 3
    assert tree_depth_exact(TRIANGLE)[0] == 3
    assert tree_depth_exact({})[0] == 0


def test_tree_depth_forest_takes_max_component():
    adj = {**path(4), 10: {11}, 11: {10}}
    t, emb = tree_depth_exact(adj)
    assert t == 3
    assert verify_tree_embedding(adj, emb)
    assert len(emb.roots) == 2


def test_tree_depth_embedding_is_valid():
    rng = random.Random(4)
    for _ in range(30):
        g = random_mixed_graph(rng.randint(2, 8), rng.randint(7, 12), rng=rng)
        adj = underlying_graph(g)
        t, emb = tree_depth_exact(adj)
        assert emb.depth == t
        assert verify_tree_embedding(adj, emb)


def test_tree_depth_cap():
    with pytest.raises(ComponentTooLarge):
        tree_depth_exact(path(6), cap=5)


def test_verify_star_embedding():
    emb = TreeEmbedding({0: None, 1: 0, 2: 0, 3: 0}, 2)
    assert verify_tree_embedding(STAR, emb)


def test_triangle_two_level_embedding_fails():
    for root in range(3):
        parent = {v: (None if v == root else root) for v in range(3)}
        v = verify_tree_embedding(TRIANGLE, TreeEmbedding(parent, 2))
        assert not v and v.reason == "edge joins unrelated vertices"


def test_dfs_path_embeds():
    rng = random.Random(2)
    g = random_mixed_graph(7, 12, rng=rng)
    adj = underlying_graph(g)
    order, seen, stack = [], set(), [0]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        order.append(v)
        stack += sorted(adj[v] - seen, reverse=True)
    parent = {order[0]: None}
    parent.update({b: a for a, b in zip(order, order[1:])})
    assert verify_tree_embedding(adj, TreeEmbedding(parent, len(order)))


def test_wrong_depth_field_rejected():
    emb = TreeEmbedding({0: None, 1: 0, 2: 0, 3: 0}, 3)
    assert not verify_tree_embedding(STAR, emb)


def test_pathwidth_of_path_is_one():
    b = pathwidth_upper_bound(path(5))
    assert b.width == 1 and b.exact
    assert verify_path_decomposition(path(5), b.decomposition)


def test_pathwidth_small_known_values():
    assert pathwidth_exact(STAR) == 1
    assert pathwidth_exact(TRIANGLE) == 2
    k4 = {i: {j for j in range(4) if j != i} for i in range(4)}
    assert pathwidth_exact(k4) == 3
    cycle = {i: {(i - 1) % 6, (i + 1) % 6} for i in range(6)}
    assert pathwidth_exact(cycle) == 2


def test_pathwidth_below_tree_depth():
    rng = random.Random(6)
    for _ in range(30):
        g = random_mixed_graph(rng.randint(2, 9), rng.randint(8, 14), rng=rng)
        adj = underlying_graph(g)
        t, emb = tree_depth_exact(adj)
        assert pathwidth_upper_bound(adj).width <= t - 1
        dec = decomposition_from_embedding(adj, emb)
        assert verify_path_decomposition(adj, dec)
        assert dec.width <= t - 1


def test_decomposition_checks():
    adj = path(3)
    good = decomposition_from_ordering(adj, [0, 1, 2])
    assert verify_path_decomposition(adj, good)
    gap = PathDecomposition((frozenset({0, 1}), frozenset({1, 2}),
                             frozenset({0})))
    assert not verify_path_decomposition(adj, gap)
    missing = PathDecomposition((frozenset({0, 1}),))
    assert not verify_path_decomposition(adj, missing)


def test_hint_decomposition_used_when_narrower():
    adj = {i: {j for j in range(30) if j != i and abs(i - j) <= 1}
           for i in range(30)}
    hint = decomposition_from_ordering(adj, list(range(30)))
    b = pathwidth_upper_bound(adj, hints=[hint], exact_limit=5)
    assert b.width == 1


def test_join_and_add_to_every_bag():
    host = PathDecomposition((frozenset({0, 1}), frozenset({1, 2})))
    piece = PathDecomposition((frozenset({5, 6}),))
    joined = join_path_decomposition(host, [(frozenset({1, 2}), piece)])
    adj = {**path(3), 5: {1, 6}, 6: {2, 5}}
    adj[1] = adj[1] | {5}
    adj[2] = adj[2] | {6}
    assert verify_path_decomposition(adj, joined)
    wider = add_to_every_bag(joined, {9})
    assert all(9 in b for b in wider.bags)


def test_clique_reduction_width_k2():
    cg = ColoredGraph(((0, 1), (2,)), ((1, 0, 2), (2, 1, 2)))
    p, cert = clique_to_pbs(cg)
    b = pathwidth_upper_bound(underlying_graph(p),
                              hints=[cert.decomposition])
    assert b.width <= 18
