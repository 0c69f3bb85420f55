"""Checking arc selections against the properly-balanced conditions."""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from ..graph_core import PbsInstance, Verdict, check_selection


def imbalance(p: PbsInstance, chosen: Iterable[int]) -> dict[int, int]:
    """Out-degree minus in-degree of the selection at every vertex."""
    b = {v: 0 for v in range(p.vertex_count)}
    for i in chosen:
        a = p.arcs[i]
        b[a.tail] += 1
        b[a.head] -= 1
    return b


def selection_weight(p: PbsInstance, chosen: Iterable[int]) -> int:
    return sum(p.arcs[i].weight for i in chosen)


def check_properly_balanced(p: PbsInstance, chosen: Iterable[int]) -> Verdict:
    """Balanced, all-or-nothing on double pairs, at most one of each forbidden pair.

    On failure ``reason`` names the first violated condition and ``witness``
    the offending vertex or pair.
    """
    s = check_selection(p, chosen)
    for v, b in imbalance(p, s).items():
        if b:
            return Verdict(False, "unbalanced", v)
    for x, y in p.double_pairs:
        if (x in s) != (y in s):
            return Verdict(False, "double pair split", (x, y))
    for x, y in p.forbidden_pairs:
        if x in s and y in s:
            return Verdict(False, "forbidden pair used", (x, y))
    return Verdict(True, weight=selection_weight(p, s))


def is_balanced_multiset(arcs: Iterable[tuple[int, int]]) -> bool:
    deg: Counter = Counter()
    for t, h in arcs:
        deg[t] += 1
        deg[h] -= 1
    return not any(deg.values())
