"""Labeled balanced patterns and their embedding into PBS instances.

A pattern is a small balanced directed multigraph whose arcs carry one of
four labels. Host arcs get labels too: Double if in a double pair,
Forbidden if in a forbidden pair, otherwise Negative or Positive by the sign
of the weight. A pattern embeds if it maps label-preservingly onto distinct
host arcs, with each Double pair landing on one declared double pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterable, Iterator

from ..graph_core import InstanceError, PbsInstance
from .check import check_properly_balanced


class Label(enum.IntEnum):
    NEGATIVE = 0
    POSITIVE = 1
    DOUBLE = 2
    FORBIDDEN = 3


ALL_LABELS = tuple(Label)

PatternArc = tuple[int, int, Label]


@dataclass(frozen=True)
class LabeledPattern:
    """Canonically ordered labeled multigraph on vertices 0..n-1."""

    vertex_count: int
    arcs: tuple[PatternArc, ...]

    def count(self, label: Label) -> int:
        return sum(1 for a in self.arcs if a[2] == label)

    @property
    def is_negative(self) -> bool:
        """Negative and Forbidden arcs outnumber Positive ones."""
        return (self.count(Label.NEGATIVE) + self.count(Label.FORBIDDEN)
                > self.count(Label.POSITIVE))


def host_label(p: PbsInstance, arc_id: int) -> Label:
    pair = p.pair_of(arc_id)
    if pair is not None:
        return Label.DOUBLE if pair[0] == "double" else Label.FORBIDDEN
    w = p.arcs[arc_id].weight
    if w < 0:
        return Label.NEGATIVE
    if w > 0:
        return Label.POSITIVE
    raise InstanceError(f"arc {arc_id} has weight 0 outside a double pair")


# ---------------------------------------------------------------------------
# Canonical forms


def _signature(n: int, arcs: Iterable[PatternArc]) -> list[tuple]:
    sig: list[list[int]] = [[0] * 8 for _ in range(n)]
    for t, h, lab in arcs:
        sig[t][lab] += 1
        sig[h][4 + lab] += 1
    return [tuple(s) for s in sig]


def canonical_form(n: int, arcs: Iterable[PatternArc]) -> LabeledPattern:
    """Smallest relabelling of the arc list among degree-respecting orders."""
    arcs = list(arcs)
    sig = _signature(n, arcs)
    order = sorted(range(n), key=lambda v: sig[v])
    classes: list[list[int]] = []
    for v in order:
        if classes and sig[classes[-1][0]] == sig[v]:
            classes[-1].append(v)
        else:
            classes.append([v])
    best = None
    for choice in product(*(permutations(c) for c in classes)):
        mapping = {}
        pos = 0
        for block in choice:
            for v in block:
                mapping[v] = pos
                pos += 1
        key = tuple(sorted((mapping[t], mapping[h], lab) for t, h, lab in arcs))
        if best is None or key < best:
            best = key
    return LabeledPattern(n, best or ())


def pattern_is_valid(pat: LabeledPattern) -> bool:
    """Balanced, no isolated vertex, Double arcs 0 or 2 per vertex pair in one
    direction, at most one Forbidden arc per vertex pair."""
    bal = [0] * pat.vertex_count
    used = [False] * pat.vertex_count
    doubles: dict[frozenset, list[tuple[int, int]]] = {}
    forb: dict[frozenset, int] = {}
    for t, h, lab in pat.arcs:
        bal[t] += 1
        bal[h] -= 1
        used[t] = used[h] = True
        key = frozenset((t, h))
        if lab == Label.DOUBLE:
            doubles.setdefault(key, []).append((t, h))
        elif lab == Label.FORBIDDEN:
            forb[key] = forb.get(key, 0) + 1
    if any(bal) or not all(used):
        return False
    if any(c > 1 for c in forb.values()):
        return False
    return all(len(d) == 2 and d[0] == d[1] for d in doubles.values())


def _prunable(arcs: list[PatternArc]) -> bool:
    """Monotone violations that no further arcs can repair."""
    doubles: dict[frozenset, list[tuple[int, int]]] = {}
    forb: set[frozenset] = set()
    for t, h, lab in arcs:
        key = frozenset((t, h))
        if lab == Label.FORBIDDEN:
            if key in forb:
                return True
            forb.add(key)
        elif lab == Label.DOUBLE:
            d = doubles.setdefault(key, [])
            d.append((t, h))
            if len(d) > 2 or d[0] != (t, h):
                return True
    return False


def enumerate_balanced_patterns(max_arcs: int,
                                labels: Iterable[Label] = ALL_LABELS
                                ) -> Iterator[LabeledPattern]:
    """Every valid labeled balanced pattern with 1..max_arcs arcs, once each.

    Balanced multigraphs are arc-disjoint unions of simple cycles, so level
    m is produced from level m-c by adding a c-cycle over old and new
    vertices, then deduplicated by canonical form. Output is ordered by arc
    count, then by canonical arc tuple.
    """
    labels = tuple(sorted(set(labels)))
    if max_arcs < 2 or not labels:
        return
    levels: list[set[LabeledPattern]] = [set() for _ in range(max_arcs + 1)]
    levels[0].add(LabeledPattern(0, ()))
    for m in range(2, max_arcs + 1):
        for c in range(2, m + 1):
            for base in levels[m - c]:
                n = base.vertex_count
                for cyc in _cycles(n, c):
                    verts = n + sum(1 for v in cyc if v >= n)
                    for labs in product(labels, repeat=c):
                        arcs = list(base.arcs) + [
                            (cyc[i], cyc[(i + 1) % c], labs[i])
                            for i in range(c)]
                        if _prunable(arcs):
                            continue
                        levels[m].add(canonical_form(verts, arcs))
        for pat in sorted(levels[m], key=lambda q: q.arcs):
            if pattern_is_valid(pat):
                yield pat


def _cycles(n: int, c: int) -> Iterator[tuple[int, ...]]:
    """Vertex sequences for a simple c-cycle over n old and fresh vertices.

    Fresh vertices are used in increasing order, and the cycle starts at
    its smallest vertex, which removes most symmetric duplicates early.
    """
    def extend(seq: list[int], fresh: int) -> Iterator[tuple[int, ...]]:
        if len(seq) == c:
            yield tuple(seq)
            return
        for v in range(n):
            if v not in seq and (not seq or v > seq[0]):
                yield from extend(seq + [v], fresh)
        if not seq or fresh > seq[0]:
            yield from extend(seq + [fresh], fresh + 1)

    yield from extend([], n)


# ---------------------------------------------------------------------------
# Embedding


def embed_labeled_pattern(pat: LabeledPattern,
                          p: PbsInstance) -> frozenset[int] | None:
    """Find host arcs realising ``pat``; None if there is no embedding.

    Invalid patterns never embed. The result always passes
    ``check_properly_balanced``.
    """
    if not pattern_is_valid(pat) or pat.vertex_count > p.vertex_count:
        return None
    labels = {a.id: host_label(p, a.id) for a in p.arcs}
    # units: (tail, head, label, size); Double pairs become one unit
    units: list[tuple[int, int, Label, int]] = []
    seen_double: set[tuple[int, int]] = set()
    for t, h, lab in pat.arcs:
        if lab == Label.DOUBLE:
            if (t, h) in seen_double:
                continue
            seen_double.add((t, h))
            units.append((t, h, lab, 2))
        else:
            units.append((t, h, lab, 1))
    # order units so each touches an already placed vertex when possible
    ordered: list[tuple[int, int, Label, int]] = []
    placed: set[int] = set()
    pool = list(units)
    while pool:
        pick = next((u for u in pool if u[0] in placed or u[1] in placed),
                    pool[0])
        pool.remove(pick)
        ordered.append(pick)
        placed.update(pick[:2])

    host_units: dict[tuple[int, int, Label], list[tuple[int, ...]]] = {}
    for a in p.arcs:
        lab = labels[a.id]
        if lab == Label.DOUBLE:
            kind, mate = p.pair_of(a.id)
            if mate < a.id:
                continue
            unit = (a.id, mate)
        else:
            unit = (a.id,)
        host_units.setdefault((a.tail, a.head, lab), []).append(unit)
    by_label: dict[Label, list[tuple[int, int]]] = {}
    for (t, h, lab) in host_units:
        by_label.setdefault(lab, []).append((t, h))

    vmap: dict[int, int] = {}
    used_hosts: set[int] = set()
    chosen: list[int] = []

    def place(i: int) -> frozenset[int] | None:
        if i == len(ordered):
            sel = frozenset(chosen)
            return sel if check_properly_balanced(p, sel) else None
        t, h, lab, _ = ordered[i]
        for ht, hh in by_label.get(lab, ()):
            if vmap.get(t, ht) != ht or vmap.get(h, hh) != hh:
                continue
            new = [(pv, hv) for pv, hv in ((t, ht), (h, hh)) if pv not in vmap]
            if any(hv in used_hosts for _, hv in new) or \
                    (len(new) == 2 and ht == hh):
                continue
            for pv, hv in new:
                vmap[pv] = hv
                used_hosts.add(hv)
            for unit in host_units[(ht, hh, lab)]:
                if unit[0] in chosen:
                    continue
                chosen.extend(unit)
                res = place(i + 1)
                if res is not None:
                    return res
                del chosen[-len(unit):]
                # interchangeable: later units with the same endpoints fail too
                break
            for pv, hv in new:
                del vmap[pv]
                used_hosts.discard(hv)
        return None

    return place(0)
