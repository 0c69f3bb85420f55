"""Bounded-size search for negative properly balanced subgraphs.

Any negative properly balanced subgraph contains an inclusion-minimal one,
and a minimal one has no nonempty properly balanced proper subset (removing
a non-negative one would leave a smaller negative one). By the
decomposition bound such a minimal solution has at most ``f(td)`` arcs.

The search grows candidate arc sets from a start arc (the smallest id in
the target), always repairing one imbalanced vertex by adding an arc that
the target must contain. Whenever the partial set becomes balanced it is
a properly balanced subgraph; if it is not negative it cannot be a proper
subset of a minimal solution and the branch is dropped. This is the
pattern-then-embed scheme run the other way round: patterns are grown
only where they embed.

``strategy="patterns"`` runs the literal scheme instead (enumerate labeled
balanced patterns, keep the negative ones, embed each) and is only
practical for tiny bounds.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Union

from ..graph_core import InstanceError, PbsInstance, underlying_graph
from ..params import tree_depth_exact
from .check import check_properly_balanced, selection_weight
from .decompose import f_bound
from .patterns import embed_labeled_pattern, enumerate_balanced_patterns

log = logging.getLogger(__name__)

DEFAULT_ARC_CAP = 12


class WeightRestrictionError(InstanceError):
    pass


@dataclass(frozen=True)
class FptResult:
    """``selection`` is None when nothing was found; ``complete`` is False
    only if the arc cap cut off part of the space the size bound allows."""

    selection: frozenset[int] | None
    weight: int
    complete: bool
    bound: int
    tree_depth: int

    @property
    def found(self) -> bool:
        return self.selection is not None


def check_weight_restriction(p: PbsInstance) -> None:
    """Double-pair arcs weigh 0, forbidden-pair arcs -1, others +-1."""
    for a in p.arcs:
        pair = p.pair_of(a.id)
        if pair is None:
            ok = a.weight in (1, -1)
        elif pair[0] == "double":
            ok = a.weight == 0
        else:
            ok = a.weight == -1
        if not ok:
            raise WeightRestrictionError(
                f"arc {a.id} has weight {a.weight}, not allowed for its role")


def structural_bound(p: PbsInstance) -> int:
    """Size bound for a minimal negative properly balanced subgraph.

    Split it into arc-disjoint simple cycles and link two cycles whenever a
    double pair has an arc in each. The two arcs of a pair are parallel, so
    they never share a simple cycle, and a disconnected link graph would
    leave a properly balanced proper part. Hence at most ``q + 1`` cycles of
    at most ``n`` arcs each, for ``q`` double pairs.
    """
    touched = {x for a in p.arcs for x in (a.tail, a.head)}
    return len(touched) * (len(p.double_pairs) + 1)


class _Grower:
    def __init__(self, p: PbsInstance, limit: int, binding: bool):
        self.p = p
        self.limit = limit
        self.binding = binding
        self.truncated = False
        self.unit: dict[int, tuple[int, ...]] = {}
        self.forbid: dict[int, int] = {}
        for a in p.arcs:
            pair = p.pair_of(a.id)
            if pair and pair[0] == "double":
                self.unit[a.id] = tuple(sorted((a.id, pair[1])))
            else:
                self.unit[a.id] = (a.id,)
                if pair:
                    self.forbid[a.id] = pair[1]
        # interchangeable units share a class; only the lowest unused unit
        # of a class is ever tried, which loses nothing by symmetry
        classes: dict[tuple, list[tuple[int, ...]]] = {}
        for a in p.arcs:
            u = self.unit[a.id]
            if u[0] != a.id:
                continue
            if a.id in self.forbid:
                key = ("f", a.id)
            else:
                key = (len(u), a.tail, a.head,
                       sum(p.arcs[x].weight for x in u))
            classes.setdefault(key, []).append(u)
        self.first_of_class = {us[0][0] for us in classes.values()}
        self.into: dict[int, list[list[tuple[int, ...]]]] = {
            v: [] for v in range(p.vertex_count)}
        self.out: dict[int, list[list[tuple[int, ...]]]] = {
            v: [] for v in range(p.vertex_count)}
        for us in classes.values():
            a = p.arcs[us[0][0]]
            self.into[a.head].append(us)
            self.out[a.tail].append(us)

    def search_from(self, start: int) -> frozenset[int] | None:
        u0 = self.unit[start]
        if u0[0] != start or start not in self.first_of_class:
            return None
        if len(u0) > self.limit:
            self.truncated |= self.binding
            return None
        bal = [0] * self.p.vertex_count
        chosen: set[int] = set()
        seen: set[frozenset[int]] = set()
        self._add(u0, bal, chosen, +1)
        return self._grow(start, bal, chosen, seen)

    def _add(self, unit, bal, chosen, sign) -> None:
        for x in unit:
            a = self.p.arcs[x]
            bal[a.tail] += sign
            bal[a.head] -= sign
            if sign > 0:
                chosen.add(x)
            else:
                chosen.discard(x)

    def _grow(self, start, bal, chosen, seen) -> frozenset[int] | None:
        key = frozenset(chosen)
        if key in seen:
            return None
        seen.add(key)
        excess = sum(b for b in bal if b > 0)
        if excess == 0:
            w = selection_weight(self.p, chosen)
            return key if w < 0 else None
        if len(chosen) + excess > self.limit:
            self.truncated |= self.binding
            return None
        best = None
        for v, b in enumerate(bal):
            if b == 0:
                continue
            cands = []
            for us in (self.into[v] if b > 0 else self.out[v]):
                u = next((u for u in us if u[0] > start
                          and u[0] not in chosen), None)
                if u is not None and self.forbid.get(u[0]) not in chosen:
                    cands.append(u)
            if best is None or len(cands) < len(best):
                best = cands
                if not cands:
                    return None
        for u in best:
            if len(chosen) + len(u) > self.limit:
                self.truncated |= self.binding
                continue
            if len(u) == 1 and self._closes_cycle(u[0], chosen):
                # the cycle is a properly balanced proper subset of any
                # completion unless it completes the whole set right now
                a = self.p.arcs[u[0]]
                if excess != 1 or bal[a.head] != 1 or bal[a.tail] != -1:
                    continue
            self._add(u, bal, chosen, +1)
            res = self._grow(start, bal, chosen, seen)
            self._add(u, bal, chosen, -1)
            if res is not None:
                return res
        return None


    def _closes_cycle(self, x: int, chosen: set[int]) -> bool:
        """Whether single arc ``x`` closes a directed cycle of chosen
        unpaired or forbidden arcs."""
        a = self.p.arcs[x]
        succ: dict[int, list[int]] = {}
        for y in chosen:
            if len(self.unit[y]) == 1:
                b = self.p.arcs[y]
                succ.setdefault(b.tail, []).append(b.head)
        stack, seen = [a.head], {a.head}
        while stack:
            v = stack.pop()
            if v == a.tail:
                return True
            for w in succ.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False


def _grow_worker(args) -> tuple[frozenset[int] | None, bool]:
    p, limit, binding, start = args
    g = _Grower(p, limit, binding)
    res = g.search_from(start)
    return res, g.truncated


def fpt_negative_pbs(p: PbsInstance, td: Union[int, str] = "auto",
                     arc_cap: Union[int, str, None] = "auto",
                     strict: bool = True, strategy: str = "grow",
                     jobs: int = 1) -> FptResult:
    """Search for a negative properly balanced subgraph of bounded size.

    The size bound is ``min(f(td), arc_cap, |arcs|)``. ``arc_cap="auto"``
    uses 12; ``None`` means no cap. With ``strict`` the weight restriction
    (doubles 0, forbidden -1, others +-1) is enforced; the search itself is
    correct for any integer weights. ``jobs > 1`` spreads start arcs over
    worker processes; the reported selection is the one from the smallest
    successful start arc regardless of ``jobs``.
    """
    if strict:
        check_weight_restriction(p)
    if td == "auto":
        td, _ = tree_depth_exact(underlying_graph(p))
    td = int(td)
    cap = DEFAULT_ARC_CAP if arc_cap == "auto" else arc_cap
    m = len(p.arcs)
    natural = min(f_bound(td) if td < 6 else m, m,
                  structural_bound(p))
    bound = natural if cap is None else min(natural, int(cap))
    binding = bound < natural
    log.debug("fpt search: td=%d natural=%d bound=%d", td, natural, bound)

    if strategy == "patterns":
        return _pattern_search(p, td, bound, binding)
    if strategy != "grow":
        raise ValueError(f"unknown strategy {strategy!r}")

    starts = list(range(m))
    truncated = False
    found = None
    if jobs > 1 and m > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_grow_worker,
                                    [(p, bound, binding, s) for s in starts]))
        for sel, trunc in results:
            truncated |= trunc
            if sel is not None:
                found = sel
                break
    else:
        g = _Grower(p, bound, binding)
        for s in starts:
            found = g.search_from(s)
            if found is not None:
                break
        truncated = g.truncated
    return _result(p, found, truncated, bound, td)


def _result(p, found, truncated, bound, td) -> FptResult:
    if found is not None:
        verdict = check_properly_balanced(p, found)
        assert verdict and verdict.weight < 0, verdict
        return FptResult(found, verdict.weight, True, bound, td)
    return FptResult(None, 0, not truncated, bound, td)


def _pattern_search(p: PbsInstance, td: int, bound: int,
                    binding: bool) -> FptResult:
    for pat in _negative_patterns(bound):
        sel = embed_labeled_pattern(pat, p)
        if sel is not None:
            return _result(p, sel, False, bound, td)
    return FptResult(None, 0, not binding, bound, td)


@lru_cache(maxsize=8)
def _negative_patterns(bound: int) -> tuple:
    return tuple(q for q in enumerate_balanced_patterns(bound) if q.is_negative)
