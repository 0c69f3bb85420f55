"""Solving MCPP by repeated improvement through PBS."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

from ..graph_core import MixedGraph, underlying_graph, validate_mcpp_instance
from ..params import tree_depth_exact
from ..pbs.fpt import fpt_negative_pbs
from .comp import apply_improvement, build_comp_pbs
from .naive import naive_mcpp_solution
from .oracle import exact_mcpp_oracle
from .solution import McppSolution, normalize_solution

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveReport:
    solution: McppSolution
    weight: int
    iterations: int
    initial_weight: int
    optimal: bool
    """True when optimality is certified. False means the search cap cut
    off part of the space: the result is only locally optimal under it."""


def solve_mcpp_treedepth(g: MixedGraph, arc_cap: Union[int, str, None] = "auto",
                         td: Union[int, str] = "auto",
                         jobs: int = 1) -> SolveReport:
    """Start from the naive solution and improve until no negative
    properly balanced subgraph exists in the comp-PBS instance."""
    validate_mcpp_instance(g)
    if td == "auto":
        # the comp instance lives on the same vertices with a subset of the
        # adjacencies, so this bounds its tree-depth from above
        td, _ = tree_depth_exact(underlying_graph(g))
    h = naive_mcpp_solution(g)
    initial = h.weight(g)
    iterations = 0
    while True:
        h = normalize_solution(g, h)
        p, gmap = build_comp_pbs(g, h)
        res = fpt_negative_pbs(p, td=td, arc_cap=arc_cap, jobs=jobs)
        if not res.found:
            optimal = res.complete
            break
        h = apply_improvement(g, h, res.selection, gmap)
        iterations += 1
        log.debug("iteration %d: weight %d", iterations, h.weight(g))
        if iterations > initial:
            raise AssertionError("improvement loop exceeded its bound")
    return SolveReport(h, h.weight(g), iterations, initial, optimal)


def solve_mcpp(g: MixedGraph, mode: str = "exact", **kwargs) -> SolveReport:
    """Dispatch on ``mode``: ``exact`` oracle, ``fpt`` loop or ``naive``."""
    if mode == "fpt":
        return solve_mcpp_treedepth(g, **kwargs)
    if mode == "exact":
        sol = exact_mcpp_oracle(g)
        w = sol.weight(g)
        return SolveReport(sol, w, 0, w, True)
    if mode == "naive":
        sol = naive_mcpp_solution(g)
        w = sol.weight(g)
        return SolveReport(sol, w, 0, w, False)
    raise ValueError(f"unknown mode {mode!r}")
