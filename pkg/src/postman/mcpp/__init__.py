"""MCPP certificates, oracles, the comp-MCPP gadgets and the improvement loop."""

from .comp import CompGadgetMap, apply_improvement, build_comp_pbs
from .naive import naive_mcpp_solution
from .oracle import OracleTooLarge, exact_mcpp_oracle, exhaustive_mcpp_search
from .solution import (ClosedWalk, McppSolution, extract_closed_walk,
                       is_normalized, normalize_solution,
                       verify_mcpp_solution)
from .solve import SolveReport, solve_mcpp, solve_mcpp_treedepth

__all__ = [
    "ClosedWalk", "CompGadgetMap", "McppSolution", "OracleTooLarge",
    "SolveReport", "apply_improvement", "build_comp_pbs",
    "exact_mcpp_oracle", "exhaustive_mcpp_search", "extract_closed_walk",
    "is_normalized", "naive_mcpp_solution", "normalize_solution",
    "solve_mcpp", "solve_mcpp_treedepth", "verify_mcpp_solution",
]
