"""Gadget reductions: multicolored clique to PBS, and PBS to MCPP."""

from .clique import (CliqueCertificate, clique_from_pbs_solution,
                     clique_to_pbs, gadget_choice_search,
                     pbs_witness_from_clique, prune_colored_graph)
from .gadgets import (Builder, GadgetHandle, build_gadget, disjoint_union,
                      gadget_decomposition, gadget_selection, join_arcs,
                      join_many)
from .to_mcpp import (McppCertificate, lifted_decomposition,
                      mcpp_solution_from_pbs_solution,
                      pbs_solution_from_mcpp_solution, pbs_to_mcpp,
                      reduction_constants)

__all__ = [
    "Builder", "CliqueCertificate", "GadgetHandle", "McppCertificate",
    "build_gadget", "clique_from_pbs_solution", "clique_to_pbs",
    "disjoint_union", "gadget_choice_search", "gadget_decomposition",
    "gadget_selection", "join_arcs", "join_many", "lifted_decomposition",
    "mcpp_solution_from_pbs_solution", "pbs_solution_from_mcpp_solution",
    "pbs_to_mcpp", "pbs_witness_from_clique", "prune_colored_graph",
    "reduction_constants",
]
