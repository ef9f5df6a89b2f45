"""Exact Euclidean projection onto the top-k-sum constraint set."""

from .core import (METHOD_ESGS, METHOD_GRID, METHOD_PLCP, METHOD_TRIVIAL,
                   ProjectionInstance, ProjectionResult, SortedView,
                   Tolerances, find_index_pair, project, project_sorted,
                   project_trivial, sort_desc, top_k_sum)
from .esgs import project_sorted_esgs
from .ext import (PartialSortHint, k1_upper_bound, next_hint,
                  project_partial_sort, project_vector_k_norm,
                  support_function, translate_to_zero_budget)
from .grid import project_sorted_grid
from .plcp import project_sorted_plcp
from .vecio import read_vector, write_vector

__all__ = [
    "METHOD_ESGS", "METHOD_GRID", "METHOD_PLCP", "METHOD_TRIVIAL",
    "PartialSortHint", "ProjectionInstance", "ProjectionResult",
    "SortedView", "Tolerances", "find_index_pair", "k1_upper_bound",
    "next_hint", "project", "project_partial_sort", "project_sorted",
    "project_sorted_esgs", "project_sorted_grid", "project_sorted_plcp",
    "project_trivial", "project_vector_k_norm", "read_vector", "sort_desc",
    "support_function", "top_k_sum", "translate_to_zero_budget",
    "write_vector",
]

__version__ = "0.1.0"
