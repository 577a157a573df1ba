"""Bin packing of weight-matrix fragments into tiles."""

from .exact import (
    DEFAULT_MAX_ITEMS,
    ExactSolution,
    SolveBudget,
    pack_dense_exact,
    pack_exact,
    pack_pipeline_exact,
)
from .feasibility import check_packing, validate_packing
from .greedy import (
    PackingError,
    pack_dense_greedy,
    pack_greedy,
    pack_pipeline_greedy,
)
from .oracle import ORACLE_MAX_ITEMS, brute_force_oracle
from .types import FitPolicy, PackingMode, PackingResult, Placement

__all__ = [
    "DEFAULT_MAX_ITEMS",
    "ORACLE_MAX_ITEMS",
    "ExactSolution",
    "FitPolicy",
    "PackingError",
    "PackingMode",
    "PackingResult",
    "Placement",
    "SolveBudget",
    "brute_force_oracle",
    "check_packing",
    "pack_dense_exact",
    "pack_dense_greedy",
    "pack_exact",
    "pack_greedy",
    "pack_pipeline_exact",
    "pack_pipeline_greedy",
    "validate_packing",
]
