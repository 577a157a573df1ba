"""tilepack: map neural-network layer stacks onto crossbar-array tiles.

The pipeline runs network -> fragments -> packing -> cost:

* :mod:`tilepack.network` describes layer stacks and lowers each layer
  to its mapped weight-matrix shape, weight-reuse factor, and
  replication plan.
* :mod:`tilepack.fragmentation` cuts the matrices into tile-sized
  fragments for a given tile geometry.
* :mod:`tilepack.packing` places fragments into as few tiles as
  possible, greedily or exactly, in dense or pipeline mode.
* :mod:`tilepack.costmodel` prices a configuration: tile efficiency,
  total chip area, and stack latency.
* :mod:`tilepack.sweep` searches tile geometries for the cheapest
  configuration.
"""

from .costmodel import (
    CostModelError,
    LatencyParams,
    TileCostParams,
    calibrate_control_dimension,
    latency_pipelined,
    latency_sequential,
    tile_area,
    tile_efficiency,
    total_tile_area,
)
from .fragmentation import (
    Fragment,
    FragmentKind,
    FragmentSet,
    FragmentationError,
    SortKey,
    TileGeometry,
    fragment_layer,
    fragment_network,
    sort_fragments,
)
from .network import (
    LayerKind,
    LayerSpec,
    LogicalLayer,
    NetworkError,
    NetworkSpec,
    load_network,
    lower_layer,
    lower_network,
    plan_rapa,
    weight_reuse,
)
from .packing import (
    ExactSolution,
    FitPolicy,
    PackingError,
    PackingMode,
    PackingResult,
    Placement,
    SolveBudget,
    brute_force_oracle,
    check_packing,
    pack_exact,
    pack_greedy,
    validate_packing,
)
from .sweep import (
    OptimizationReport,
    Packer,
    RapaPlan,
    SweepConfig,
    SweepPoint,
    compare_one_to_one,
    evaluate_config,
    optimize,
)

__version__ = "0.1.0"

__all__ = [
    "CostModelError",
    "ExactSolution",
    "FitPolicy",
    "Fragment",
    "FragmentKind",
    "FragmentSet",
    "FragmentationError",
    "LatencyParams",
    "LayerKind",
    "LayerSpec",
    "LogicalLayer",
    "NetworkError",
    "NetworkSpec",
    "OptimizationReport",
    "Packer",
    "PackingError",
    "PackingMode",
    "PackingResult",
    "Placement",
    "RapaPlan",
    "SolveBudget",
    "SortKey",
    "SweepConfig",
    "SweepPoint",
    "TileCostParams",
    "TileGeometry",
    "brute_force_oracle",
    "calibrate_control_dimension",
    "check_packing",
    "compare_one_to_one",
    "evaluate_config",
    "fragment_layer",
    "fragment_network",
    "latency_pipelined",
    "latency_sequential",
    "load_network",
    "lower_layer",
    "lower_network",
    "optimize",
    "pack_exact",
    "pack_greedy",
    "plan_rapa",
    "sort_fragments",
    "tile_area",
    "tile_efficiency",
    "total_tile_area",
    "validate_packing",
    "weight_reuse",
]
