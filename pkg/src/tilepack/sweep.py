"""Tile-geometry design-space sweeps.

A sweep evaluates one network over a grid of tile geometries (row
dimensions times aspect multipliers, with n_col = multiplier * n_row),
packs each point, prices it with the cost model, and reports per-aspect
minima plus the global area optimum.  Points are independent of each
other; evaluation order never changes the result.
"""

import enum
from dataclasses import dataclass, field

from .costmodel import (
    LatencyParams,
    TileCostParams,
    latency_pipelined,
    latency_sequential,
    tile_efficiency,
    total_tile_area,
)
from .fragmentation import (
    FragmentKind,
    FragmentSet,
    SortKey,
    TileGeometry,
    fragment_network,
    sort_fragments,
)
from .network import LogicalLayer, NetworkSpec, lower_network, plan_rapa, rapa_overrides_from_spec
from .packing.exact import DEFAULT_MAX_ITEMS, SolveBudget, pack_exact
from .packing.greedy import pack_greedy
from .packing.types import FitPolicy, PackingMode, PackingResult

DEFAULT_ROW_DIMS = (64, 128, 256, 512, 1024, 2048, 4096, 8192)
DEFAULT_ASPECTS = (1, 2, 3, 4, 5, 6, 7, 8)


class Packer(enum.Enum):
    GREEDY = "greedy"
    EXACT = "exact"
    GREEDY_THEN_EXACT = "greedy-then-exact"


@dataclass(frozen=True)
class RapaPlan:
    """Replication plan: first convolution factor, per-stage decay, and
    optional by-name overrides (applied on top of file-level ones)."""

    first_factor: int
    decay: int
    overrides: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class SweepConfig:
    mode: PackingMode = PackingMode.DENSE
    row_dims: tuple[int, ...] = DEFAULT_ROW_DIMS
    aspect_multipliers: tuple[int, ...] = DEFAULT_ASPECTS
    packer: Packer = Packer.GREEDY
    sort_key: SortKey = SortKey.COL_DESC_ROW_DESC
    policy: FitPolicy = FitPolicy.FIRST_FIT
    rapa: RapaPlan | None = None
    cost: TileCostParams = field(default_factory=lambda: _default_cost())
    latency: LatencyParams = field(default_factory=LatencyParams)
    budget: SolveBudget = field(default_factory=SolveBudget)
    max_exact_items: int = DEFAULT_MAX_ITEMS


def _default_cost() -> TileCostParams:
    return TileCostParams.from_anchor(TileGeometry(256, 256), 0.20)


@dataclass(frozen=True)
class SweepPoint:
    geometry: TileGeometry
    aspect: int
    mode: PackingMode
    fragment_total: int
    fragment_counts: dict[FragmentKind, int]
    bin_count: int
    fill_ratio: float
    dead_area: int
    efficiency: float
    total_area: float
    latency_sequential: float
    latency_pipelined: float
    packer_used: str
    optimal: bool | None = None   # None: optimality not assessed (greedy)
    degraded: bool = False        # exact requested but budget/size forced fallback
    nodes: int | None = None

    @property
    def sort_rank(self) -> tuple:
        return (self.total_area, self.geometry.n_row, self.geometry.n_col)


@dataclass(frozen=True)
class OptimizationReport:
    objective: str
    mode: PackingMode
    points: tuple[SweepPoint, ...]
    per_aspect_minima: tuple[SweepPoint, ...]
    optimum: SweepPoint


def prepare_layers(
    network: NetworkSpec | list[LogicalLayer],
    rapa: RapaPlan | None,
) -> list[LogicalLayer]:
    """Lower a network (if needed) and apply the replication plan."""
    if isinstance(network, NetworkSpec):
        layers = lower_network(network)
        file_overrides = rapa_overrides_from_spec(network)
    else:
        layers = list(network)
        file_overrides = {}
    if rapa is None:
        # per-layer overrides declared in the network file stand on their own
        if file_overrides:
            return plan_rapa(layers, 1, 1, file_overrides)
        return layers
    by_name = {layer.name: layer.layer_id for layer in layers}
    overrides = dict(file_overrides)
    for name, factor in rapa.overrides:
        if name not in by_name:
            raise ValueError(f"rapa override for unknown layer {name!r}")
        overrides[by_name[name]] = factor
    return plan_rapa(layers, rapa.first_factor, rapa.decay, overrides)


def _pack_point(
    fragments: FragmentSet,
    mode: PackingMode,
    config: SweepConfig,
) -> tuple[PackingResult, str, bool | None, bool, int | None]:
    if config.packer is Packer.GREEDY or config.packer is Packer.GREEDY_THEN_EXACT:
        return pack_greedy(fragments, mode, config.policy), "greedy", None, False, None
    if len(fragments) > config.max_exact_items:
        result = pack_greedy(fragments, mode, config.policy)
        return result, "greedy", False, True, None
    solution = pack_exact(fragments, mode, config.budget, config.max_exact_items)
    return solution.result, "exact", solution.optimal, not solution.optimal, solution.nodes


def evaluate_config(
    network: NetworkSpec | list[LogicalLayer],
    geometry: TileGeometry,
    config: SweepConfig,
    mode: PackingMode | None = None,
) -> SweepPoint:
    """Fragment, pack, and price one geometry."""
    mode = mode or config.mode
    layers = prepare_layers(network, config.rapa)
    fragments = fragment_network(layers, geometry)
    ordered = sort_fragments(fragments, config.sort_key)
    result, packer_used, optimal, degraded, nodes = _pack_point(ordered, mode, config)
    return _make_point(
        geometry, mode, layers, fragments, result, config,
        packer_used, optimal, degraded, nodes,
    )


def _make_point(
    geometry: TileGeometry,
    mode: PackingMode,
    layers: list[LogicalLayer],
    fragments: FragmentSet,
    result: PackingResult,
    config: SweepConfig,
    packer_used: str,
    optimal: bool | None,
    degraded: bool,
    nodes: int | None,
) -> SweepPoint:
    return SweepPoint(
        geometry=geometry,
        aspect=geometry.n_col // geometry.n_row if geometry.n_col % geometry.n_row == 0 else 0,
        mode=mode,
        fragment_total=len(fragments),
        fragment_counts=fragments.counts,
        bin_count=result.bin_count,
        fill_ratio=result.fill_ratio,
        dead_area=result.dead_area,
        efficiency=tile_efficiency(geometry, config.cost),
        total_area=total_tile_area(result.bin_count, geometry, config.cost),
        latency_sequential=latency_sequential(layers, config.latency),
        latency_pipelined=latency_pipelined(layers, config.latency),
        packer_used=packer_used,
        optimal=optimal,
        degraded=degraded,
        nodes=nodes,
    )


def compare_one_to_one(
    network: NetworkSpec | list[LogicalLayer],
    geometry: TileGeometry,
    config: SweepConfig,
    mode: PackingMode | None = None,
) -> SweepPoint:
    """Baseline that grants every fragment its own tile."""
    from .packing.types import Placement

    mode = mode or config.mode
    layers = prepare_layers(network, config.rapa)
    fragments = fragment_network(layers, geometry)
    placements = tuple(
        Placement(frag, idx, 0, 0) for idx, frag in enumerate(fragments)
    )
    result = PackingResult(mode, geometry, placements)
    return _make_point(
        geometry, mode, layers, fragments, result, config,
        "one-to-one", None, False, None,
    )


def optimize(
    network: NetworkSpec | list[LogicalLayer],
    config: SweepConfig,
) -> OptimizationReport:
    """Sweep the geometry grid and report the total-area optimum."""
    if not config.row_dims or not config.aspect_multipliers:
        raise ValueError("sweep grid is empty")
    points: list[SweepPoint] = []
    for aspect in config.aspect_multipliers:
        if aspect < 1:
            raise ValueError("aspect multipliers must be >= 1")
        for row_dim in config.row_dims:
            geometry = TileGeometry(row_dim, aspect * row_dim)
            points.append(evaluate_config(network, geometry, config))

    if config.packer is Packer.GREEDY_THEN_EXACT:
        points = _refine_optimum(network, config, points)

    minima = []
    for aspect in config.aspect_multipliers:
        candidates = [p for p in points if p.aspect == aspect]
        minima.append(min(candidates, key=lambda p: p.sort_rank))
    optimum = min(minima, key=lambda p: p.sort_rank)
    return OptimizationReport(
        objective="min-total-tile-area",
        mode=config.mode,
        points=tuple(points),
        per_aspect_minima=tuple(minima),
        optimum=optimum,
    )


def _refine_optimum(
    network: NetworkSpec | list[LogicalLayer],
    config: SweepConfig,
    points: list[SweepPoint],
) -> list[SweepPoint]:
    """Re-solve the greedy optimum exactly; adopt it only if it helps."""
    best_idx = min(range(len(points)), key=lambda i: points[i].sort_rank)
    best = points[best_idx]
    layers = prepare_layers(network, config.rapa)
    fragments = fragment_network(layers, best.geometry)
    if len(fragments) > config.max_exact_items:
        return points
    ordered = sort_fragments(fragments, config.sort_key)
    solution = pack_exact(ordered, config.mode, config.budget, config.max_exact_items)
    if solution.result.bin_count < best.bin_count:
        refined = _make_point(
            best.geometry, config.mode, layers, fragments, solution.result, config,
            "exact", solution.optimal, not solution.optimal, solution.nodes,
        )
        points[best_idx] = refined
    return points
