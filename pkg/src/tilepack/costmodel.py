"""Tile-level cost models: array efficiency, area, and stack latency.

A tile of n_row x n_col cross-points needs unit-cell pitch drivers along
both edges plus a fixed-footprint control block of side d_cnt.  The
efficiency of a tile is the array's share of the whole footprint:

    e = (dui*duo*n*m) / (dui*duo*n*m + (dui*n + duo*m)*d_cnt + d_cnt^2)

d_cnt is usually unknown directly; it is calibrated from one published
(geometry, efficiency) anchor point by solving the quadratic above for
its positive root.
"""

import math
from dataclasses import dataclass, replace

from .fragmentation import TileGeometry
from .network import LogicalLayer


class CostModelError(ValueError):
    pass


@dataclass(frozen=True)
class TileCostParams:
    """Geometry-independent cost constants.

    d_unit_in/d_unit_out are the per-line driver pitches, d_cnt the side
    of the shared control block (same length unit).  cell_area_scale, if
    given, converts unit-cell areas to absolute ones; a_aux is a one-off
    additive chip overhead in absolute units.
    """

    d_unit_in: float = 1.0
    d_unit_out: float = 1.0
    d_cnt: float = 0.0
    cell_area_scale: float | None = None
    a_aux: float = 0.0

    def __post_init__(self) -> None:
        if self.d_unit_in <= 0 or self.d_unit_out <= 0:
            raise CostModelError("unit driver dimensions must be > 0")
        if self.d_cnt < 0:
            raise CostModelError("d_cnt must be >= 0")
        if self.cell_area_scale is not None and self.cell_area_scale <= 0:
            raise CostModelError("cell_area_scale must be > 0")
        if self.a_aux < 0:
            raise CostModelError("a_aux must be >= 0")

    @classmethod
    def from_anchor(
        cls,
        anchor: TileGeometry,
        efficiency: float,
        d_unit_in: float = 1.0,
        d_unit_out: float = 1.0,
        cell_area_scale: float | None = None,
        a_aux: float = 0.0,
    ) -> "TileCostParams":
        params = cls(d_unit_in, d_unit_out, 0.0, cell_area_scale, a_aux)
        d_cnt = calibrate_control_dimension(anchor, efficiency, params)
        return replace(params, d_cnt=d_cnt)


def _footprint(geometry: TileGeometry, params: TileCostParams) -> tuple[float, float]:
    array = params.d_unit_in * params.d_unit_out * geometry.n_row * geometry.n_col
    periphery = (
        params.d_unit_in * geometry.n_row + params.d_unit_out * geometry.n_col
    ) * params.d_cnt + params.d_cnt**2
    return array, array + periphery


def tile_efficiency(geometry: TileGeometry, params: TileCostParams) -> float:
    """Array share of the tile footprint, in (0, 1]."""
    array, total = _footprint(geometry, params)
    return array / total


def tile_area(geometry: TileGeometry, params: TileCostParams) -> float:
    """Footprint of one tile in unit-cell area (array / efficiency)."""
    return _footprint(geometry, params)[1]


def calibrate_control_dimension(
    anchor: TileGeometry,
    efficiency: float,
    params: TileCostParams | None = None,
) -> float:
    """Solve the efficiency expression for d_cnt at one anchor point.

    Rearranging e = A / (A + B*d + d^2) with A the array area and
    B the driver edge length gives d^2 + B*d + A*(1 - 1/e) = 0, whose
    constant term is non-positive for e <= 1, so the positive root is

        d = (-B + sqrt(B^2 - 4*A*(1 - 1/e))) / 2
    """
    if not 0.0 < efficiency <= 1.0:
        raise CostModelError("anchor efficiency must be in (0, 1]")
    params = params or TileCostParams()
    array = params.d_unit_in * params.d_unit_out * anchor.n_row * anchor.n_col
    edges = params.d_unit_in * anchor.n_row + params.d_unit_out * anchor.n_col
    constant = array * (1.0 - 1.0 / efficiency)
    return (-edges + math.sqrt(edges * edges - 4.0 * constant)) / 2.0


def total_tile_area(
    bin_count: int,
    geometry: TileGeometry,
    params: TileCostParams,
) -> float:
    """Chip area of ``bin_count`` tiles plus the auxiliary overhead."""
    if bin_count < 0:
        raise CostModelError("bin_count must be >= 0")
    scale = params.cell_area_scale if params.cell_area_scale is not None else 1.0
    return bin_count * tile_area(geometry, params) * scale + params.a_aux


@dataclass(frozen=True)
class LatencyParams:
    t_tile: float = 1.0  # one analog tile evaluation
    t_dig: float = 0.0   # digital post-processing
    t_com: float = 0.0   # communication

    def __post_init__(self) -> None:
        if self.t_tile <= 0:
            raise CostModelError("t_tile must be > 0")
        if self.t_dig < 0 or self.t_com < 0:
            raise CostModelError("latency terms must be >= 0")


def _tile_passes(layer: LogicalLayer) -> int:
    return -(-layer.n_reuse // layer.replication)


def latency_sequential(layers: list[LogicalLayer], params: LatencyParams) -> float:
    """One input through the whole stack, layer after layer."""
    passes = sum(_tile_passes(layer) for layer in layers)
    return params.t_tile * passes + params.t_dig + params.t_com


def latency_pipelined(layers: list[LogicalLayer], params: LatencyParams) -> float:
    """Steady-state initiation interval of the pipelined stack: the
    slowest stage, communication, or digital step dominates."""
    slowest = max((_tile_passes(layer) for layer in layers), default=0)
    return max(params.t_tile * slowest, params.t_com, params.t_dig)
