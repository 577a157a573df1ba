"""CSV and JSON report writers.

Every writer produces byte-identical output for identical inputs: rows
come out in a fixed order, floats are formatted with repr (shortest
round-trip form), and wall-clock measurements are deliberately excluded
so reruns diff clean.
"""

import csv
import json
from typing import Any

from .costmodel import LatencyParams, latency_pipelined, latency_sequential
from .fragmentation import FragmentSet
from .network import LogicalLayer
from .packing.exact import ExactSolution
from .packing.types import PackingResult
from .sweep import OptimizationReport, SweepPoint

SCHEMA_VERSION = 1


def _num(x: Any) -> Any:
    """Round-trip-stable cell value for CSV."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, float):
        return repr(x)
    return x


def write_fragments_csv(path: str, frags: FragmentSet) -> None:
    header = [
        "layer_id", "layer_name", "replica", "grid_row", "grid_col",
        "p_in", "p_out", "kind", "area",
    ]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for f in frags:
            w.writerow([
                f.layer_id, f.layer_name, f.replica, f.grid_row, f.grid_col,
                f.p_in, f.p_out, f.kind.value, f.area,
            ])


def write_placements_csv(path: str, result: PackingResult) -> None:
    header = [
        "bin", "layer_id", "layer_name", "replica", "grid_row", "grid_col",
        "p_in", "p_out", "row_offset", "col_offset",
    ]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for p in result.placements:
            f = p.fragment
            w.writerow([
                p.bin_idx, f.layer_id, f.layer_name, f.replica, f.grid_row,
                f.grid_col, f.p_in, f.p_out, p.row_offset, p.col_offset,
            ])


def write_sweep_csv(path: str, report: OptimizationReport) -> None:
    header = [
        "n_row", "n_col", "aspect", "mode", "fragments", "bins",
        "fill_ratio", "dead_area", "efficiency", "total_area",
        "latency_sequential", "latency_pipelined", "packer", "optimal", "nodes",
    ]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for p in report.points:
            w.writerow([
                p.geometry.n_row, p.geometry.n_col, p.aspect, p.mode.value,
                p.fragment_total, p.bin_count, _num(p.fill_ratio),
                p.dead_area, _num(p.efficiency), _num(p.total_area),
                _num(p.latency_sequential), _num(p.latency_pipelined),
                p.packer_used,
                "" if p.optimal is None else int(p.optimal),
                "" if p.nodes is None else p.nodes,
            ])


def _point_dict(p: SweepPoint) -> dict[str, Any]:
    d: dict[str, Any] = {
        "n_row": p.geometry.n_row,
        "n_col": p.geometry.n_col,
        "aspect": p.aspect,
        "mode": p.mode.value,
        "fragments": p.fragment_total,
        "fragment_counts": {k.value: v for k, v in sorted(
            p.fragment_counts.items(), key=lambda kv: kv[0].value)},
        "bins": p.bin_count,
        "fill_ratio": p.fill_ratio,
        "dead_area": p.dead_area,
        "efficiency": p.efficiency,
        "total_area": p.total_area,
        "latency_sequential": p.latency_sequential,
        "latency_pipelined": p.latency_pipelined,
        "packer": p.packer_used,
    }
    if p.optimal is not None:
        d["optimal"] = p.optimal
    if p.nodes is not None:
        d["nodes"] = p.nodes
    if p.degraded:
        d["degraded"] = True
    return d


def pack_report_dict(
    result: PackingResult,
    frags: FragmentSet,
    exact: ExactSolution | None = None,
) -> dict[str, Any]:
    d: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "mode": result.mode.value,
        "tile": {"n_row": result.geometry.n_row, "n_col": result.geometry.n_col},
        "fragments": len(frags),
        "fragment_counts": {k.value: v for k, v in sorted(
            frags.counts.items(), key=lambda kv: kv[0].value)},
        "bins": result.bin_count,
        "used_area": result.used_area,
        "fill_ratio": result.fill_ratio,
        "dead_area": result.dead_area,
    }
    if exact is not None:
        d["exact"] = {
            "optimal": exact.optimal,
            "lower_bound": exact.lower_bound,
            "nodes": exact.nodes,
        }
    return d


def sweep_report_dict(report: OptimizationReport) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "objective": report.objective,
        "mode": report.mode.value,
        "optimum": _point_dict(report.optimum),
        "per_aspect_minima": [_point_dict(p) for p in report.per_aspect_minima],
        "points": [_point_dict(p) for p in report.points],
    }


def compare_report_dict(baseline: SweepPoint, packed: SweepPoint) -> dict[str, Any]:
    """One-fragment-per-tile baseline against an actual packing."""
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": packed.mode.value,
        "tile": {"n_row": packed.geometry.n_row, "n_col": packed.geometry.n_col},
        "one_to_one": _point_dict(baseline),
        "packed": _point_dict(packed),
        "tiles_saved": baseline.bin_count - packed.bin_count,
        "tile_ratio": (
            baseline.bin_count / packed.bin_count if packed.bin_count else 0.0
        ),
        "area_ratio": (
            baseline.total_area / packed.total_area if packed.total_area else 0.0
        ),
    }


def latency_report_dict(
    layers: list[LogicalLayer], params: LatencyParams
) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "t_tile": params.t_tile,
        "t_dig": params.t_dig,
        "t_com": params.t_com,
        "sequential": latency_sequential(layers, params),
        "pipelined": latency_pipelined(layers, params),
        "layers": [
            {
                "name": layer.name,
                "n_reuse": layer.n_reuse,
                "replication": layer.replication,
                "tile_passes": -(-layer.n_reuse // layer.replication),
            }
            for layer in layers
        ],
    }


def write_json(path: str, payload: dict[str, Any]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=False))
        fh.write("\n")
