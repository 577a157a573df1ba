"""Command-line interface.

Five subcommands cover the workflow: ``fragments`` (cut a network into
tile-sized pieces), ``pack`` (place fragments into tiles), ``sweep``
(search tile geometries for minimum chip area), ``latency`` (time a
stack under both execution styles), and ``compare`` (packed mapping
against the one-fragment-per-tile baseline).

Reports land in the output directory (``-o``, or the TILEPACK_OUTPUT_DIR
environment variable) as CSV/JSON; identical inputs give byte-identical
files. Wall-clock numbers are printed to the console only.
"""

import argparse
import os
import re
import sys
from dataclasses import dataclass, replace

from . import reports
from .config import ConfigError, FileConfig, load_config
from .costmodel import CostModelError, LatencyParams
from .fragmentation import (
    FragmentationError,
    SortKey,
    TileGeometry,
    fragment_network,
    sort_fragments,
)
from .network import NetworkError, load_network
from .packing.exact import pack_exact
from .packing.greedy import PackingError, pack_greedy
from .packing.types import FitPolicy, PackingMode
from .render import render_layout
from .sweep import (
    Packer,
    RapaPlan,
    SweepConfig,
    compare_one_to_one,
    evaluate_config,
    optimize,
    prepare_layers,
)

_USER_ERRORS = (
    NetworkError, FragmentationError, PackingError, CostModelError,
    ConfigError, ValueError, OSError,
)


@dataclass(frozen=True)
class RunConfig:
    """One parsed invocation: what to run, on what, and where to write."""

    subcommand: str
    network: str
    config: str | None
    outdir: str
    csv: bool
    json: bool
    seed: int


def _parse_tile(text: str) -> TileGeometry:
    m = re.fullmatch(r"(\d+)x(\d+)", text, re.IGNORECASE)
    if m is None:
        raise ValueError(f"tile must be ROWSxCOLS, e.g. 512x512 (got {text!r})")
    return TileGeometry(int(m.group(1)), int(m.group(2)))


def _parse_rapa(text: str) -> RapaPlan:
    m = re.fullmatch(r"(\d+)/(\d+)", text)
    if m is None:
        raise ValueError(f"rapa must be FIRST/DECAY, e.g. 128/4 (got {text!r})")
    return RapaPlan(int(m.group(1)), int(m.group(2)))


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"{flag} must be comma-separated integers") from None
    if not values or any(v < 1 for v in values):
        raise ValueError(f"{flag} values must be >= 1")
    return values


def _enum_names(cls) -> list[str]:
    return [m.value for m in cls]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilepack",
        description="Map neural-network layers onto crossbar-array tiles.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--network", required=True,
                        help="network description file (TOML)")
    common.add_argument("--config", help="run configuration file (TOML)")
    common.add_argument("-o", "--out", default=None,
                        help="output directory (default: $TILEPACK_OUTPUT_DIR or .)")
    common.add_argument("--csv", action="store_true",
                        help="write only CSV reports")
    common.add_argument("--json", action="store_true",
                        help="write only JSON reports")
    common.add_argument("--seed", type=int, default=None,
                        help="seed recorded for randomized instance generation")
    common.add_argument("--rapa", default=None, metavar="FIRST/DECAY",
                        help="replication plan, e.g. 128/4")

    packing = argparse.ArgumentParser(add_help=False)
    packing.add_argument("--tile", required=True, metavar="RxC",
                         help="tile geometry, e.g. 512x512")
    packing.add_argument("--mode", choices=_enum_names(PackingMode),
                         default=None, help="packing mode (default dense)")
    packing.add_argument("--sort", choices=_enum_names(SortKey), default=None,
                         help="fragment ordering before packing")

    p = sub.add_parser("fragments", parents=[common],
                       help="cut a network into tile-sized fragments")
    p.add_argument("--tile", required=True, metavar="RxC")
    p.add_argument("--sort", choices=_enum_names(SortKey), default=None)
    p.set_defaults(func=_cmd_fragments)

    p = sub.add_parser("pack", parents=[common, packing],
                       help="pack fragments into tiles")
    p.add_argument("--policy", choices=_enum_names(FitPolicy), default=None,
                   help="greedy shelf policy")
    p.add_argument("--exact", action="store_true",
                   help="branch-and-bound instead of the greedy packer")
    p.add_argument("--render", choices=["svg", "ascii"], default=None,
                   help="also write a per-bin layout drawing")
    p.set_defaults(func=_cmd_pack)

    p = sub.add_parser("sweep", parents=[common],
                       help="search tile geometries for minimum total area")
    p.add_argument("--mode", choices=_enum_names(PackingMode), default=None)
    p.add_argument("--sort", choices=_enum_names(SortKey), default=None)
    p.add_argument("--policy", choices=_enum_names(FitPolicy), default=None)
    p.add_argument("--packer", choices=_enum_names(Packer), default=None)
    p.add_argument("--row-dims", default=None, metavar="N,N,...",
                   help="row dimensions to sweep (default 64..8192)")
    p.add_argument("--aspects", default=None, metavar="M,M,...",
                   help="aspect multipliers, n_col = M*n_row (default 1..8)")
    p.add_argument("--square-only", action="store_true",
                   help="restrict the sweep to square tiles")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("latency", parents=[common],
                       help="sequential and pipelined stack latency")
    p.add_argument("--t-tile", type=float, default=None)
    p.add_argument("--t-dig", type=float, default=None)
    p.add_argument("--t-com", type=float, default=None)
    p.set_defaults(func=_cmd_latency)

    p = sub.add_parser("compare", parents=[common, packing],
                       help="packed mapping vs one fragment per tile")
    p.add_argument("--policy", choices=_enum_names(FitPolicy), default=None)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=_cmd_compare)
    return parser


def _run_config(args: argparse.Namespace, cfg: FileConfig) -> RunConfig:
    outdir = args.out or os.environ.get("TILEPACK_OUTPUT_DIR") or "."
    # neither flag means both formats
    want_csv = args.csv or not args.json
    want_json = args.json or not args.csv
    return RunConfig(
        subcommand=args.subcommand,
        network=args.network,
        config=args.config,
        outdir=outdir,
        csv=want_csv,
        json=want_json,
        seed=args.seed if args.seed is not None else cfg.seed,
    )


def _sweep_config(args: argparse.Namespace, cfg: FileConfig) -> SweepConfig:
    """Fold CLI flags over the file config into one SweepConfig."""
    sc = SweepConfig(
        mode=PackingMode(args.mode) if getattr(args, "mode", None) else PackingMode.DENSE,
        row_dims=cfg.row_dims,
        aspect_multipliers=cfg.aspects,
        packer=cfg.packer,
        sort_key=cfg.sort_key,
        policy=cfg.policy,
        rapa=cfg.rapa,
        cost=cfg.cost,
        latency=cfg.latency,
        budget=cfg.budget,
        max_exact_items=cfg.max_exact_items,
    )
    if getattr(args, "sort", None):
        sc = replace(sc, sort_key=SortKey(args.sort))
    if getattr(args, "policy", None):
        sc = replace(sc, policy=FitPolicy(args.policy))
    if getattr(args, "rapa", None):
        sc = replace(sc, rapa=_parse_rapa(args.rapa))
    return sc


def _outpath(run: RunConfig, name: str) -> str:
    os.makedirs(run.outdir, exist_ok=True)
    return os.path.join(run.outdir, name)


def _stem(run: RunConfig) -> str:
    base = os.path.basename(run.network)
    return base.rsplit(".", 1)[0] if "." in base else base


def _cmd_fragments(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    run = _run_config(args, cfg)
    sc = _sweep_config(args, cfg)
    network = load_network(run.network)
    geometry = _parse_tile(args.tile)
    layers = prepare_layers(network, sc.rapa)
    frags = sort_fragments(fragment_network(layers, geometry), sc.sort_key)
    written = []
    if run.csv:
        path = _outpath(run, f"{_stem(run)}-fragments.csv")
        reports.write_fragments_csv(path, frags)
        written.append(path)
    if run.json:
        payload = {
            "schema_version": reports.SCHEMA_VERSION,
            "network": network.name,
            "tile": {"n_row": geometry.n_row, "n_col": geometry.n_col},
            "fragments": len(frags),
            "counts": {k.value: v for k, v in sorted(
                frags.counts.items(), key=lambda kv: kv[0].value)},
            "total_area": frags.total_area,
        }
        path = _outpath(run, f"{_stem(run)}-fragments.json")
        reports.write_json(path, payload)
        written.append(path)
    counts = ", ".join(
        f"{k.value}={v}" for k, v in sorted(
            frags.counts.items(), key=lambda kv: kv[0].value) if v
    )
    print(f"{network.name}: {len(frags)} fragments on {geometry} ({counts})")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_pack(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    run = _run_config(args, cfg)
    sc = _sweep_config(args, cfg)
    network = load_network(run.network)
    geometry = _parse_tile(args.tile)
    mode = PackingMode(args.mode) if args.mode else PackingMode.DENSE
    layers = prepare_layers(network, sc.rapa)
    frags = sort_fragments(fragment_network(layers, geometry), sc.sort_key)

    exact_solution = None
    if args.exact:
        exact_solution = pack_exact(frags, mode, sc.budget, sc.max_exact_items)
        result = exact_solution.result
    else:
        result = pack_greedy(frags, mode, sc.policy)

    print(f"{network.name}: {result.bin_count} bins of {geometry} "
          f"({mode.value}, fill {result.fill_ratio:.3f})")
    if exact_solution is not None:
        status = "optimal" if exact_solution.optimal else "budget exhausted"
        print(f"exact: {status}, lower bound {exact_solution.lower_bound}, "
              f"{exact_solution.nodes} nodes, "
              f"{exact_solution.runtime_seconds:.3f}s")

    written = []
    if run.csv:
        path = _outpath(run, f"{_stem(run)}-{mode.value}-placements.csv")
        reports.write_placements_csv(path, result)
        written.append(path)
    if run.json:
        path = _outpath(run, f"{_stem(run)}-{mode.value}-pack.json")
        reports.write_json(
            path, reports.pack_report_dict(result, frags, exact_solution))
        written.append(path)
    if args.render:
        ext = "svg" if args.render == "svg" else "txt"
        path = _outpath(run, f"{_stem(run)}-{mode.value}-layout.{ext}")
        with open(path, "w", newline="") as fh:
            fh.write(render_layout(result, args.render))
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    run = _run_config(args, cfg)
    sc = _sweep_config(args, cfg)
    if args.packer:
        sc = replace(sc, packer=Packer(args.packer))
    if args.row_dims:
        sc = replace(sc, row_dims=_parse_int_list(args.row_dims, "--row-dims"))
    if args.aspects:
        sc = replace(sc, aspect_multipliers=_parse_int_list(args.aspects,
                                                            "--aspects"))
    if args.square_only:
        sc = replace(sc, aspect_multipliers=(1,))
    network = load_network(run.network)
    report = optimize(network, sc)

    best = report.optimum
    print(f"{network.name}: optimum {best.geometry} -> {best.bin_count} tiles, "
          f"total area {best.total_area:.6g} ({best.mode.value}, "
          f"{best.packer_used})")
    for point in report.per_aspect_minima:
        print(f"  aspect {point.aspect}: {point.geometry} -> "
              f"{point.bin_count} tiles, area {point.total_area:.6g}")

    written = []
    if run.csv:
        path = _outpath(run, f"{_stem(run)}-{sc.mode.value}-sweep.csv")
        reports.write_sweep_csv(path, report)
        written.append(path)
    if run.json:
        path = _outpath(run, f"{_stem(run)}-{sc.mode.value}-sweep.json")
        reports.write_json(path, reports.sweep_report_dict(report))
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_latency(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    run = _run_config(args, cfg)
    sc = _sweep_config(args, cfg)
    params = cfg.latency
    if args.t_tile is not None or args.t_dig is not None or args.t_com is not None:
        params = LatencyParams(
            t_tile=args.t_tile if args.t_tile is not None else params.t_tile,
            t_dig=args.t_dig if args.t_dig is not None else params.t_dig,
            t_com=args.t_com if args.t_com is not None else params.t_com,
        )
    network = load_network(run.network)
    layers = prepare_layers(network, sc.rapa)
    payload = reports.latency_report_dict(layers, params)
    print(f"{network.name}: sequential {payload['sequential']:.6g}, "
          f"pipelined {payload['pipelined']:.6g}")
    if run.json:
        path = _outpath(run, f"{_stem(run)}-latency.json")
        reports.write_json(path, payload)
        print(f"wrote {path}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    run = _run_config(args, cfg)
    sc = _sweep_config(args, cfg)
    if args.exact:
        sc = replace(sc, packer=Packer.EXACT)
    network = load_network(run.network)
    geometry = _parse_tile(args.tile)
    mode = PackingMode(args.mode) if args.mode else PackingMode.DENSE
    baseline = compare_one_to_one(network, geometry, sc, mode)
    packed = evaluate_config(network, geometry, sc, mode)
    payload = reports.compare_report_dict(baseline, packed)
    print(f"{network.name} on {geometry} ({mode.value}): one-to-one "
          f"{baseline.bin_count} tiles vs packed {packed.bin_count} "
          f"({payload['tiles_saved']} saved, area ratio "
          f"{payload['area_ratio']:.3f})")
    if run.json:
        path = _outpath(run, f"{_stem(run)}-{mode.value}-compare.json")
        reports.write_json(path, payload)
        print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
