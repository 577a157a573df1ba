"""Run configuration loaded from a TOML file.

Precedence is defaults < config file < command-line flags; this module
covers the first two layers and hands the CLI a fully typed object to
override. Unknown keys are rejected so typos fail loudly instead of
silently running with defaults.
"""

from dataclasses import dataclass, replace

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python 3.10
    import tomli as tomllib

from .costmodel import LatencyParams, TileCostParams
from .fragmentation import SortKey, TileGeometry
from .packing.exact import DEFAULT_MAX_ITEMS, SolveBudget
from .packing.types import FitPolicy
from .sweep import DEFAULT_ASPECTS, DEFAULT_ROW_DIMS, Packer, RapaPlan


class ConfigError(ValueError):
    """Raised for unreadable, malformed, or unknown configuration."""


@dataclass(frozen=True)
class FileConfig:
    """Everything a config file can set, resolved against defaults."""

    cost: TileCostParams
    latency: LatencyParams
    row_dims: tuple[int, ...]
    aspects: tuple[int, ...]
    packer: Packer
    sort_key: SortKey
    policy: FitPolicy
    max_exact_items: int
    budget: SolveBudget
    rapa: RapaPlan | None
    seed: int


def default_config() -> FileConfig:
    return FileConfig(
        cost=TileCostParams.from_anchor(TileGeometry(256, 256), 0.20),
        latency=LatencyParams(),
        row_dims=DEFAULT_ROW_DIMS,
        aspects=DEFAULT_ASPECTS,
        packer=Packer.GREEDY,
        sort_key=SortKey.COL_DESC_ROW_DESC,
        policy=FitPolicy.FIRST_FIT,
        max_exact_items=DEFAULT_MAX_ITEMS,
        budget=SolveBudget(),
        rapa=None,
        seed=0,
    )


def _require(table: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")


def _enum(cls, value, where: str):
    try:
        return cls(value)
    except ValueError:
        options = ", ".join(m.value for m in cls)
        raise ConfigError(
            f"{where} must be one of: {options} (got {value!r})"
        ) from None


def _int_list(value, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value or not all(
        isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in value
    ):
        raise ConfigError(f"{where} must be a non-empty list of integers >= 1")
    return tuple(value)


def _cost_params(table: dict) -> TileCostParams:
    _require(table, {
        "d_unit_in", "d_unit_out", "d_cnt", "anchor_n_row", "anchor_n_col",
        "anchor_efficiency", "cell_area_scale", "a_aux",
    }, "[cost]")
    anchor_keys = {"anchor_n_row", "anchor_n_col", "anchor_efficiency"}
    has_anchor = anchor_keys & set(table)
    if has_anchor and "d_cnt" in table:
        raise ConfigError("[cost] sets both d_cnt and an anchor point; pick one")
    if has_anchor and has_anchor != anchor_keys:
        missing = sorted(anchor_keys - has_anchor)[0]
        raise ConfigError(f"[cost] anchor point is missing {missing!r}")
    common = dict(
        d_unit_in=float(table.get("d_unit_in", 1.0)),
        d_unit_out=float(table.get("d_unit_out", 1.0)),
        cell_area_scale=table.get("cell_area_scale"),
        a_aux=float(table.get("a_aux", 0.0)),
    )
    if common["cell_area_scale"] is not None:
        common["cell_area_scale"] = float(common["cell_area_scale"])
    if has_anchor:
        anchor = TileGeometry(int(table["anchor_n_row"]), int(table["anchor_n_col"]))
        return TileCostParams.from_anchor(
            anchor, float(table["anchor_efficiency"]), **common,
        )
    return TileCostParams(d_cnt=float(table.get("d_cnt", 0.0)), **common)


def _rapa_plan(table: dict) -> RapaPlan:
    _require(table, {"first_factor", "decay", "overrides"}, "[rapa]")
    overrides = table.get("overrides", {})
    if not isinstance(overrides, dict):
        raise ConfigError("[rapa] overrides must be a table of layer = factor")
    return RapaPlan(
        first_factor=int(table.get("first_factor", 1)),
        decay=int(table.get("decay", 1)),
        overrides=tuple(sorted(
            (str(k), int(v)) for k, v in overrides.items()
        )),
    )


def load_config(path: str | None) -> FileConfig:
    """Parse a TOML config file; with path None, return pure defaults."""
    cfg = default_config()
    if path is None:
        return cfg
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path!r}: {exc}") from exc

    _require(data, {"seed", "cost", "latency", "sweep", "packing", "rapa"}, path)

    if "seed" in data:
        cfg = replace(cfg, seed=int(data["seed"]))
    if "cost" in data:
        cfg = replace(cfg, cost=_cost_params(data["cost"]))
    if "latency" in data:
        lat = data["latency"]
        _require(lat, {"t_tile", "t_dig", "t_com"}, "[latency]")
        cfg = replace(cfg, latency=LatencyParams(
            t_tile=float(lat.get("t_tile", 1.0)),
            t_dig=float(lat.get("t_dig", 0.0)),
            t_com=float(lat.get("t_com", 0.0)),
        ))
    if "sweep" in data:
        sw = data["sweep"]
        _require(sw, {"row_dims", "aspects", "packer"}, "[sweep]")
        if "row_dims" in sw:
            cfg = replace(cfg, row_dims=_int_list(sw["row_dims"], "[sweep] row_dims"))
        if "aspects" in sw:
            cfg = replace(cfg, aspects=_int_list(sw["aspects"], "[sweep] aspects"))
        if "packer" in sw:
            cfg = replace(cfg, packer=_enum(Packer, sw["packer"], "[sweep] packer"))
    if "packing" in data:
        pk = data["packing"]
        _require(pk, {"sort", "policy", "max_exact_items", "max_nodes",
                      "max_seconds"}, "[packing]")
        if "sort" in pk:
            cfg = replace(cfg, sort_key=_enum(SortKey, pk["sort"], "[packing] sort"))
        if "policy" in pk:
            cfg = replace(cfg, policy=_enum(FitPolicy, pk["policy"],
                                            "[packing] policy"))
        if "max_exact_items" in pk:
            cfg = replace(cfg, max_exact_items=int(pk["max_exact_items"]))
        budget = cfg.budget
        if "max_nodes" in pk:
            budget = replace(budget, max_nodes=int(pk["max_nodes"]))
        if "max_seconds" in pk:
            budget = replace(budget, max_seconds=float(pk["max_seconds"]))
        cfg = replace(cfg, budget=budget)
    if "rapa" in data:
        cfg = replace(cfg, rapa=_rapa_plan(data["rapa"]))
    return cfg
