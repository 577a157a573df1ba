"""Network descriptions and their lowering onto matrix shapes.

A network file is a TOML document: scalar metadata plus a ``[[layers]]``
list.  Each layer is either a convolution or a fully-connected layer and
lowers to one weight matrix of ``m_inp`` rows by ``m_out`` columns.  A
convolution is lowered im2col-style, so its matrix is applied once per
output position; that count is the layer's weight reuse.
"""

import enum
from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

NETWORK_FORMAT_VERSION = 1


class NetworkError(ValueError):
    """Raised for unparseable or invalid network descriptions."""


class LayerKind(enum.Enum):
    CONVOLUTION = "convolution"
    FULLY_CONNECTED = "fully-connected"


@dataclass(frozen=True)
class LayerSpec:
    """One declared layer, before lowering.

    Convolutions use (d_in, d_out, k, s, p, n_in); fully-connected layers
    use (fan_in, fan_out).  ``bias`` adds one input row to the lowered
    matrix.  ``rapa_override`` pins this layer's replication factor when a
    replication plan is applied (otherwise the plan's decay rule decides).
    """

    name: str
    kind: LayerKind
    d_in: int = 0
    d_out: int = 0
    k: int = 0
    s: int = 1
    p: int = 0
    n_in: int = 0
    fan_in: int = 0
    fan_out: int = 0
    bias: bool = False
    rapa_override: int | None = None

    def validate(self) -> None:
        def bad(fld: str, why: str) -> NetworkError:
            return NetworkError(f"layer {self.name!r}: field {fld!r} {why}")

        if self.kind is LayerKind.CONVOLUTION:
            for fld in ("d_in", "d_out", "k", "n_in"):
                if getattr(self, fld) < 1:
                    raise bad(fld, "must be >= 1")
            if self.s < 1:
                raise bad("s", "must be >= 1")
            if self.p < 0:
                raise bad("p", "must be >= 0")
            if self.n_in - self.k + 2 * self.p < 0:
                raise bad("k", f"does not fit the padded input ({self.n_in} - {self.k} + 2*{self.p} < 0)")
        else:
            for fld in ("fan_in", "fan_out"):
                if getattr(self, fld) < 1:
                    raise bad(fld, "must be >= 1")
        if self.rapa_override is not None and self.rapa_override < 1:
            raise bad("rapa_override", "must be >= 1")


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    layers: tuple[LayerSpec, ...]
    dataset: str = ""

    def validate(self) -> None:
        if not self.layers:
            raise NetworkError(f"network {self.name!r} has no layers")
        seen: set[str] = set()
        for layer in self.layers:
            if layer.name in seen:
                raise NetworkError(f"network {self.name!r}: duplicate layer name {layer.name!r}")
            seen.add(layer.name)
            layer.validate()


@dataclass(frozen=True)
class LogicalLayer:
    """A lowered layer: one weight matrix plus its execution counts.

    ``replication`` is the number of column-duplicated copies mapped in
    parallel (1 = no duplication); fragmentation emits each copy.
    """

    layer_id: int
    name: str
    kind: LayerKind
    m_inp: int
    m_out: int
    n_reuse: int
    replication: int = 1

    @property
    def weight_area(self) -> int:
        return self.m_inp * self.m_out


def weight_reuse(n_in: int, k: int, s: int, p: int) -> int:
    """Number of output positions of a square convolution, (edge)^2.

    The output edge is floor((n_in - k + 2p) / s) + 1.  Fully-connected
    layers are applied once; callers use 1 directly.
    """
    if n_in - k + 2 * p < 0:
        raise NetworkError(f"kernel {k} does not fit the padded input ({n_in} + 2*{p})")
    edge = (n_in - k + 2 * p) // s + 1
    return edge * edge


def lower_layer(spec: LayerSpec, layer_id: int = 0) -> LogicalLayer:
    """Lower a declared layer to its weight-matrix shape and reuse count."""
    spec.validate()
    extra = 1 if spec.bias else 0
    if spec.kind is LayerKind.CONVOLUTION:
        m_inp = spec.k * spec.k * spec.d_in + extra
        m_out = spec.d_out
        n_reuse = weight_reuse(spec.n_in, spec.k, spec.s, spec.p)
    else:
        m_inp = spec.fan_in + extra
        m_out = spec.fan_out
        n_reuse = 1
    return LogicalLayer(layer_id, spec.name, spec.kind, m_inp, m_out, n_reuse)


def lower_network(network: NetworkSpec) -> list[LogicalLayer]:
    network.validate()
    return [lower_layer(spec, i) for i, spec in enumerate(network.layers)]


def plan_rapa(
    layers: list[LogicalLayer],
    first_factor: int,
    decay: int,
    overrides: dict[int, int] | None = None,
) -> list[LogicalLayer]:
    """Assign replication factors along the layer stack.

    The first convolution gets ``first_factor``; each later convolution
    gets the previous convolution's factor divided by ``decay`` (floored,
    never below 1).  Fully-connected layers keep 1.  ``overrides`` maps
    layer_id to an explicit factor and wins over the decay rule.
    """
    if first_factor < 1:
        raise ValueError("first_factor must be >= 1")
    if decay < 1:
        raise ValueError("decay must be >= 1")
    overrides = overrides or {}
    unknown = set(overrides) - {layer.layer_id for layer in layers}
    if unknown:
        raise ValueError(f"rapa override for unknown layer id(s): {sorted(unknown)}")

    planned: list[LogicalLayer] = []
    conv_factor: int | None = None
    for layer in layers:
        if layer.kind is LayerKind.CONVOLUTION:
            conv_factor = first_factor if conv_factor is None else max(1, conv_factor // decay)
            factor = conv_factor
        else:
            factor = 1
        factor = overrides.get(layer.layer_id, factor)
        if factor < 1:
            raise ValueError(f"layer {layer.name!r}: replication must be >= 1")
        planned.append(replace(layer, replication=factor))
    return planned


def _layer_from_table(entry: dict, index: int, path: Path) -> LayerSpec:
    if not isinstance(entry, dict):
        raise NetworkError(f"{path}: layer #{index} is not a table")
    name = entry.get("name", f"layer{index}")
    try:
        kind = LayerKind(entry.get("kind", ""))
    except ValueError:
        raise NetworkError(
            f"{path}: layer {name!r}: field 'kind' must be 'convolution' or 'fully-connected'"
        ) from None
    known = {
        "name", "kind", "d_in", "d_out", "k", "s", "p", "n_in",
        "fan_in", "fan_out", "bias", "rapa_override",
    }
    for key in entry:
        if key not in known:
            raise NetworkError(f"{path}: layer {name!r}: unknown field {key!r}")

    def take(fld: str, default):
        value = entry.get(fld, default)
        if fld == "bias":
            if not isinstance(value, bool):
                raise NetworkError(f"{path}: layer {name!r}: field 'bias' must be a boolean")
            return value
        if fld == "rapa_override" and value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise NetworkError(f"{path}: layer {name!r}: field {fld!r} must be an integer")
        return value

    spec = LayerSpec(
        name=str(name),
        kind=kind,
        d_in=take("d_in", 0),
        d_out=take("d_out", 0),
        k=take("k", 0),
        s=take("s", 1),
        p=take("p", 0),
        n_in=take("n_in", 0),
        fan_in=take("fan_in", 0),
        fan_out=take("fan_out", 0),
        bias=take("bias", False),
        rapa_override=take("rapa_override", None),
    )
    try:
        spec.validate()
    except NetworkError as exc:
        raise NetworkError(f"{path}: {exc}") from None
    return spec


def load_network(path: str | Path) -> NetworkSpec:
    """Parse and validate a network file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise NetworkError(f"network file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise NetworkError(f"{path}: parse error: {exc}") from None

    version = doc.get("format_version")
    if version != NETWORK_FORMAT_VERSION:
        raise NetworkError(
            f"{path}: format_version must be {NETWORK_FORMAT_VERSION}, got {version!r}"
        )
    layers_raw = doc.get("layers", [])
    if not isinstance(layers_raw, list) or not layers_raw:
        raise NetworkError(f"{path}: network has no layers")
    layers = tuple(_layer_from_table(entry, i, path) for i, entry in enumerate(layers_raw))
    network = NetworkSpec(
        name=str(doc.get("name", path.stem)),
        dataset=str(doc.get("dataset", "")),
        layers=layers,
    )
    network.validate()
    return network


def rapa_overrides_from_spec(network: NetworkSpec) -> dict[int, int]:
    """Collect per-layer replication overrides declared in the network file."""
    return {
        i: spec.rapa_override
        for i, spec in enumerate(network.layers)
        if spec.rapa_override is not None
    }
