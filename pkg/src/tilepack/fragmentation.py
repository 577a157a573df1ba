"""Cutting lowered weight matrices into tile-sized fragments.

A tile is a fixed crossbar geometry (n_row input lines by n_col output
lines).  A matrix larger than the tile is cut on a regular grid into
ceil(m_inp/n_row) * ceil(m_out/n_col) fragments; only the last strip in
each direction can be short.  Fragment kinds record which tile dimension
a fragment saturates, which decides who can share a tile with it.
"""

import enum
from dataclasses import dataclass

from .network import LogicalLayer


class FragmentationError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TileGeometry:
    n_row: int
    n_col: int

    def __post_init__(self) -> None:
        if self.n_row < 1 or self.n_col < 1:
            raise FragmentationError("tile dimensions must be >= 1")

    @property
    def area(self) -> int:
        return self.n_row * self.n_col

    def __str__(self) -> str:
        return f"{self.n_row}x{self.n_col}"


class FragmentKind(enum.Enum):
    FULLY_MAPPED = "fully_mapped"  # p_in = n_row and p_out = n_col
    ROW_FULL = "row_full"          # p_in = n_row, p_out < n_col
    COL_FULL = "col_full"          # p_in < n_row, p_out = n_col
    SPARSE = "sparse"              # strictly inside the tile in both dims


@dataclass(frozen=True)
class Fragment:
    """One rectangular block of a (replicated) layer matrix.

    Identity is (layer_id, replica, grid_row, grid_col); extents are the
    occupied input lines p_in and output lines p_out.
    """

    layer_id: int
    layer_name: str
    replica: int
    grid_row: int
    grid_col: int
    p_in: int
    p_out: int
    kind: FragmentKind

    @property
    def area(self) -> int:
        return self.p_in * self.p_out

    @property
    def extent(self) -> tuple[int, int]:
        return (self.p_in, self.p_out)


@dataclass(frozen=True)
class FragmentSet:
    geometry: TileGeometry
    fragments: tuple[Fragment, ...]

    def __len__(self) -> int:
        return len(self.fragments)

    def __iter__(self):
        return iter(self.fragments)

    @property
    def counts(self) -> dict[FragmentKind, int]:
        out = {kind: 0 for kind in FragmentKind}
        for frag in self.fragments:
            out[frag.kind] += 1
        return out

    @property
    def total_area(self) -> int:
        return sum(f.area for f in self.fragments)


def _strips(extent: int, cap: int) -> list[int]:
    full, rest = divmod(extent, cap)
    return [cap] * full + ([rest] if rest else [])


def classify(p_in: int, p_out: int, geometry: TileGeometry) -> FragmentKind:
    row_full = p_in == geometry.n_row
    col_full = p_out == geometry.n_col
    if row_full and col_full:
        return FragmentKind.FULLY_MAPPED
    if row_full:
        return FragmentKind.ROW_FULL
    if col_full:
        return FragmentKind.COL_FULL
    return FragmentKind.SPARSE


def fragment_layer(layer: LogicalLayer, geometry: TileGeometry) -> list[Fragment]:
    """Grid-cut one lowered layer, once per replica.

    Every fragment satisfies 1 <= p_in <= n_row and 1 <= p_out <= n_col,
    and the fragment areas of one replica sum to m_inp * m_out.
    """
    if layer.m_inp < 1 or layer.m_out < 1:
        raise FragmentationError(f"layer {layer.name!r}: empty matrix")
    row_strips = _strips(layer.m_inp, geometry.n_row)
    col_strips = _strips(layer.m_out, geometry.n_col)
    fragments = []
    for replica in range(layer.replication):
        for gi, p_in in enumerate(row_strips):
            for gj, p_out in enumerate(col_strips):
                fragments.append(
                    Fragment(
                        layer_id=layer.layer_id,
                        layer_name=layer.name,
                        replica=replica,
                        grid_row=gi,
                        grid_col=gj,
                        p_in=p_in,
                        p_out=p_out,
                        kind=classify(p_in, p_out, geometry),
                    )
                )
    return fragments


def fragment_network(layers: list[LogicalLayer], geometry: TileGeometry) -> FragmentSet:
    """Fragment every layer of a lowered network, in layer order."""
    fragments: list[Fragment] = []
    for layer in layers:
        fragments.extend(fragment_layer(layer, geometry))
    return FragmentSet(geometry, tuple(fragments))


class SortKey(enum.Enum):
    """Packing orders.  Column-descending is the default: the shelf packer
    relies on later fragments never being taller than the shelf opener."""

    COL_DESC_ROW_DESC = "col-desc-row-desc"
    ROW_DESC_COL_DESC = "row-desc-col-desc"
    ROW_ASC_COL_ASC = "row-asc-col-asc"


_SORT_FUNCS = {
    SortKey.COL_DESC_ROW_DESC: lambda f: (-f.p_out, -f.p_in),
    SortKey.ROW_DESC_COL_DESC: lambda f: (-f.p_in, -f.p_out),
    SortKey.ROW_ASC_COL_ASC: lambda f: (f.p_in, f.p_out),
}


def sort_fragments(fragments: FragmentSet, key: SortKey = SortKey.COL_DESC_ROW_DESC) -> FragmentSet:
    """Stable-sort a fragment set for packing."""
    ordered = sorted(fragments.fragments, key=_SORT_FUNCS[key])
    return FragmentSet(fragments.geometry, tuple(ordered))
