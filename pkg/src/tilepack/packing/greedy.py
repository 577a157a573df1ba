"""Greedy packers.

Dense mode is shelf packing: fragments sit side by side along the input
axis while a shelf is open; a shelf is as tall as its first fragment and
shelves stack along the output axis.  Pipeline mode places fragments
corner to corner on the diagonal, so each fragment's input and output
lines are private to it; a bin accepts a fragment only while both line
budgets hold.  Fragments are packed in the order given — callers sort
first (descending column extent keeps every shelf opener the tallest).
"""

from dataclasses import dataclass, field

from ..fragmentation import Fragment, FragmentSet
from .types import FitPolicy, PackingMode, PackingResult, Placement


class PackingError(ValueError):
    pass


def _check_fits_bin(fragments: FragmentSet) -> None:
    geo = fragments.geometry
    for frag in fragments:
        if frag.p_in > geo.n_row or frag.p_out > geo.n_col:
            raise PackingError(
                f"fragment of layer {frag.layer_name!r} ({frag.p_in}x{frag.p_out}) "
                f"does not fit a {geo} tile"
            )


@dataclass
class _Shelf:
    bin_idx: int
    base: int          # column offset of the shelf
    height: int        # column extent of the opening fragment
    row_used: int = 0


@dataclass
class _DenseBin:
    height_used: int = 0
    shelves: list[_Shelf] = field(default_factory=list)


def pack_dense_greedy(
    fragments: FragmentSet,
    policy: FitPolicy = FitPolicy.FIRST_FIT,
) -> PackingResult:
    """Shelf-pack fragments; returns placements in input order."""
    _check_fits_bin(fragments)
    geo = fragments.geometry
    bins: list[_DenseBin] = []
    shelves: list[_Shelf] = []  # global creation order
    placements: list[Placement] = []

    # Identical consecutive fragments can skip slots the previous one
    # already failed against: capacities only shrink.
    prev_extent: tuple[int, int] | None = None
    shelf_start = 0
    bin_start = 0

    for frag in fragments:
        if frag.extent != prev_extent:
            shelf_start = 0
            bin_start = 0

        placed = False
        if policy is FitPolicy.FIRST_FIT:
            for idx in range(shelf_start, len(shelves)):
                shelf = shelves[idx]
                if shelf.row_used + frag.p_in <= geo.n_row and frag.p_out <= shelf.height:
                    _place_on_shelf(placements, shelf, frag)
                    shelf_start, placed = idx, True
                    break
            if not placed:
                shelf_start = len(shelves)
                for idx in range(bin_start, len(bins)):
                    if bins[idx].height_used + frag.p_out <= geo.n_col:
                        _open_shelf(placements, bins, shelves, idx, frag)
                        bin_start, placed = idx, True
                        break
                if not placed:
                    bin_start = len(bins)
                    bins.append(_DenseBin())
                    _open_shelf(placements, bins, shelves, len(bins) - 1, frag)
        else:  # NEXT_FIT: only the most recent shelf, then the most recent bin
            if shelves:
                shelf = shelves[-1]
                if shelf.row_used + frag.p_in <= geo.n_row and frag.p_out <= shelf.height:
                    _place_on_shelf(placements, shelf, frag)
                    placed = True
            if not placed and bins and bins[-1].height_used + frag.p_out <= geo.n_col:
                _open_shelf(placements, bins, shelves, len(bins) - 1, frag)
                placed = True
            if not placed:
                bins.append(_DenseBin())
                _open_shelf(placements, bins, shelves, len(bins) - 1, frag)
        prev_extent = frag.extent

    return PackingResult(PackingMode.DENSE, geo, tuple(placements))


def _place_on_shelf(placements: list[Placement], shelf: _Shelf, frag: Fragment) -> None:
    placements.append(Placement(frag, shelf.bin_idx, shelf.row_used, shelf.base))
    shelf.row_used += frag.p_in


def _open_shelf(
    placements: list[Placement],
    bins: list[_DenseBin],
    shelves: list[_Shelf],
    bin_idx: int,
    frag: Fragment,
) -> None:
    target = bins[bin_idx]
    shelf = _Shelf(bin_idx=bin_idx, base=target.height_used, height=frag.p_out)
    target.height_used += frag.p_out
    target.shelves.append(shelf)
    shelves.append(shelf)
    _place_on_shelf(placements, shelf, frag)


@dataclass
class _PipeBin:
    row_used: int = 0
    col_used: int = 0


def pack_pipeline_greedy(
    fragments: FragmentSet,
    policy: FitPolicy = FitPolicy.FIRST_FIT,
) -> PackingResult:
    """Diagonally pack fragments with exclusive input and output lines."""
    _check_fits_bin(fragments)
    geo = fragments.geometry
    bins: list[_PipeBin] = []
    placements: list[Placement] = []
    prev_extent: tuple[int, int] | None = None
    bin_start = 0

    for frag in fragments:
        if frag.extent != prev_extent:
            bin_start = 0
        placed = False
        candidates = (
            range(bin_start, len(bins))
            if policy is FitPolicy.FIRST_FIT
            else range(max(0, len(bins) - 1), len(bins))
        )
        for idx in candidates:
            b = bins[idx]
            if b.row_used + frag.p_in <= geo.n_row and b.col_used + frag.p_out <= geo.n_col:
                placements.append(Placement(frag, idx, b.row_used, b.col_used))
                b.row_used += frag.p_in
                b.col_used += frag.p_out
                bin_start, placed = idx, True
                break
        if not placed:
            bins.append(_PipeBin(frag.p_in, frag.p_out))
            placements.append(Placement(frag, len(bins) - 1, 0, 0))
            bin_start = len(bins) - 1
        prev_extent = frag.extent

    return PackingResult(PackingMode.PIPELINE, geo, tuple(placements))


def pack_greedy(
    fragments: FragmentSet,
    mode: PackingMode,
    policy: FitPolicy = FitPolicy.FIRST_FIT,
) -> PackingResult:
    if mode is PackingMode.DENSE:
        return pack_dense_greedy(fragments, policy)
    return pack_pipeline_greedy(fragments, policy)
