"""Independent validation of packing results.

Both the greedy and the exact packers emit placements; this checker
re-derives feasibility from the raw coordinates alone, so a bug in a
packer cannot vouch for itself.
"""

from collections import Counter
from collections.abc import Iterable

from ..fragmentation import Fragment
from .types import PackingMode, PackingResult, Placement


def check_packing(
    result: PackingResult,
    expected: Iterable[Fragment] | None = None,
) -> list[str]:
    """Return a list of violation messages (empty when feasible)."""
    errors: list[str] = []
    geo = result.geometry

    if expected is not None:
        want = Counter(id(f) for f in expected)
        got = Counter(id(p.fragment) for p in result.placements)
        if want != got:
            errors.append("placements do not cover the fragment set exactly once")

    by_bin: dict[int, list[Placement]] = {}
    for p in result.placements:
        if p.bin_idx < 0:
            errors.append(f"negative bin index {p.bin_idx}")
            continue
        if p.row_offset < 0 or p.col_offset < 0:
            errors.append(f"bin {p.bin_idx}: negative origin for {p.fragment.layer_name}")
        if p.row_offset + p.fragment.p_in > geo.n_row or p.col_offset + p.fragment.p_out > geo.n_col:
            errors.append(f"bin {p.bin_idx}: {p.fragment.layer_name} exceeds the tile boundary")
        by_bin.setdefault(p.bin_idx, []).append(p)

    if result.placements:
        used = sorted(by_bin)
        if used != list(range(result.bin_count)):
            errors.append("bin indices are not contiguous from 0")

    for bin_idx, items in sorted(by_bin.items()):
        if result.mode is PackingMode.PIPELINE:
            errors.extend(_check_pipeline_bin(bin_idx, items, geo.n_row, geo.n_col))
        else:
            errors.extend(_check_dense_bin(bin_idx, items, geo.n_row, geo.n_col))
    return errors


def validate_packing(result: PackingResult, expected: Iterable[Fragment] | None = None) -> None:
    errors = check_packing(result, expected)
    if errors:
        raise AssertionError("infeasible packing: " + "; ".join(errors[:5]))


def _intervals_disjoint(spans: list[tuple[int, int]]) -> bool:
    spans = sorted(spans)
    return all(a_end <= b_start for (_, a_end), (b_start, _) in zip(spans, spans[1:]))


def _check_pipeline_bin(bin_idx: int, items: list[Placement], n_row: int, n_col: int) -> list[str]:
    errors = []
    if sum(p.fragment.p_in for p in items) > n_row:
        errors.append(f"bin {bin_idx}: input lines oversubscribed")
    if sum(p.fragment.p_out for p in items) > n_col:
        errors.append(f"bin {bin_idx}: output lines oversubscribed")
    rows = [(p.row_offset, p.row_offset + p.fragment.p_in) for p in items]
    cols = [(p.col_offset, p.col_offset + p.fragment.p_out) for p in items]
    if not _intervals_disjoint(rows) or not _intervals_disjoint(cols):
        errors.append(f"bin {bin_idx}: fragments share input or output lines")
    return errors


def _check_dense_bin(bin_idx: int, items: list[Placement], n_row: int, n_col: int) -> list[str]:
    # Shelves are identified by their base column offset; every fragment
    # must sit on a shelf base, shelf widths must fit the row budget, and
    # stacked shelf heights must fit the column budget.
    errors = []
    shelves: dict[int, list[Placement]] = {}
    for p in items:
        shelves.setdefault(p.col_offset, []).append(p)

    cursor = 0
    for base in sorted(shelves):
        members = shelves[base]
        if base < cursor:
            errors.append(f"bin {bin_idx}: shelf at column {base} overlaps the one below")
        height = max(p.fragment.p_out for p in members)
        cursor = base + height
        if cursor > n_col:
            errors.append(f"bin {bin_idx}: shelf at column {base} exceeds the column budget")
        if sum(p.fragment.p_in for p in members) > n_row:
            errors.append(f"bin {bin_idx}: shelf at column {base} oversubscribes input lines")
        rows = [(p.row_offset, p.row_offset + p.fragment.p_in) for p in members]
        if not _intervals_disjoint(rows):
            errors.append(f"bin {bin_idx}: overlapping fragments on shelf at column {base}")
    return errors
