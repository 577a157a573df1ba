"""Brute-force reference for the exact packers.

Enumerates set partitions of the items (restricted-growth recursion):
item 0 goes to block 0, item t joins any existing block or opens the
next one.  A block is kept only while it still fits one bin, which is a
monotone property, and branches that already use as many blocks as the
best known answer are abandoned.  No other pruning, no bounds, no
shared code with the branch-and-bound solvers.

Dense single-bin feasibility asks for the cheapest division of a block
into shelves, found by dynamic programming over item subsets; pipeline
feasibility is two running sums.
"""

from ..fragmentation import FragmentSet
from .greedy import PackingError, _check_fits_bin
from .types import PackingMode

ORACLE_MAX_ITEMS = 10


def brute_force_oracle(
    fragments: FragmentSet,
    mode: PackingMode,
    max_items: int = ORACLE_MAX_ITEMS,
) -> int:
    """Optimal bin count by exhaustive partition enumeration."""
    if len(fragments) > max_items:
        raise PackingError(
            f"oracle is limited to {max_items} items (got {len(fragments)})"
        )
    _check_fits_bin(fragments)
    n = len(fragments)
    if n == 0:
        return 0

    geo = fragments.geometry
    extents = [f.extent for f in fragments]

    if mode is PackingMode.DENSE:
        fits = _DenseFeasibility(extents, geo.n_row, geo.n_col)

        def block_key(mask: int) -> tuple:
            return tuple(sorted(extents[i] for i in range(n) if mask >> i & 1))

        best = n  # singletons are always feasible

        def walk(t: int, blocks: list[int]) -> None:
            nonlocal best
            if len(blocks) >= best:
                return
            if t == n:
                best = len(blocks)
                return
            bit = 1 << t
            seen: set[tuple] = set()
            for idx, mask in enumerate(blocks):
                key = block_key(mask)
                if key in seen:
                    continue
                seen.add(key)
                if fits.feasible(mask | bit):
                    blocks[idx] = mask | bit
                    walk(t + 1, blocks)
                    blocks[idx] = mask
            if len(blocks) + 1 < best:
                blocks.append(bit)
                walk(t + 1, blocks)
                blocks.pop()

        walk(1, [1])
        return best

    # Pipeline: a block is feasible while both extent sums fit.
    best = n

    def walk_pipe(t: int, blocks: list[list[int]]) -> None:
        nonlocal best
        if len(blocks) >= best:
            return
        if t == n:
            best = len(blocks)
            return
        w, h = extents[t]
        seen: set[tuple[int, int]] = set()
        for block in blocks:
            key = (block[0], block[1])
            if key in seen:
                continue
            seen.add(key)
            if block[0] + w <= geo.n_row and block[1] + h <= geo.n_col:
                block[0] += w
                block[1] += h
                walk_pipe(t + 1, blocks)
                block[0] -= w
                block[1] -= h
        if len(blocks) + 1 < best:
            blocks.append([w, h])
            walk_pipe(t + 1, blocks)
            blocks.pop()

    walk_pipe(1, [list(extents[0])])
    return best


class _DenseFeasibility:
    """Single-bin shelf feasibility for item subsets, by subset DP."""

    def __init__(self, extents: list[tuple[int, int]], n_row: int, n_col: int) -> None:
        self.n_row = n_row
        self.n_col = n_col
        n = len(extents)
        size = 1 << n
        row_sum = [0] * size
        max_out = [0] * size
        for mask in range(1, size):
            low = mask & -mask
            i = low.bit_length() - 1
            rest = mask ^ low
            row_sum[mask] = row_sum[rest] + extents[i][0]
            max_out[mask] = max(max_out[rest], extents[i][1])
        self.row_sum = row_sum
        self.max_out = max_out
        self._min_height: dict[int, int] = {0: 0}

    def min_height(self, mask: int) -> int:
        """Least total shelf height that shelves the subset."""
        cached = self._min_height.get(mask)
        if cached is not None:
            return cached
        low = mask & -mask
        rest = mask ^ low
        best = self.n_col + 1  # sentinel: infeasible
        sub = rest
        while True:
            shelf = sub | low
            if self.row_sum[shelf] <= self.n_row:
                tail = self.min_height(mask ^ shelf)
                height = self.max_out[shelf] + tail
                if height < best:
                    best = height
            if sub == 0:
                break
            sub = (sub - 1) & rest
        self._min_height[mask] = best
        return best

    def feasible(self, mask: int) -> bool:
        return self.min_height(mask) <= self.n_col