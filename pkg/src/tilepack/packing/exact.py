"""Exact bin-minimal packing by branch and bound.

Both solvers branch directly on the combinatorial structure instead of
handing a model to a MIP engine.  Dense mode searches the level (shelf)
formulation: items are taken in non-increasing column order, so the
first item of a level is its tallest and the first level of a bin is
the tallest in the bin; a step either joins an open level, opens a
level in an open bin, or opens a bin.  Pipeline mode is two-resource
(vector) packing: a bin tracks its remaining input and output lines.

The greedy packer seeds the incumbent, so a budget-exhausted solve still
returns a feasible (merely unproven) solution.
"""

import time
from dataclasses import dataclass

from ..fragmentation import Fragment, FragmentSet
from .greedy import PackingError, pack_dense_greedy, pack_pipeline_greedy, _check_fits_bin
from .types import FitPolicy, PackingMode, PackingResult, Placement

DEFAULT_MAX_ITEMS = 40


@dataclass(frozen=True)
class SolveBudget:
    max_nodes: int = 10_000_000
    max_seconds: float | None = 60.0


@dataclass(frozen=True)
class ExactSolution:
    result: PackingResult
    optimal: bool
    lower_bound: int
    nodes: int
    runtime_seconds: float

    @property
    def bin_count(self) -> int:
        return self.result.bin_count


class _Exhausted(Exception):
    pass


class _Proven(Exception):
    pass


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _sorted_for_search(fragments: FragmentSet) -> list[Fragment]:
    return sorted(
        fragments,
        key=lambda f: (-f.p_out, -f.p_in, f.layer_id, f.replica, f.grid_row, f.grid_col),
    )


def pack_dense_exact(
    fragments: FragmentSet,
    budget: SolveBudget | None = None,
    max_items: int = DEFAULT_MAX_ITEMS,
) -> ExactSolution:
    return _solve(fragments, PackingMode.DENSE, budget or SolveBudget(), max_items)


def pack_pipeline_exact(
    fragments: FragmentSet,
    budget: SolveBudget | None = None,
    max_items: int = DEFAULT_MAX_ITEMS,
) -> ExactSolution:
    return _solve(fragments, PackingMode.PIPELINE, budget or SolveBudget(), max_items)


def pack_exact(
    fragments: FragmentSet,
    mode: PackingMode,
    budget: SolveBudget | None = None,
    max_items: int = DEFAULT_MAX_ITEMS,
) -> ExactSolution:
    if mode is PackingMode.DENSE:
        return pack_dense_exact(fragments, budget, max_items)
    return pack_pipeline_exact(fragments, budget, max_items)


def _solve(
    fragments: FragmentSet,
    mode: PackingMode,
    budget: SolveBudget,
    max_items: int,
) -> ExactSolution:
    if len(fragments) > max_items:
        raise PackingError(
            f"exact solver is limited to {max_items} items (got {len(fragments)}); "
            f"raise max_items or use the greedy packer"
        )
    _check_fits_bin(fragments)
    started = time.perf_counter()
    geo = fragments.geometry

    if not fragments:
        empty = PackingResult(mode, geo, ())
        return ExactSolution(empty, True, 0, 0, time.perf_counter() - started)

    items = _sorted_for_search(fragments)
    ordered = FragmentSet(geo, tuple(items))
    if mode is PackingMode.DENSE:
        incumbent = pack_dense_greedy(ordered, FitPolicy.FIRST_FIT)
        searcher = _DenseSearch(items, geo.n_row, geo.n_col)
    else:
        incumbent = pack_pipeline_greedy(ordered, FitPolicy.FIRST_FIT)
        searcher = _PipelineSearch(items, geo.n_row, geo.n_col)

    root_lb = searcher.root_lower_bound()
    best_count = incumbent.bin_count
    best_result = incumbent
    proven = best_count <= root_lb

    if not proven:
        searcher.best = best_count
        deadline = None
        if budget.max_seconds is not None:
            deadline = started + budget.max_seconds
        try:
            searcher.run(budget.max_nodes, deadline)
            proven = True
        except _Proven:
            proven = True
        except _Exhausted:
            proven = False
        if searcher.best_choices is not None:
            best_count = searcher.best
            best_result = searcher.rebuild(mode, geo)

    return ExactSolution(
        result=best_result,
        optimal=proven,
        lower_bound=root_lb,
        nodes=searcher.nodes,
        runtime_seconds=time.perf_counter() - started,
    )


class _SearchBase:
    def __init__(self, items: list[Fragment], n_row: int, n_col: int) -> None:
        self.items = items
        self.n_row = n_row
        self.n_col = n_col
        self.bin_area = n_row * n_col
        areas = [f.area for f in items]
        # suffix_area[t] = total area of items t..end
        self.suffix_area = [0] * (len(items) + 1)
        for t in range(len(items) - 1, -1, -1):
            self.suffix_area[t] = self.suffix_area[t + 1] + areas[t]
        self.best = len(items) + 1
        self.best_choices: list[tuple] | None = None
        self.choices: list[tuple] = []
        self.nodes = 0
        self._node_limit = 0
        self._deadline: float | None = None

    def run(self, node_limit: int, deadline: float | None) -> None:
        self._node_limit = node_limit
        self._deadline = deadline
        self.descend(0)

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes >= self._node_limit:
            raise _Exhausted
        if self._deadline is not None and self.nodes % 2048 == 0:
            if time.perf_counter() > self._deadline:
                raise _Exhausted

    def record(self) -> None:
        self.best_choices = list(self.choices)

    def descend(self, t: int) -> None:  # pragma: no cover - overridden
        raise NotImplementedError

    def rebuild(self, mode: PackingMode, geo) -> PackingResult:  # pragma: no cover
        raise NotImplementedError


class _DenseSearch(_SearchBase):
    """Levels are (bin, remaining row space); bins are (remaining height,
    absorbable free area).  Sorted input keeps level openers tallest."""

    def __init__(self, items, n_row, n_col):
        super().__init__(items, n_row, n_col)
        self.level_bin: list[int] = []      # level -> bin index
        self.level_rem: list[int] = []      # level -> remaining row space
        self.level_height: list[int] = []   # level -> opener's column extent
        self.bin_rem_h: list[int] = []      # bin -> remaining stacking height
        self.bin_absorb: list[int] = []     # bin -> geometric area still coverable
        self.absorb_total = 0

    def root_lower_bound(self) -> int:
        return _ceil_div(self.suffix_area[0], self.bin_area)

    def lower_bound(self, t: int) -> int:
        spare = self.suffix_area[t] - self.absorb_total
        open_bins = len(self.bin_rem_h)
        if spare <= 0:
            return open_bins
        return open_bins + _ceil_div(spare, self.bin_area)

    def descend(self, t: int) -> None:
        if t == len(self.items):
            if len(self.bin_rem_h) < self.best:
                self.best = len(self.bin_rem_h)
                self.record()
                if self.best <= self.root_lower_bound():
                    raise _Proven
            return
        if self.lower_bound(t) >= self.best:
            return
        item = self.items[t]
        w, h = item.p_in, item.p_out

        same_as_prev = t > 0 and self.items[t - 1].extent == item.extent
        min_slot = self.choices[t - 1][:2] if same_as_prev else (-1, -1)

        # Join an open level.  Levels with equal (bin, remaining row) are
        # interchangeable, as are whole bins with equal signatures.
        seen_joins: set[tuple[int, int]] = set()
        for lvl in range(len(self.level_bin)):
            rem = self.level_rem[lvl]
            if rem < w:
                continue
            b = self.level_bin[lvl]
            if (b, lvl) < min_slot:
                continue
            if (b, rem) in seen_joins:
                continue
            seen_joins.add((b, rem))
            self.tick()
            height = self.level_height[lvl]
            self.level_rem[lvl] = rem - w
            self.bin_absorb[b] -= w * height
            self.absorb_total -= w * height
            self.choices.append((b, lvl, "join"))
            self.descend(t + 1)
            self.choices.pop()
            self.absorb_total += w * height
            self.bin_absorb[b] += w * height
            self.level_rem[lvl] = rem

        # Open a level in an open bin.
        seen_bins: set[tuple] = set()
        for b in range(len(self.bin_rem_h)):
            if self.bin_rem_h[b] < h:
                continue
            if (b, len(self.level_bin)) < min_slot:
                continue
            sig = (
                self.bin_rem_h[b],
                tuple(sorted(self.level_rem[l] for l in range(len(self.level_bin)) if self.level_bin[l] == b)),
            )
            if sig in seen_bins:
                continue
            seen_bins.add(sig)
            self.tick()
            self._open_level(b, w, h)
            self.choices.append((b, len(self.level_bin) - 1, "open"))
            self.descend(t + 1)
            self.choices.pop()
            self._close_level(b, w, h)

        # Open a new bin.
        if len(self.bin_rem_h) + 1 < self.best:
            self.tick()
            self.bin_rem_h.append(self.n_col)
            self.bin_absorb.append(self.bin_area)
            self.absorb_total += self.bin_area
            b = len(self.bin_rem_h) - 1
            self._open_level(b, w, h)
            self.choices.append((b, len(self.level_bin) - 1, "open"))
            self.descend(t + 1)
            self.choices.pop()
            self._close_level(b, w, h)
            self.absorb_total -= self.bin_area
            self.bin_absorb.pop()
            self.bin_rem_h.pop()

    def _open_level(self, b: int, w: int, h: int) -> None:
        # A new level blocks a full-width strip of height h; the opener
        # then consumes w*h of it.
        self.level_bin.append(b)
        self.level_rem.append(self.n_row - w)
        self.level_height.append(h)
        self.bin_rem_h[b] -= h
        delta = self.n_row * h - (self.n_row - w) * h  # == w * h
        self.bin_absorb[b] -= delta
        self.absorb_total -= delta

    def _close_level(self, b: int, w: int, h: int) -> None:
        delta = self.n_row * h - (self.n_row - w) * h
        self.absorb_total += delta
        self.bin_absorb[b] += delta
        self.bin_rem_h[b] += h
        self.level_bin.pop()
        self.level_rem.pop()
        self.level_height.pop()

    def rebuild(self, mode: PackingMode, geo) -> PackingResult:
        assert self.best_choices is not None
        level_base: dict[int, int] = {}
        level_row: dict[int, int] = {}
        bin_cursor: dict[int, int] = {}
        placements = []
        for item, (b, lvl, op) in zip(self.items, self.best_choices):
            if op == "open":
                base = bin_cursor.get(b, 0)
                bin_cursor[b] = base + item.p_out
                level_base[lvl] = base
                level_row[lvl] = 0
            base = level_base[lvl]
            row = level_row[lvl]
            level_row[lvl] = row + item.p_in
            placements.append(Placement(item, b, row, base))
        return PackingResult(mode, geo, tuple(placements))


class _PipelineSearch(_SearchBase):
    """Bins are (remaining input lines, remaining output lines)."""

    def __init__(self, items, n_row, n_col):
        super().__init__(items, n_row, n_col)
        self.bin_rem: list[list[int]] = []
        suffix_w = [0] * (len(items) + 1)
        suffix_h = [0] * (len(items) + 1)
        for t in range(len(items) - 1, -1, -1):
            suffix_w[t] = suffix_w[t + 1] + items[t].p_in
            suffix_h[t] = suffix_h[t + 1] + items[t].p_out
        self.suffix_w = suffix_w
        self.suffix_h = suffix_h

    def root_lower_bound(self) -> int:
        return max(
            _ceil_div(self.suffix_w[0], self.n_row),
            _ceil_div(self.suffix_h[0], self.n_col),
            _ceil_div(self.suffix_area[0], self.bin_area),
        )

    def lower_bound(self, t: int) -> int:
        open_bins = len(self.bin_rem)
        slack_w = sum(b[0] for b in self.bin_rem)
        slack_h = sum(b[1] for b in self.bin_rem)
        absorb = sum(b[0] * b[1] for b in self.bin_rem)
        extra = 0
        if self.suffix_w[t] > slack_w:
            extra = _ceil_div(self.suffix_w[t] - slack_w, self.n_row)
        if self.suffix_h[t] > slack_h:
            extra = max(extra, _ceil_div(self.suffix_h[t] - slack_h, self.n_col))
        if self.suffix_area[t] > absorb:
            extra = max(extra, _ceil_div(self.suffix_area[t] - absorb, self.bin_area))
        return open_bins + extra

    def descend(self, t: int) -> None:
        if t == len(self.items):
            if len(self.bin_rem) < self.best:
                self.best = len(self.bin_rem)
                self.record()
                if self.best <= self.root_lower_bound():
                    raise _Proven
            return
        if self.lower_bound(t) >= self.best:
            return
        item = self.items[t]
        w, h = item.p_in, item.p_out

        same_as_prev = t > 0 and self.items[t - 1].extent == item.extent
        min_bin = self.choices[t - 1][0] if same_as_prev else 0

        seen: set[tuple[int, int]] = set()
        for b in range(min_bin, len(self.bin_rem)):
            rem = self.bin_rem[b]
            if rem[0] < w or rem[1] < h:
                continue
            key = (rem[0], rem[1])
            if key in seen:
                continue
            seen.add(key)
            self.tick()
            rem[0] -= w
            rem[1] -= h
            self.choices.append((b,))
            self.descend(t + 1)
            self.choices.pop()
            rem[0] += w
            rem[1] += h

        if len(self.bin_rem) + 1 < self.best:
            self.tick()
            self.bin_rem.append([self.n_row - w, self.n_col - h])
            self.choices.append((len(self.bin_rem) - 1,))
            self.descend(t + 1)
            self.choices.pop()
            self.bin_rem.pop()

    def rebuild(self, mode: PackingMode, geo) -> PackingResult:
        assert self.best_choices is not None
        cursor: dict[int, list[int]] = {}
        placements = []
        for item, (b,) in zip(self.items, self.best_choices):
            at = cursor.setdefault(b, [0, 0])
            placements.append(Placement(item, b, at[0], at[1]))
            at[0] += item.p_in
            at[1] += item.p_out
        return PackingResult(mode, geo, tuple(placements))
