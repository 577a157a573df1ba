"""Shared packing vocabulary: modes, placements, results."""

import enum
from dataclasses import dataclass

from ..fragmentation import Fragment, TileGeometry


class PackingMode(enum.Enum):
    DENSE = "dense"        # shelf packing; fragments may share input/output lines
    PIPELINE = "pipeline"  # diagonal placement; row and column budgets are exclusive


class FitPolicy(enum.Enum):
    FIRST_FIT = "first-fit"  # scan every open slot in creation order
    NEXT_FIT = "next-fit"    # only the most recently opened slot


@dataclass(frozen=True)
class Placement:
    """A fragment fixed inside one bin.

    ``row_offset``/``col_offset`` are the lower-left corner; the fragment
    occupies [row_offset, row_offset + p_in) input lines and
    [col_offset, col_offset + p_out) output lines.
    """

    fragment: Fragment
    bin_idx: int
    row_offset: int
    col_offset: int


@dataclass(frozen=True)
class PackingResult:
    mode: PackingMode
    geometry: TileGeometry
    placements: tuple[Placement, ...]

    @property
    def bin_count(self) -> int:
        if not self.placements:
            return 0
        return 1 + max(p.bin_idx for p in self.placements)

    @property
    def used_area(self) -> int:
        return sum(p.fragment.area for p in self.placements)

    @property
    def fill_ratio(self) -> float:
        capacity = self.bin_count * self.geometry.area
        return self.used_area / capacity if capacity else 0.0

    @property
    def dead_area(self) -> int:
        """Unused cross-points across all opened bins."""
        return self.bin_count * self.geometry.area - self.used_area

    def bins(self) -> list[list[Placement]]:
        out: list[list[Placement]] = [[] for _ in range(self.bin_count)]
        for placement in self.placements:
            out[placement.bin_idx].append(placement)
        return out
