"""Shared fixtures: checked-in network files and hand-built fragment sets."""

from pathlib import Path

import pytest

from tilepack.fragmentation import (
    Fragment,
    FragmentKind,
    FragmentSet,
    SortKey,
    TileGeometry,
    classify,
    sort_fragments,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CONFIGS = Path(__file__).resolve().parent.parent / "configs"

# Thirteen matrices that pack into exactly 2 shared-line tiles and
# exactly 4 exclusive-line tiles of 512x512; greedy FirstFit matches
# both optima, NextFit needs a fifth tile in exclusive mode.
THIRTEEN_ITEMS = (
    (257, 256), (257, 256), (257, 256), (129, 256),
    (129, 128), (129, 128), (129, 128), (65, 128),
    (148, 64), (65, 64), (65, 64), (65, 64), (65, 64),
)


def build_fragments(
    geometry: TileGeometry,
    extents,
    sort: SortKey | None = SortKey.COL_DESC_ROW_DESC,
) -> FragmentSet:
    frags = tuple(
        Fragment(i, f"l{i:02d}", 0, 0, 0, p_in, p_out,
                 classify(p_in, p_out, geometry))
        for i, (p_in, p_out) in enumerate(extents)
    )
    out = FragmentSet(geometry, frags)
    return sort_fragments(out, sort) if sort else out


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture
def thirteen_items() -> FragmentSet:
    return build_fragments(TileGeometry(512, 512), THIRTEEN_ITEMS)


@pytest.fixture
def make_fragments():
    return build_fragments
