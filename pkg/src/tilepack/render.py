"""Layout rendering: one panel per bin, SVG or ASCII.

The row axis runs left to right, the column axis bottom to top, so a
dense packing reads as stacked shelves and a pipeline packing as a
staircase of blocks along the diagonal.
"""

from .packing.types import PackingResult

_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
)

_PANEL_W = 180
_GAP = 14
_PER_ROW = 6
_LABEL_H = 14


def render_layout(result: PackingResult, fmt: str = "svg") -> str:
    if fmt == "svg":
        return render_svg(result)
    if fmt == "ascii":
        return render_ascii(result)
    raise ValueError(f"unknown render format {fmt!r}")


def render_svg(result: PackingResult) -> str:
    geo = result.geometry
    bins = result.bins()
    panel_h = max(1, round(_PANEL_W * geo.n_col / geo.n_row))
    cols = min(_PER_ROW, max(1, len(bins)))
    rows = -(-len(bins) // cols) if bins else 0
    width = cols * (_PANEL_W + _GAP) + _GAP if bins else 2 * _GAP
    height = rows * (panel_h + _LABEL_H + _GAP) + _GAP if bins else 2 * _GAP

    sx = _PANEL_W / geo.n_row
    sy = panel_h / geo.n_col

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{result.mode.value} packing, {len(bins)} bins of {geo}</title>',
    ]
    for idx, placements in enumerate(bins):
        px = _GAP + (idx % cols) * (_PANEL_W + _GAP)
        py = _GAP + (idx // cols) * (panel_h + _LABEL_H + _GAP)
        parts.append(f'<g class="bin" transform="translate({px},{py})">')
        parts.append(
            f'<text x="0" y="{_LABEL_H - 4}" font-family="monospace" font-size="11">'
            f'bin {idx}</text>'
        )
        parts.append(
            f'<rect x="0" y="{_LABEL_H}" width="{_PANEL_W}" height="{panel_h}" '
            f'fill="#ffffff" stroke="#333333"/>'
        )
        for p in placements:
            w = max(1.0, p.fragment.p_in * sx)
            h = max(1.0, p.fragment.p_out * sy)
            x = p.row_offset * sx
            # flip: column offsets grow upward, SVG y grows downward
            y = _LABEL_H + panel_h - (p.col_offset * sy + h)
            color = _PALETTE[p.fragment.layer_id % len(_PALETTE)]
            label = f"{p.fragment.layer_name}[{p.fragment.replica}]"
            parts.append(
                f'<rect class="fragment" x="{x:.2f}" y="{y:.2f}" '
                f'width="{w:.2f}" height="{h:.2f}" fill="{color}" '
                f'stroke="#222222" stroke-width="0.5">'
                f'<title>{label} {p.fragment.p_in}x{p.fragment.p_out}</title></rect>'
            )
        parts.append('</g>')
    parts.append('</svg>\n')
    return "\n".join(parts)


def render_ascii(result: PackingResult, width: int = 48) -> str:
    geo = result.geometry
    out = []
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"
    height = max(1, round(width * geo.n_col / geo.n_row / 2))
    for idx, placements in enumerate(result.bins()):
        grid = [["." for _ in range(width)] for _ in range(height)]
        for p in placements:
            mark = letters[p.fragment.layer_id % len(letters)]
            x0 = int(p.row_offset * width / geo.n_row)
            x1 = max(x0 + 1, -(-(p.row_offset + p.fragment.p_in) * width // geo.n_row))
            y0 = int(p.col_offset * height / geo.n_col)
            y1 = max(y0 + 1, -(-(p.col_offset + p.fragment.p_out) * height // geo.n_col))
            for y in range(y0, min(y1, height)):
                for x in range(x0, min(x1, width)):
                    grid[y][x] = mark
        out.append(f"bin {idx} ({geo}, {len(placements)} fragments)")
        # column offsets grow upward: print top row first
        out.extend("".join(row) for row in reversed(grid))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")
