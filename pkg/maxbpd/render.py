"""Text, SVG and PNG pictures of pipedreams."""

import logging
from pathlib import Path
from typing import FrozenSet, List, Tuple, Union

import drawsvg as draw
from PIL import Image, ImageDraw

from maxbpd.grid import Cell, Mbpd, Srpd, TileGrid, TileKind, trace_pipes
from maxbpd.perm import Permutation

logger = logging.getLogger(__name__)

STYLES = ("ascii", "svg", "png")

GLYPHS = {
    TileKind.BLANK: "·",
    TileKind.H: "─",
    TileKind.V: "│",
    TileKind.CROSS: "┼",
    TileKind.R: "┌",
    TileKind.J: "┘",
    TileKind.M: "┘\u0323",
}
STAR = "*"

PIPE_COLORS = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
]


class RenderError(Exception):
    """Exception raised for an unknown render style or unwritable output."""
    pass


def _unpack(value: Union[Mbpd, Srpd]) -> Tuple[TileGrid, Permutation, FrozenSet[Cell]]:
    if isinstance(value, Srpd):
        return value.grid, value.perm, value.stars
    return value.grid, value.perm, frozenset()


def render_ascii(value: Union[Mbpd, Srpd]) -> str:
    """
    Draw the tiles with box-drawing glyphs.

    Each row ends with the label of the pipe leaving it; the last line holds
    the bottom labels. Stars replace the glyph of their H tile.
    """
    grid, perm, stars = _unpack(value)
    width = len(str(grid.n))
    lines = []
    for row in range(1, grid.n + 1):
        cells = []
        for col in range(1, grid.n + 1):
            tile = grid[row, col]
            glyph = STAR if (row, col) in stars else GLYPHS[tile]
            fill = "─" if "E" in tile.edges else " "
            cells.append(glyph + fill * (width - 1))
        lines.append("".join(cells) + " " + str(perm(row)))
    lines.append("".join(str(col).ljust(width) for col in range(1, grid.n + 1)).rstrip())
    return "\n".join(lines) + "\n"


def _pipe_points(route, cell_size: float, margin: float) -> List[float]:
    """Polyline through the centres of a pipe's cells, from the bottom edge to the right edge."""
    def center(row, col):
        return margin + (col - 0.5) * cell_size, margin + (row - 0.5) * cell_size

    first_row, first_col, _ = route[0]
    last_row, last_col, _ = route[-1]
    x0, _ = center(first_row, first_col)
    points = [x0, margin + first_row * cell_size]
    for row, col, _ in route:
        points.extend(center(row, col))
    _, y_end = center(last_row, last_col)
    points.extend([margin + last_col * cell_size, y_end])
    return points


def build_svg(value: Union[Mbpd, Srpd], cell_size: int = 40) -> draw.Drawing:
    """Build the drawing: shaded blanks, one polyline per pipe, dots on marks, labels."""
    grid, perm, stars = _unpack(value)
    n = grid.n
    margin = cell_size / 2
    size = n * cell_size + 2 * margin + cell_size
    d = draw.Drawing(size, size)
    d.append(draw.Rectangle(0, 0, size, size, fill="white"))

    for row, col in grid.cells_of(TileKind.BLANK):
        d.append(draw.Rectangle(
            margin + (col - 1) * cell_size, margin + (row - 1) * cell_size,
            cell_size, cell_size,
            fill="#eeeeee", stroke="#cccccc",
        ))

    routes = trace_pipes(grid)
    for pipe, route in sorted(routes.items()):
        d.append(draw.Lines(
            *_pipe_points(route, cell_size, margin),
            close=False,
            fill="none",
            stroke=PIPE_COLORS[(pipe - 1) % len(PIPE_COLORS)],
            stroke_width=max(cell_size / 12, 1),
        ))

    for row, col in grid.cells_of(TileKind.M):
        d.append(draw.Circle(
            margin + (col - 0.5) * cell_size, margin + (row - 0.5) * cell_size,
            cell_size / 8, fill="black",
        ))
    for row, col in sorted(stars):
        d.append(draw.Text(
            STAR, cell_size / 2,
            margin + (col - 0.5) * cell_size, margin + (row - 0.25) * cell_size,
            text_anchor="middle", fill="black",
        ))

    label_size = cell_size / 3
    for col in range(1, n + 1):
        d.append(draw.Text(
            str(col), label_size,
            margin + (col - 0.5) * cell_size, margin + n * cell_size + label_size * 1.5,
            text_anchor="middle",
        ))
    for row in range(1, n + 1):
        d.append(draw.Text(
            str(perm(row)), label_size,
            margin + n * cell_size + label_size, margin + (row - 0.5) * cell_size,
            dominant_baseline="middle",
        ))
    return d


def render_svg(value: Union[Mbpd, Srpd], cell_size: int = 40) -> str:
    return build_svg(value, cell_size).as_svg()


def render_png(value: Union[Mbpd, Srpd], path: Union[str, Path], cell_size: int = 32) -> Path:
    """Rasterize the same picture with Pillow and save it as a PNG file."""
    grid, perm, stars = _unpack(value)
    n = grid.n
    margin = cell_size // 2
    size = n * cell_size + 2 * margin + cell_size
    image = Image.new("RGB", (size, size), "white")
    pen = ImageDraw.Draw(image)

    for row, col in grid.cells_of(TileKind.BLANK):
        x, y = margin + (col - 1) * cell_size, margin + (row - 1) * cell_size
        pen.rectangle([x, y, x + cell_size, y + cell_size], fill="#eeeeee", outline="#cccccc")

    line_width = max(cell_size // 12, 1)
    for pipe, route in sorted(trace_pipes(grid).items()):
        points = _pipe_points(route, cell_size, margin)
        pen.line(list(zip(points[::2], points[1::2])),
                 fill=PIPE_COLORS[(pipe - 1) % len(PIPE_COLORS)], width=line_width)

    radius = max(cell_size // 8, 1)
    for row, col in grid.cells_of(TileKind.M):
        cx, cy = margin + (col - 0.5) * cell_size, margin + (row - 0.5) * cell_size
        pen.ellipse([cx - radius, cy - radius, cx + radius, cy + radius], fill="black")
    for row, col in sorted(stars):
        pen.text((margin + (col - 0.6) * cell_size, margin + (row - 0.9) * cell_size), STAR, fill="black")

    for col in range(1, n + 1):
        pen.text((margin + (col - 0.6) * cell_size, margin + n * cell_size + 4), str(col), fill="black")
    for row in range(1, n + 1):
        pen.text((margin + n * cell_size + 4, margin + (row - 0.7) * cell_size), str(perm(row)), fill="black")

    path = Path(path)
    try:
        image.save(path, format="PNG")
    except OSError as e:
        raise RenderError(f"Unable to write PNG to {path}: {e}")
    logger.debug(f"Wrote {size}x{size} PNG to {path}")
    return path


def render(value: Union[Mbpd, Srpd], style: str = "ascii", cell_size: int = 40) -> str:
    """
    Render a diagram as text.

    Args:
        value: An Mbpd or Srpd.
        style: "ascii" or "svg"; PNG output goes through render_png.

    Raises:
        RenderError: For any other style.
    """
    if style == "ascii":
        return render_ascii(value)
    if style == "svg":
        return render_svg(value, cell_size)
    raise RenderError(f"Unknown text render style '{style}'")
