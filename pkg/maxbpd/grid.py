"""Tile model of marked bumpless pipedreams."""

import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np

from maxbpd.perm import Permutation
from maxbpd.snow import Cell, WeightVector, rothe_diagram, snow_diagrams, stars_per_pipe

logger = logging.getLogger(__name__)


class GridError(Exception):
    """Exception raised for tilings that are not valid pipedreams."""
    pass


class EdgeMismatch(GridError):
    """Exception raised when two neighbouring tiles disagree about a shared edge."""

    def __init__(self, row: int, col: int, direction: str):
        """Initialize with the cell and the side of it whose edge does not match."""
        self.row = row
        self.col = col
        self.direction = direction
        super().__init__(f"Edge mismatch at ({row},{col}) on its {direction} side")


class BoundaryViolation(GridError):
    """Exception raised when a tile disagrees with the grid boundary."""

    def __init__(self, side: str, index: int):
        """Initialize with the boundary side and the 1-based row or column index."""
        self.side = side
        self.index = index
        super().__init__(f"Boundary violation on the {side} edge at index {index}")


class SegmentOverlap(GridError):
    """Exception raised when superposed strands do not form a tile."""

    def __init__(self, row: int, col: int, segments):
        self.row = row
        self.col = col
        self.segments = tuple(segments)
        names = ",".join(s.name for s in self.segments)
        super().__init__(f"Strands {{{names}}} cannot share cell ({row},{col})")


class StarOnNonHorizontal(GridError):
    """Exception raised when a snow star does not sit on a horizontal tile."""

    def __init__(self, row: int, col: int, tile: "TileKind"):
        self.row = row
        self.col = col
        self.tile = tile
        super().__init__(f"Star at ({row},{col}) sits on {tile.letter}, expected H")


class TileKind(IntEnum):
    """The seven tiles; M is a J carrying a mark."""

    BLANK = 0
    H = 1
    V = 2
    CROSS = 3
    R = 4
    J = 5
    M = 6

    @property
    def letter(self) -> str:
        return TILE_LETTERS[self]

    @classmethod
    def from_letter(cls, letter: str) -> "TileKind":
        if len(letter) != 1 or letter not in TILE_LETTERS:
            raise GridError(f"Unknown tile letter '{letter}'")
        return cls(TILE_LETTERS.index(letter))

    @property
    def edges(self) -> FrozenSet[str]:
        return frozenset(d for d in "NSEW" if _EDGE_TABLE[d][self])


TILE_LETTERS = "BHVCRJM"

# Edge occupancy per tile code, indexed by TileKind value.
_EDGE_TABLE = {
    "N": np.array([0, 0, 1, 1, 0, 1, 1], dtype=bool),
    "S": np.array([0, 0, 1, 1, 1, 0, 0], dtype=bool),
    "E": np.array([0, 1, 0, 1, 1, 0, 0], dtype=bool),
    "W": np.array([0, 1, 0, 1, 0, 1, 1], dtype=bool),
}


class Segment(Enum):
    """A single strand inside a cell, named by the tile it draws alone."""

    H = ("W", "E")
    V = ("N", "S")
    R = ("S", "E")
    J = ("W", "N")

    @property
    def entry(self) -> str:
        """Side through which an up/right moving pipe enters."""
        return "S" if self in (Segment.V, Segment.R) else "W"

    @property
    def exit(self) -> str:
        return "N" if self in (Segment.V, Segment.J) else "E"


_SINGLE = {
    Segment.H: TileKind.H,
    Segment.V: TileKind.V,
    Segment.R: TileKind.R,
    Segment.J: TileKind.M,
}
_CROSSINGS = (
    frozenset({Segment.H, Segment.V}),
    frozenset({Segment.J, Segment.R}),
)


def superpose(segments: Sequence[Segment], marked: bool = True,
              cell: Cell = (0, 0)) -> TileKind:
    """
    Turn the strands occupying one cell into its tile.

    Args:
        segments: Strands of the pipes passing through the cell.
        marked: Whether a lone NW elbow becomes M rather than J.
        cell: Position used in error messages.

    Raises:
        SegmentOverlap: If the strands share an edge.
    """
    if not segments:
        return TileKind.BLANK
    if len(segments) == 1:
        tile = _SINGLE[segments[0]]
        return tile if marked or tile != TileKind.M else TileKind.J
    if len(segments) == 2 and frozenset(segments) in _CROSSINGS:
        return TileKind.CROSS
    raise SegmentOverlap(cell[0], cell[1], segments)


PathCells = List[Tuple[int, int, Segment]]


class TileGrid:
    """An n×n array of tiles with 1-based (row, col) access."""

    def __init__(self, tiles):
        array = np.array(tiles, dtype=np.int8)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise GridError(f"Tile array must be square and non-empty, got shape {array.shape}")
        if array.min() < 0 or array.max() > TileKind.M:
            raise GridError("Tile array holds codes outside the tile alphabet")
        array.setflags(write=False)
        self._tiles = array

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "TileGrid":
        """Build a grid from one letter string per row, top row first."""
        n = len(rows)
        for index, row in enumerate(rows, start=1):
            if len(row) != n:
                raise GridError(f"Row {index} has length {len(row)}, expected {n}")
        return cls([[TileKind.from_letter(ch) for ch in row] for row in rows])

    @property
    def n(self) -> int:
        return self._tiles.shape[0]

    @property
    def tiles(self) -> np.ndarray:
        return self._tiles

    def __getitem__(self, cell: Cell) -> TileKind:
        row, col = cell
        return TileKind(int(self._tiles[row - 1, col - 1]))

    def rows(self) -> List[str]:
        return ["".join(TILE_LETTERS[v] for v in row) for row in self._tiles]

    def cells_of(self, *kinds: TileKind) -> List[Cell]:
        """Sorted cells holding any of the given tiles."""
        mask = np.isin(self._tiles, [int(k) for k in kinds])
        return [(int(r) + 1, int(c) + 1) for r, c in np.argwhere(mask)]

    def count(self, *kinds: TileKind) -> int:
        return int(np.isin(self._tiles, [int(k) for k in kinds]).sum())

    def replace(self, updates: Mapping[Cell, TileKind]) -> "TileGrid":
        array = self._tiles.copy()
        for (row, col), tile in updates.items():
            array[row - 1, col - 1] = int(tile)
        return TileGrid(array)

    def unmarked(self) -> "TileGrid":
        """The same grid with every M turned into J."""
        array = self._tiles.copy()
        array[array == TileKind.M] = TileKind.J
        return TileGrid(array)

    def edge_mask(self, side: str) -> np.ndarray:
        return _EDGE_TABLE[side][self._tiles]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TileGrid):
            return NotImplemented
        return np.array_equal(self._tiles, other._tiles)

    def __hash__(self) -> int:
        return hash(self._tiles.tobytes())

    def __repr__(self) -> str:
        return f"TileGrid({self.rows()!r})"


@dataclass(frozen=True)
class ValidityReport:
    """Summary of a grid that passed validation."""

    n: int
    blank_count: int
    mark_count: int
    cross_count: int


def validate_grid(grid: TileGrid) -> ValidityReport:
    """
    Check the boundary and edge-matching conditions of a tiling.

    With only the seven tiles no closed loop can form, so these conditions
    are enough for n pipes to run from the bottom edge to the right edge.

    Raises:
        BoundaryViolation: For the first boundary edge in the wrong state.
        EdgeMismatch: For the first pair of neighbours that disagree.
    """
    north = grid.edge_mask("N")
    south = grid.edge_mask("S")
    east = grid.edge_mask("E")
    west = grid.edge_mask("W")

    checks = (
        ("bottom", ~south[-1, :]),
        ("right", ~east[:, -1]),
        ("top", north[0, :]),
        ("left", west[:, 0]),
    )
    for side, bad in checks:
        offenders = np.flatnonzero(bad)
        if offenders.size:
            raise BoundaryViolation(side, int(offenders[0]) + 1)

    mismatches = []
    horizontal = np.argwhere(east[:, :-1] != west[:, 1:])
    if horizontal.size:
        r, c = horizontal[0]
        mismatches.append((int(r) + 1, int(c) + 1, "E"))
    vertical = np.argwhere(south[:-1, :] != north[1:, :])
    if vertical.size:
        r, c = vertical[0]
        mismatches.append((int(r) + 1, int(c) + 1, "S"))
    if mismatches:
        row, col, direction = min(mismatches)
        raise EdgeMismatch(row, col, direction)

    return ValidityReport(
        n=grid.n,
        blank_count=grid.count(TileKind.BLANK),
        mark_count=grid.count(TileKind.M),
        cross_count=grid.count(TileKind.CROSS),
    )


class Crossing(NamedTuple):
    """An effective crossing: the first meeting of a pair of pipes."""

    row: int
    col: int
    pipes: Tuple[int, int]


@dataclass
class _Sweep:
    exits: Dict[int, int]
    crossings: List[Crossing]
    paths: Dict[int, PathCells]


def _sweep(grid: TileGrid) -> _Sweep:
    """Propagate pipe labels from the bottom edge, rows bottom to top."""
    n = grid.n
    below = list(range(1, n + 1))
    crossed = set()
    crossings: List[Crossing] = []
    paths: Dict[int, PathCells] = {p: [] for p in range(1, n + 1)}
    exits: Dict[int, int] = {}

    for row in range(n, 0, -1):
        above = [None] * n
        west = None
        for col in range(1, n + 1):
            tile = grid[row, col]
            south = below[col - 1]
            east = None
            if tile == TileKind.H:
                east = west
                paths[west].append((row, col, Segment.H))
            elif tile == TileKind.V:
                above[col - 1] = south
                paths[south].append((row, col, Segment.V))
            elif tile == TileKind.R:
                east = south
                paths[south].append((row, col, Segment.R))
            elif tile in (TileKind.J, TileKind.M):
                above[col - 1] = west
                paths[west].append((row, col, Segment.J))
            elif tile == TileKind.CROSS:
                pair = frozenset((west, south))
                if pair in crossed:
                    above[col - 1], east = west, south
                    paths[west].append((row, col, Segment.J))
                    paths[south].append((row, col, Segment.R))
                else:
                    crossed.add(pair)
                    crossings.append(Crossing(row, col, (min(pair), max(pair))))
                    above[col - 1], east = south, west
                    paths[west].append((row, col, Segment.H))
                    paths[south].append((row, col, Segment.V))
            west = east
        exits[row] = west
        below = above

    return _Sweep(exits, crossings, paths)


def read_permutation(grid: TileGrid) -> Tuple[Permutation, List[Crossing]]:
    """
    Read the permutation of a valid tiling.

    Labels enter along the bottom edge as column indices. At a cross, a pair
    that has already crossed bounces instead of crossing again.

    Returns:
        (w, effective crossings in sweep order), where w(i) exits at row i.
    """
    validate_grid(grid)
    sweep = _sweep(grid)
    perm = Permutation(tuple(sweep.exits[row] for row in range(1, grid.n + 1)))
    return perm, sweep.crossings


def trace_pipes(grid: TileGrid) -> Dict[int, PathCells]:
    """Return each pipe's cells and strands in travel order under the reading rule."""
    validate_grid(grid)
    return _sweep(grid).paths


def grid_weights(grid: TileGrid) -> Tuple[WeightVector, WeightVector]:
    """Per-row and per-column counts of BLANK and M tiles."""
    mask = np.isin(grid.tiles, [int(TileKind.BLANK), int(TileKind.M)])
    rwt = tuple(int(v) for v in mask.sum(axis=1))
    cwt = tuple(int(v) for v in mask.sum(axis=0))
    return rwt, cwt


def grid_from_paths(n: int, paths: Mapping[int, Iterable[Tuple[int, int, Segment]]],
                    marked: bool = True) -> TileGrid:
    """Superpose pipe paths into a grid; raises SegmentOverlap on conflicts."""
    occupancy: Dict[Cell, List[Segment]] = {}
    for cells in paths.values():
        for row, col, segment in cells:
            occupancy.setdefault((row, col), []).append(segment)
    array = np.zeros((n, n), dtype=np.int8)
    for (row, col), segments in occupancy.items():
        array[row - 1, col - 1] = superpose(segments, marked, (row, col))
    return TileGrid(array)


@dataclass(frozen=True)
class Mbpd:
    """A valid marked bumpless pipedream with its reading and weights."""

    grid: TileGrid
    perm: Permutation
    rwt: WeightVector
    cwt: WeightVector
    mark_count: int
    blank_count: int

    @classmethod
    def from_grid(cls, grid: TileGrid) -> "Mbpd":
        perm, _ = read_permutation(grid)
        rwt, cwt = grid_weights(grid)
        return cls(
            grid=grid,
            perm=perm,
            rwt=rwt,
            cwt=cwt,
            mark_count=grid.count(TileKind.M),
            blank_count=grid.count(TileKind.BLANK),
        )

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def size(self) -> int:
        """Number of BLANK and M tiles."""
        return self.blank_count + self.mark_count

    @property
    def weight_pair(self) -> Tuple[WeightVector, WeightVector]:
        return self.rwt, self.cwt

    def blanks(self) -> List[Cell]:
        return self.grid.cells_of(TileKind.BLANK)

    def marks(self) -> List[Cell]:
        return self.grid.cells_of(TileKind.M)


def rothe_paths(w: Permutation) -> Dict[int, PathCells]:
    """Pipe p rises in column p to row w⁻¹(p), turns, and runs east to the edge."""
    n = w.n
    paths: Dict[int, PathCells] = {}
    for p in range(1, n + 1):
        start = w.position(p)
        cells: PathCells = [(row, p, Segment.V) for row in range(n, start, -1)]
        cells.append((start, p, Segment.R))
        cells.extend((start, col, Segment.H) for col in range(p + 1, n + 1))
        paths[p] = cells
    return paths


def rothe_pipedream(w: Permutation) -> Mbpd:
    """The pipedream whose blanks are the Rothe diagram and which has no NW elbows."""
    grid = grid_from_paths(w.n, rothe_paths(w))
    mbpd = Mbpd.from_grid(grid)
    logger.debug(f"Rothe pipedream of {w}: {grid.rows()}")
    return mbpd


@dataclass(frozen=True)
class Srpd:
    """The Rothe pipedream of w overlaid with its snow stars."""

    grid: TileGrid
    perm: Permutation
    stars: FrozenSet[Cell]
    per_pipe_stars: Dict[int, int] = field(default_factory=dict)


def build_srpd(w: Permutation) -> Srpd:
    """
    Overlay the snow stars of w on its Rothe pipedream.

    Raises:
        StarOnNonHorizontal: If a star lands on anything but an H tile.
    """
    rpd = rothe_pipedream(w)
    snow, _ = snow_diagrams(rothe_diagram(w))
    for row, col in sorted(snow.snow_cells):
        tile = rpd.grid[row, col]
        if tile != TileKind.H:
            raise StarOnNonHorizontal(row, col, tile)
    return Srpd(
        grid=rpd.grid,
        perm=w,
        stars=snow.snow_cells,
        per_pipe_stars=stars_per_pipe(w),
    )
