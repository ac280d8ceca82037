"""Diagrams, dark clouds, snow diagrams and the Rajchgot codes."""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Tuple

from maxbpd.perm import Permutation, inverse

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
WeightVector = Tuple[int, ...]


class DiagramError(Exception):
    """Exception raised when a diagram has cells outside its grid."""
    pass


@dataclass(frozen=True)
class Diagram:
    """A set of (row, col) cells inside the n×n grid, 1-based."""

    n: int
    cells: FrozenSet[Cell] = field(default_factory=frozenset)

    def __post_init__(self):
        cells = frozenset((int(r), int(c)) for r, c in self.cells)
        for r, c in cells:
            if not (1 <= r <= self.n and 1 <= c <= self.n):
                raise DiagramError(f"Cell ({r},{c}) lies outside the {self.n}x{self.n} grid")
        object.__setattr__(self, "cells", cells)

    def __contains__(self, cell: Cell) -> bool:
        return cell in self.cells

    def __len__(self) -> int:
        return len(self.cells)

    def row_weight(self) -> WeightVector:
        weights = [0] * self.n
        for r, _ in self.cells:
            weights[r - 1] += 1
        return tuple(weights)

    def col_weight(self) -> WeightVector:
        weights = [0] * self.n
        for _, c in self.cells:
            weights[c - 1] += 1
        return tuple(weights)

    def sorted_cells(self) -> List[Cell]:
        return sorted(self.cells)

    def union(self, extra: Iterable[Cell]) -> "Diagram":
        return Diagram(self.n, self.cells | frozenset(extra))


@dataclass(frozen=True)
class SnowResult:
    """A diagram together with its dark clouds and the star cells added to it."""

    base: Diagram
    dark: Tuple[Cell, ...]
    snow_cells: FrozenSet[Cell]
    combined: Diagram


def rothe_diagram(w: Permutation) -> Diagram:
    """Return {(i, w(j)) : i < j, w(i) > w(j)}."""
    cells = {
        (i, w(j))
        for i in range(1, w.n + 1)
        for j in range(i + 1, w.n + 1)
        if w(i) > w(j)
    }
    return Diagram(w.n, frozenset(cells))


def dark_clouds(diagram: Diagram) -> Tuple[Cell, ...]:
    """
    Select the dark clouds of a diagram.

    Rows are scanned from the bottom up. In each row the cell with the largest
    column whose column holds no dark cell yet becomes dark.

    Returns:
        The dark cells in scan order.
    """
    used_columns = set()
    dark = []
    for row in range(diagram.n, 0, -1):
        candidates = [c for (r, c) in diagram.cells if r == row and c not in used_columns]
        if candidates:
            col = max(candidates)
            used_columns.add(col)
            dark.append((row, col))
    return tuple(dark)


def snow_diagrams(diagram: Diagram) -> Tuple[SnowResult, SnowResult]:
    """
    Build the snow and left snow diagrams of a diagram.

    The snow diagram adds every empty cell strictly above a dark cell; the
    left snow diagram adds every empty cell strictly left of one.

    Returns:
        (snow, left_snow) sharing the same dark clouds.
    """
    dark = dark_clouds(diagram)
    above = set()
    left = set()
    for row, col in dark:
        above.update((r, col) for r in range(1, row) if (r, col) not in diagram)
        left.update((row, c) for c in range(1, col) if (row, c) not in diagram)

    snow = SnowResult(diagram, dark, frozenset(above), diagram.union(above))
    left_snow = SnowResult(diagram, dark, frozenset(left), diagram.union(left))
    return snow, left_snow


def rajcode_pair(w: Permutation) -> Tuple[WeightVector, WeightVector]:
    """Return (rajcode(w), rajcode(w⁻¹)) via the snow and left snow diagrams."""
    snow, left_snow = snow_diagrams(rothe_diagram(w))
    return snow.combined.row_weight(), left_snow.combined.col_weight()


def rajcode(w: Permutation) -> WeightVector:
    return rajcode_pair(w)[0]


def inverse_rajcode(w: Permutation) -> WeightVector:
    """rajcode(w⁻¹) computed directly from the snow diagram of w⁻¹."""
    return rajcode(inverse(w))


def stars_per_pipe(w: Permutation) -> Dict[int, int]:
    """Map each pipe p to the number of snow stars in its starting row w⁻¹(p)."""
    snow, _ = snow_diagrams(rothe_diagram(w))
    counts = {p: 0 for p in range(1, w.n + 1)}
    for row, _ in snow.snow_cells:
        counts[w(row)] += 1
    return counts


def left_stars_per_pipe(w: Permutation) -> Dict[int, int]:
    """Map each pipe p to the number of left snow stars in column p."""
    _, left_snow = snow_diagrams(rothe_diagram(w))
    counts = {p: 0 for p in range(1, w.n + 1)}
    for _, col in left_snow.snow_cells:
        counts[col] += 1
    return counts


def lehmer_weights(w: Permutation) -> WeightVector:
    """Row weights of the Rothe diagram."""
    return rothe_diagram(w).row_weight()


def is_dominant(w: Permutation) -> bool:
    """True when the Rothe diagram is a top-left-justified Young diagram."""
    diagram = rothe_diagram(w)
    lengths = diagram.row_weight()
    for row, length in enumerate(lengths, start=1):
        if any((row, c) not in diagram for c in range(1, length + 1)):
            return False
    return all(a >= b for a, b in zip(lengths, lengths[1:]))
