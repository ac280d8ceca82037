"""
Construction of the maximal marked bumpless pipedream of a permutation.

Pipes are processed from the bottom starting row upwards. Each pipe with
stars droops through them; any horizontal strand left outside its owner's
starting row (a long line) is then raised by mini-undroops until none remain.
Pipe routes are the primary state; the tile grid is their superposition.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from maxbpd.grid import (
    Cell,
    GridError,
    Mbpd,
    PathCells,
    Segment,
    SegmentOverlap,
    Srpd,
    TileGrid,
    TileKind,
    build_srpd,
    grid_from_paths,
    read_permutation,
    rothe_paths,
    validate_grid,
)
from maxbpd.perm import DEFAULT_MAX_SIZE, Permutation, check_size, inverse
from maxbpd.snow import rajcode_pair

logger = logging.getLogger(__name__)

Delta = Tuple[int, int, str, str]


class AlgorithmError(Exception):
    """Exception raised when the construction reaches an impossible state."""

    def __init__(self, message: str, trace=None):
        self.trace = list(trace or [])
        super().__init__(message)


class InvariantViolation(AlgorithmError):
    """Exception raised when a state invariant fails after a step."""

    def __init__(self, name: str, detail: str = "", trace=None):
        self.name = name
        message = f"Invariant violated: {name}"
        if detail:
            message += f" ({detail})"
        super().__init__(message, trace)


class RuleConflict(AlgorithmError):
    """Exception raised when a drooping trace enters a tile no rule handles."""

    def __init__(self, cell: Cell, direction: str, tile: Optional[TileKind] = None, trace=None):
        self.cell = cell
        self.direction = direction
        self.tile = tile
        found = tile.letter if tile is not None else "the boundary"
        super().__init__(f"No droop rule moving {direction} into {cell} holding {found}", trace)


class MissingHTile(AlgorithmError):
    """Exception raised when the starting row has fewer H tiles than stars."""

    def __init__(self, pipe: int, stars: int, found: int, trace=None):
        self.pipe = pipe
        self.stars = stars
        self.found = found
        super().__init__(
            f"Pipe {pipe} needs its H tile number {stars} but only {found} exist", trace
        )


class EmptyLadder(AlgorithmError):
    """Exception raised when a long line has no NW turn after it."""
    pass


class RectangleObstruction(AlgorithmError):
    """Exception raised when a mini-undroop meets a tile it cannot convert."""

    def __init__(self, cell: Cell, detail: str = "", trace=None):
        self.cell = cell
        message = f"Mini-undroop obstructed at {cell}"
        if detail:
            message += f": {detail}"
        super().__init__(message, trace)


class NonTermination(AlgorithmError):
    """Exception raised when undrooping exceeds its iteration bound."""
    pass


class ReplayError(AlgorithmError):
    """Exception raised when a trace does not apply to the grid it is replayed on."""
    pass


@dataclass
class TraceEvent:
    """One recorded step: a droop, a skipped pipe, or a mini-undroop."""

    kind: str
    pipe: int
    cut: Optional[Cell] = None
    se: Optional[Cell] = None
    nw: Optional[Cell] = None
    deltas: List[Delta] = field(default_factory=list)


@dataclass(frozen=True)
class LongLine:
    pipe: int
    cell: Cell


@dataclass(frozen=True)
class CornerLadder:
    """
    The NW turns of a pipe above one of its long lines.

    turns holds (a_1, b_1), ..., (a_r, b_r) bottom to top; b0 is the column
    where the long line first appears and top_row is a_{r+1}.
    """

    pipe: int
    b0: int
    turns: Tuple[Cell, ...]
    top_row: int

    def row(self, i: int) -> int:
        """a_i for 1 ≤ i ≤ r + 1."""
        if i == len(self.turns) + 1:
            return self.top_row
        return self.turns[i - 1][0]

    def col(self, i: int) -> int:
        """b_i for 0 ≤ i ≤ r."""
        if i == 0:
            return self.b0
        return self.turns[i - 1][1]


@dataclass
class AlgoState:
    """Mutable state of one construction run; owned by a single caller."""

    w: Permutation
    grid: TileGrid
    paths: Dict[int, PathCells]
    stars_remaining: Dict[int, int]
    queue: List[int]
    start_grid: TileGrid
    processed: List[int] = field(default_factory=list)
    trace: List[TraceEvent] = field(default_factory=list)
    crossing_registry: Dict[frozenset, int] = field(default_factory=dict)
    check: bool = True

    @property
    def n(self) -> int:
        return self.w.n


@dataclass(frozen=True)
class MaximalResult:
    """The maximal diagram with the trace that produced it."""

    mbpd: Mbpd
    trace: Tuple[TraceEvent, ...]
    start: Srpd

    def frames(self) -> List[TileGrid]:
        """Every intermediate grid, starting from the snow Rothe pipedream."""
        return replay(self.start.grid, self.trace)


def grid_deltas(before: TileGrid, after: TileGrid) -> List[Delta]:
    """Cells whose tile changed, as (row, col, before, after) letters."""
    changed = (before.tiles != after.tiles).nonzero()
    return [
        (int(r) + 1, int(c) + 1,
         TileKind(int(before.tiles[r, c])).letter,
         TileKind(int(after.tiles[r, c])).letter)
        for r, c in zip(*changed)
    ]


def replay(start: TileGrid, events) -> List[TileGrid]:
    """
    Apply recorded deltas to a start grid.

    Returns:
        The start grid followed by the grid after every event.

    Raises:
        ReplayError: If a delta's before-tile disagrees with the grid.
    """
    frames = [start]
    current = start
    for index, event in enumerate(events):
        updates = {}
        for row, col, old, new in event.deltas:
            if current[row, col].letter != old:
                raise ReplayError(
                    f"Event {index} expects {old} at ({row},{col}), found {current[row, col].letter}"
                )
            updates[(row, col)] = TileKind.from_letter(new)
        current = current.replace(updates)
        frames.append(current)
    return frames


def _p_cross_pairs(paths: Dict[int, PathCells]) -> Dict[frozenset, int]:
    """Count the straight crossings between each pair of pipes."""
    occupancy: Dict[Cell, List[Tuple[int, Segment]]] = {}
    for pipe, cells in paths.items():
        for row, col, segment in cells:
            occupancy.setdefault((row, col), []).append((pipe, segment))
    counts: Dict[frozenset, int] = {}
    for entries in occupancy.values():
        if len(entries) == 2 and {s for _, s in entries} == {Segment.H, Segment.V}:
            pair = frozenset(p for p, _ in entries)
            counts[pair] = counts.get(pair, 0) + 1
    return counts


def _rebuild(state: AlgoState) -> TileGrid:
    try:
        return grid_from_paths(state.n, state.paths)
    except SegmentOverlap as e:
        raise InvariantViolation("routes superpose into tiles", str(e), state.trace)


def init_state(w: Permutation, check: bool = True) -> AlgoState:
    """Start from the snow Rothe pipedream with pipes queued bottom row first."""
    srpd = build_srpd(w)
    paths = rothe_paths(w)
    queue = [w(row) for row in range(w.n, 0, -1)]
    state = AlgoState(
        w=w,
        grid=srpd.grid,
        paths=paths,
        stars_remaining=dict(srpd.per_pipe_stars),
        queue=queue,
        start_grid=srpd.grid,
        check=check,
    )
    state.crossing_registry = _p_cross_pairs(paths)
    logger.debug(f"Initial queue for {w}: {queue}; stars {srpd.per_pipe_stars}")
    return state


def check_move(state: AlgoState) -> None:
    """
    Assert the invariants that hold after every single droop or mini-undroop.

    Raises:
        InvariantViolation: Naming the first invariant that fails.
    """
    try:
        validate_grid(state.grid)
    except GridError as e:
        raise InvariantViolation("diagram stays a valid tiling", str(e), state.trace)
    for pair, count in state.crossing_registry.items():
        if count > 1:
            raise InvariantViolation(
                "at most one p-cross between two pipes", f"pipes {sorted(pair)}", state.trace
            )


def check_step(state: AlgoState) -> None:
    """
    Assert the invariants that hold once a droop and its undroops are complete.

    Between a droop and the mini-undroops that follow it the diagram may read
    a different permutation, so the reading is only compared here.

    Raises:
        InvariantViolation: Naming the first invariant that fails.
    """
    trace = state.trace
    try:
        perm, crossings = read_permutation(state.grid)
    except GridError as e:
        raise InvariantViolation("diagram stays a valid marked bumpless pipedream", str(e), trace)
    if perm != state.w:
        raise InvariantViolation("permutation is preserved", f"read {perm}", trace)

    rothe_pairs = set(_p_cross_pairs(rothe_paths(state.w)))
    for crossing in crossings:
        if frozenset(crossing.pipes) not in rothe_pairs:
            raise InvariantViolation(
                "pipes apart in the Rothe pipedream never cross",
                f"pipes {crossing.pipes} cross at ({crossing.row},{crossing.col})",
                trace,
            )


def _trace_descent(others: TileGrid, pipe: int, cut: Cell) -> PathCells:
    """
    Trace a drooping pipe backwards from its cut, against the tiles of the other pipes.

    Returns:
        The new cells below the cut, in the order the trace visits them.
    """
    n = others.n
    row, col = cut
    heading = "down"
    trail: PathCells = []

    while True:
        if heading == "down":
            row += 1
            if row > n:
                raise RuleConflict((row, col), heading)
            tile = others[row, col]
            if tile == TileKind.H:
                trail.append((row, col, Segment.V))
            elif tile in (TileKind.R, TileKind.BLANK):
                trail.append((row, col, Segment.J))
                heading = "west"
            else:
                raise RuleConflict((row, col), heading, tile)
            continue

        col -= 1
        if col < 1:
            raise RuleConflict((row, col), heading)
        tile = others[row, col]
        if col == pipe:
            if tile != TileKind.BLANK:
                raise RuleConflict((row, col), heading, tile)
            trail.append((row, col, Segment.R))
            for below in range(row + 1, n + 1):
                under = others[below, col]
                if under not in (TileKind.BLANK, TileKind.H):
                    raise RuleConflict((below, col), "down", under)
                trail.append((below, col, Segment.V))
            return trail
        if tile == TileKind.V:
            trail.append((row, col, Segment.H))
        elif tile in (TileKind.M, TileKind.J, TileKind.BLANK):
            trail.append((row, col, Segment.R))
            heading = "down"
        else:
            raise RuleConflict((row, col), heading, tile)


def droop_pipe(state: AlgoState, pipe: Optional[int] = None) -> AlgoState:
    """
    Droop the next pipe in the queue through its stars.

    A pipe with no stars is skipped. Otherwise the pipe is cut at the t-th H
    tile east of its elbow and re-traced down and west from there.

    Raises:
        MissingHTile: If the starting row holds fewer than t H tiles.
        RuleConflict: If the trace enters a tile no rule covers.
    """
    if not state.queue:
        raise AlgorithmError("Processing queue is empty", state.trace)
    if pipe is None:
        pipe = state.queue[0]
    elif pipe != state.queue[0]:
        raise AlgorithmError(f"Pipe {pipe} is not next in the queue {state.queue}", state.trace)
    if state.check and topmost_long_line(state) is not None:
        raise InvariantViolation("no long line remains before a droop", f"pipe {pipe}", state.trace)

    state.queue.pop(0)
    state.processed.append(pipe)
    stars = state.stars_remaining.get(pipe, 0)
    if stars == 0:
        state.trace.append(TraceEvent(kind="skip", pipe=pipe))
        logger.debug(f"Pipe {pipe} has no stars; skipped")
        return state

    start_row = state.w.position(pipe)
    path = state.paths[pipe]
    try:
        elbow = path.index((start_row, pipe, Segment.R))
    except ValueError:
        raise InvariantViolation("unprocessed pipes keep their Rothe route", f"pipe {pipe}", state.trace)

    found = 0
    cut_index = None
    for index in range(elbow + 1, len(path)):
        row, col, _ = path[index]
        if state.grid[row, col] == TileKind.H:
            found += 1
            if found == stars:
                cut_index = index
                break
    if cut_index is None:
        raise MissingHTile(pipe, stars, found, state.trace)
    cut = path[cut_index][:2]

    others = grid_from_paths(state.n, {q: cells for q, cells in state.paths.items() if q != pipe})
    try:
        trail = _trace_descent(others, pipe, cut)
    except RuleConflict as e:
        e.trace = list(state.trace)
        raise

    before = state.grid
    state.paths[pipe] = list(reversed(trail)) + [(cut[0], cut[1], Segment.R)] + path[cut_index + 1:]
    state.grid = _rebuild(state)
    state.stars_remaining[pipe] = 0
    state.crossing_registry = _p_cross_pairs(state.paths)

    deltas = grid_deltas(before, state.grid)
    state.trace.append(TraceEvent(kind="droop", pipe=pipe, cut=cut, deltas=deltas))
    logger.debug(f"Drooped pipe {pipe} ({stars} stars) at cut {cut}: {len(deltas)} tiles changed")

    if state.check:
        new_blanks = [(r, c) for r, c, old, new in deltas if new == "B" and old != "B"]
        if sum(1 for r, _ in new_blanks if r == start_row) != stars:
            raise InvariantViolation(
                "a droop frees one blank per star in the starting row", f"pipe {pipe}", state.trace
            )
        if sum(1 for _, c in new_blanks if c == pipe) != stars:
            raise InvariantViolation(
                "a droop frees one blank per star in the terminating column", f"pipe {pipe}", state.trace
            )
        check_move(state)
    return state


def _horizontal_cells(state: AlgoState, pipe: int) -> List[Cell]:
    return [(row, col) for row, col, segment in state.paths[pipe] if segment == Segment.H]


def topmost_long_line(state: AlgoState) -> Optional[LongLine]:
    """Find the H tile outside its owner's starting row with the smallest (row, col, pipe)."""
    candidates = []
    for pipe, cells in state.paths.items():
        start_row = state.w.position(pipe)
        for row, col, segment in cells:
            if segment == Segment.H and row != start_row and state.grid[row, col] == TileKind.H:
                candidates.append((row, col, pipe))
    if not candidates:
        return None
    row, col, pipe = min(candidates)
    return LongLine(pipe=pipe, cell=(row, col))


def corner_ladder(state: AlgoState, pipe: int, cell: Cell) -> CornerLadder:
    """
    Collect the NW turns of a pipe after its long line, bottom to top.

    Both M tiles and the crosses where the pipe turns count as turns.

    Raises:
        EmptyLadder: If the pipe never turns north after the long line.
    """
    path = state.paths[pipe]
    positions = [(row, col) for row, col, _ in path]
    try:
        index = positions.index(cell)
    except ValueError:
        raise AlgorithmError(f"Cell {cell} is not on pipe {pipe}", state.trace)

    turns = tuple((row, col) for row, col, segment in path[index + 1:] if segment == Segment.J)
    if not turns:
        raise EmptyLadder(f"Pipe {pipe} has no NW turn after its long line at {cell}", state.trace)
    ladder = CornerLadder(pipe=pipe, b0=cell[1], turns=turns, top_row=state.w.position(pipe))

    rows = [ladder.row(i) for i in range(1, len(turns) + 2)]
    cols = [ladder.col(i) for i in range(0, len(turns) + 1)]
    if rows[0] != cell[0] or any(a <= b for a, b in zip(rows, rows[1:])) \
            or any(a >= b for a, b in zip(cols, cols[1:])):
        raise InvariantViolation("corner ladder is a staircase", f"rows {rows} cols {cols}", state.trace)
    return ladder


def mini_undroop(state: AlgoState, pipe: int, i: int = 1,
                 ladder: Optional[CornerLadder] = None) -> AlgoState:
    """
    Move a pipe from the SE corner to the NW corner of its i-th operation rectangle.

    The rectangle has SE corner (a_i, b_i) and NW corner (a_{i+1}, b_{i-1}).
    The pipe's route east along row a_i then north along column b_i is
    replaced by north along column b_{i-1} then east along row a_{i+1}.

    Raises:
        RectangleObstruction: If the new route cannot share a cell with the
            strands already there.
    """
    if ladder is None:
        long_lines = [
            (row, col)
            for row, col in _horizontal_cells(state, pipe)
            if row != state.w.position(pipe) and state.grid[row, col] == TileKind.H
        ]
        if not long_lines:
            raise AlgorithmError(f"Pipe {pipe} has no long line", state.trace)
        ladder = corner_ladder(state, pipe, min(long_lines))
    if not 1 <= i <= len(ladder.turns):
        raise AlgorithmError(f"Ladder index {i} outside 1..{len(ladder.turns)}", state.trace)

    low_row, high_row = ladder.row(i), ladder.row(i + 1)
    west_col, east_col = ladder.col(i - 1), ladder.col(i)
    path = state.paths[pipe]
    positions = [(row, col) for row, col, _ in path]
    try:
        first = positions.index((low_row, west_col))
        last = positions.index((high_row, east_col))
    except ValueError as e:
        raise RectangleObstruction((low_row, west_col), f"rectangle corner off the route: {e}", state.trace)

    entry = path[first][2]
    if entry == Segment.H:
        corner = Segment.J
    elif entry == Segment.R:
        corner = Segment.V
    else:
        raise RectangleObstruction((low_row, west_col), f"unexpected {entry.name} strand", state.trace)
    if path[last][2] != Segment.R:
        raise RectangleObstruction((high_row, east_col), "pipe does not turn east here", state.trace)

    detour: PathCells = [(low_row, west_col, corner)]
    detour.extend((row, west_col, Segment.V) for row in range(low_row - 1, high_row, -1))
    detour.append((high_row, west_col, Segment.R))
    detour.extend((high_row, col, Segment.H) for col in range(west_col + 1, east_col))
    detour.append((high_row, east_col, Segment.H))

    before = state.grid
    saved = state.paths[pipe]
    state.paths[pipe] = path[:first] + detour + path[last + 1:]
    try:
        state.grid = grid_from_paths(state.n, state.paths)
    except SegmentOverlap as e:
        state.paths[pipe] = saved
        raise RectangleObstruction((e.row, e.col), str(e), state.trace)
    state.crossing_registry = _p_cross_pairs(state.paths)

    se, nw = (low_row, east_col), (high_row, west_col)
    deltas = grid_deltas(before, state.grid)
    state.trace.append(TraceEvent(kind="mini_undroop", pipe=pipe, se=se, nw=nw, deltas=deltas))
    logger.debug(f"Mini-undroop of pipe {pipe}: SE {se}, NW {nw}")

    if state.check:
        check_move(state)
    return state


def resolve_long_lines(state: AlgoState) -> AlgoState:
    """Raise the topmost long line one ladder step at a time until none remain."""
    bound = max(state.n ** 3, 1)
    iterations = 0
    while True:
        long_line = topmost_long_line(state)
        if long_line is None:
            return state
        iterations += 1
        if iterations > bound:
            raise NonTermination(
                f"Undrooping did not settle within {bound} mini-undroops", state.trace
            )
        pipe = long_line.pipe
        logger.debug(f"Long line of pipe {pipe} at {long_line.cell}")
        ladder = corner_ladder(state, pipe, long_line.cell)
        before = sum(row for row, _ in _horizontal_cells(state, pipe))
        mini_undroop(state, pipe, 1, ladder)
        after = sum(row for row, _ in _horizontal_cells(state, pipe))
        if after >= before:
            raise InvariantViolation(
                "mini-undroop lowers the row sum of the pipe's horizontal strands",
                f"pipe {pipe}: {before} -> {after}",
                state.trace,
            )


def run_maximal(w: Permutation, max_size: int = DEFAULT_MAX_SIZE, check: bool = True) -> MaximalResult:
    """
    Build the maximal marked bumpless pipedream of w.

    Args:
        w: The permutation.
        max_size: Grid bound; larger permutations are rejected.
        check: Assert the invariants after every move and every completed step.

    Returns:
        MaximalResult with the final diagram and the full trace.

    Raises:
        SizeExceeded: If w is larger than max_size.
        AlgorithmError: If any step or postcondition fails; the error carries
            the trace up to the failure.
    """
    check_size(w, max_size)
    state = init_state(w, check=check)
    try:
        while state.queue:
            droop_pipe(state)
            resolve_long_lines(state)
            if check:
                check_step(state)

        mbpd = Mbpd.from_grid(state.grid)
        if mbpd.perm != w:
            raise InvariantViolation("permutation is preserved", f"read {mbpd.perm}")
        row_code, col_code = rajcode_pair(w)
        if mbpd.rwt != row_code:
            raise InvariantViolation("row weight equals rajcode(w)", f"{mbpd.rwt} != {row_code}")
        if mbpd.cwt != col_code:
            raise InvariantViolation("column weight equals rajcode of the inverse", f"{mbpd.cwt} != {col_code}")
        if mbpd.grid.count(TileKind.J):
            raise InvariantViolation("every NW elbow is marked")
    except AlgorithmError as e:
        e.trace = list(state.trace)
        raise

    logger.debug(f"Maximal diagram of {w}: {mbpd.grid.rows()} after {len(state.trace)} events")
    return MaximalResult(mbpd=mbpd, trace=tuple(state.trace), start=build_srpd(w))


def weights_match_rajcode(w: Permutation, mbpd: Mbpd) -> bool:
    """True when the diagram's weights are (rajcode(w), rajcode(w⁻¹))."""
    row_code, _ = rajcode_pair(w)
    inverse_code, _ = rajcode_pair(inverse(w))
    return mbpd.rwt == row_code and mbpd.cwt == inverse_code
