"""Tests for the maximal module."""

import random

import pytest

from maxbpd.grid import TileGrid, TileKind, read_permutation, rothe_pipedream
from maxbpd.maximal import (
    AlgorithmError,
    InvariantViolation,
    LongLine,
    MissingHTile,
    ReplayError,
    RuleConflict,
    TraceEvent,
    check_move,
    check_step,
    corner_ladder,
    droop_pipe,
    init_state,
    mini_undroop,
    replay,
    resolve_long_lines,
    run_maximal,
    topmost_long_line,
    weights_match_rajcode,
)
from maxbpd.perm import SizeExceeded, all_permutations, from_images, parse_permutation
from maxbpd.snow import is_dominant, rajcode_pair
from tests.conftest import MAXIMAL_1423_ROWS, MAXIMAL_21453_ROWS, MAXIMAL_316524_ROWS


def _droop_until_long_line(state):
    """Process queued pipes until a droop leaves a long line behind."""
    while state.queue:
        droop_pipe(state)
        if topmost_long_line(state) is not None:
            return state
    raise AssertionError("no long line appeared")


def test_init_state_queue_bottom_row_first():
    """Test that pipes are queued from the bottom starting row upwards."""
    assert init_state(parse_permutation("1423")).queue == [3, 2, 4, 1]
    assert init_state(parse_permutation("316524")).queue == [4, 2, 5, 6, 1, 3]
    assert init_state(parse_permutation("5241736")).queue == [6, 3, 7, 1, 4, 2, 5]


def test_init_state_stars():
    """Test that only pipe 1 of 1423 carries a star."""
    state = init_state(parse_permutation("1423"))
    assert state.stars_remaining.get(1, 0) == 1
    assert all(state.stars_remaining.get(p, 0) == 0 for p in (2, 3, 4))
    assert topmost_long_line(state) is None
    assert state.grid == state.start_grid


def test_droop_1423():
    """Test that drooping pipe 1 of 1423 gives the maximal diagram directly."""
    state = init_state(parse_permutation("1423"))
    for _ in range(3):
        droop_pipe(state)
    assert [e.kind for e in state.trace] == ["skip", "skip", "skip"]
    assert state.grid == state.start_grid

    droop_pipe(state, 1)
    event = state.trace[-1]
    assert event.kind == "droop"
    assert event.pipe == 1
    assert event.cut == (1, 2)
    assert (2, 2, "B", "M") in event.deltas
    assert state.grid.rows() == MAXIMAL_1423_ROWS
    assert topmost_long_line(state) is None


def test_droop_5241736_first_droop():
    """Test the first droop of 5241736 bends pipe 1 below its cut."""
    state = init_state(parse_permutation("5241736"))
    while True:
        droop_pipe(state)
        if state.trace[-1].kind == "droop":
            break
    event = state.trace[-1]
    assert event.pipe == 1
    assert event.cut == (4, 3)
    assert state.grid[5, 3] == TileKind.M
    assert state.grid[5, 2] == TileKind.CROSS
    assert state.grid[5, 1] == TileKind.R


def test_droop_out_of_order():
    """Test that only the head of the queue may droop."""
    state = init_state(parse_permutation("1423"))
    with pytest.raises(AlgorithmError, match="not next in the queue"):
        droop_pipe(state, 1)


def test_droop_empty_queue():
    """Test drooping once every pipe is processed."""
    state = init_state(parse_permutation("12"))
    droop_pipe(state)
    droop_pipe(state)
    with pytest.raises(AlgorithmError, match="queue is empty"):
        droop_pipe(state)


def test_droop_missing_h_tile():
    """Test that a pipe asked for more stars than its row has H tiles fails."""
    state = init_state(parse_permutation("1423"))
    state.stars_remaining[3] = 5
    with pytest.raises(MissingHTile) as exc_info:
        droop_pipe(state)
    assert exc_info.value.pipe == 3
    assert exc_info.value.stars == 5
    assert exc_info.value.found == 0


def test_long_line_and_ladder_316524():
    """Test the long line and corner ladder left by pipe 1 of 316524."""
    state = _droop_until_long_line(init_state(parse_permutation("316524")))
    long_line = topmost_long_line(state)
    assert long_line == LongLine(pipe=1, cell=(3, 3))

    ladder = corner_ladder(state, 1, long_line.cell)
    assert ladder.turns == ((3, 4),)
    assert ladder.b0 == 3
    assert ladder.top_row == 2
    assert (ladder.row(1), ladder.row(2)) == (3, 2)
    assert (ladder.col(0), ladder.col(1)) == (3, 4)


def test_mini_undroop_316524():
    """Test that one mini-undroop moves pipe 1 to the NW corner of its rectangle."""
    state = _droop_until_long_line(init_state(parse_permutation("316524")))
    mini_undroop(state, 1)
    event = state.trace[-1]
    assert event.kind == "mini_undroop"
    assert event.se == (3, 4)
    assert event.nw == (2, 3)
    assert topmost_long_line(state) is None

    while state.queue:
        droop_pipe(state)
        resolve_long_lines(state)
    assert state.grid.rows() == MAXIMAL_316524_ROWS


def test_mini_undroop_without_long_line():
    """Test that a pipe with no long line cannot be undrooped."""
    state = init_state(parse_permutation("1423"))
    with pytest.raises(AlgorithmError, match="no long line"):
        mini_undroop(state, 1)


@pytest.mark.parametrize(
    "perm, rows",
    [
        ("1423", MAXIMAL_1423_ROWS),
        ("21453", MAXIMAL_21453_ROWS),
        ("316524", MAXIMAL_316524_ROWS),
    ],
)
def test_run_maximal_worked_examples(perm, rows):
    """Test the final diagram of the worked examples."""
    w = parse_permutation(perm)
    result = run_maximal(w)
    assert result.mbpd.grid.rows() == rows
    assert result.mbpd.perm == w
    assert result.mbpd.weight_pair == rajcode_pair(w)
    assert weights_match_rajcode(w, result.mbpd)


def test_run_maximal_316524_weights():
    """Test the weight pair of 316524."""
    result = run_maximal(parse_permutation("316524"))
    assert result.mbpd.rwt == (4, 2, 3, 2, 0, 0)
    assert result.mbpd.cwt == (3, 3, 2, 2, 1, 0)
    assert [e.kind for e in result.trace].count("mini_undroop") == 1


def test_run_maximal_21453_needs_no_undroop():
    """Test that 21453 settles by drooping alone."""
    result = run_maximal(parse_permutation("21453"))
    kinds = [e.kind for e in result.trace]
    assert "mini_undroop" not in kinds
    assert "droop" in kinds
    assert len(kinds) - kinds.count("mini_undroop") == 5


def test_run_maximal_all_of_s5():
    """Test every permutation of size five against its rajcode."""
    for w in all_permutations(5):
        result = run_maximal(w)
        perm, _ = read_permutation(result.mbpd.grid)
        assert perm == w
        assert result.mbpd.weight_pair == rajcode_pair(w), str(w)
        assert result.mbpd.grid.count(TileKind.J) == 0


def test_run_maximal_dominant_is_rothe():
    """Test that dominant permutations keep their Rothe pipedream."""
    dominant = [w for w in all_permutations(6) if is_dominant(w)]
    assert dominant
    for w in dominant:
        result = run_maximal(w)
        assert all(e.kind == "skip" for e in result.trace)
        assert result.mbpd.grid == rothe_pipedream(w).grid


def test_run_maximal_deterministic():
    """Test that two runs give the same diagram and trace."""
    w = parse_permutation("5241736")
    first, second = run_maximal(w), run_maximal(w)
    assert first.mbpd.grid == second.mbpd.grid
    assert first.trace == second.trace


def test_frames_replay_to_final_grid():
    """Test that replaying the trace ends on the final diagram."""
    result = run_maximal(parse_permutation("316524"))
    frames = result.frames()
    assert len(frames) == len(result.trace) + 1
    assert frames[0] == result.start.grid
    assert frames[-1] == result.mbpd.grid


def test_replay_mismatch():
    """Test that a delta disagreeing with the grid is rejected."""
    start = TileGrid.from_rows(["RH", "VR"])
    bad = TraceEvent(kind="droop", pipe=1, cut=(1, 2), deltas=[(1, 1, "B", "M")])
    with pytest.raises(ReplayError, match=r"expects B at \(1,1\)"):
        replay(start, [bad])


@pytest.mark.parametrize("n, seed", [(6, 1), (7, 2)])
def test_run_maximal_random_samples(n, seed):
    """Test seeded random permutations of larger sizes."""
    rng = random.Random(seed)
    for _ in range(100):
        images = list(range(1, n + 1))
        rng.shuffle(images)
        w = from_images(images)
        assert run_maximal(w).mbpd.weight_pair == rajcode_pair(w), str(w)


def test_run_maximal_size_twelve():
    """Test a size twelve permutation with several undroops."""
    w = from_images([6, 1, 4, 3, 12, 11, 10, 9, 2, 8, 5, 7])
    result = run_maximal(w)
    assert result.mbpd.perm == w
    assert result.mbpd.weight_pair == rajcode_pair(w)


def test_run_maximal_size_exceeded():
    """Test that permutations above the grid bound are rejected."""
    with pytest.raises(SizeExceeded):
        run_maximal(parse_permutation("21453"), max_size=4)


def test_error_messages():
    """Test the messages and trace carried by construction errors."""
    conflict = RuleConflict((3, 2), "west", TileKind.CROSS, trace=[TraceEvent(kind="skip", pipe=1)])
    assert "No droop rule moving west into (3, 2) holding C" in str(conflict)
    assert len(conflict.trace) == 1

    violation = InvariantViolation("permutation is preserved", "read 21")
    assert violation.name == "permutation is preserved"
    assert str(violation) == "Invariant violated: permutation is preserved (read 21)"
    assert violation.trace == []


@pytest.mark.parametrize("n", [1, 4, 7])
def test_run_maximal_identity_and_reversal(n):
    """Test the identity and the longest permutation."""
    ident = from_images(list(range(1, n + 1)))
    assert run_maximal(ident).mbpd.grid == rothe_pipedream(ident).grid

    reversal = from_images(list(range(n, 0, -1)))
    result = run_maximal(reversal)
    assert result.mbpd.weight_pair == rajcode_pair(reversal)
    assert result.mbpd.blank_count == n * (n - 1) // 2


def test_run_maximal_all_of_s6_checked():
    """Test every permutation of size six with the invariant checks on."""
    for w in all_permutations(6):
        result = run_maximal(w, check=True)
        assert result.mbpd.perm == w
        assert result.mbpd.weight_pair == rajcode_pair(w), str(w)


def test_reading_restored_after_undroop_312654():
    """Test that 312654 reads differently between the droop of pipe 3 and its undroop."""
    w = parse_permutation("312654")
    state = init_state(w)
    while state.queue[0] != 3:
        droop_pipe(state)
        resolve_long_lines(state)
        check_step(state)

    droop_pipe(state)
    assert state.trace[-1].cut == (1, 5)
    assert state.grid.rows() == ["BBBBRH", "BBBRCH", "BRHCCH", "RMRCMR", "VRCMRC", "VVVRCC"]
    perm, _ = read_permutation(state.grid)
    assert perm == parse_permutation("321654")
    check_move(state)
    with pytest.raises(InvariantViolation, match="permutation is preserved"):
        check_step(state)

    events = len(state.trace)
    resolve_long_lines(state)
    assert state.trace[-1].kind == "mini_undroop"
    assert len(state.trace) > events
    perm, _ = read_permutation(state.grid)
    assert perm == w
    check_step(state)


def test_check_move_reads_crossing_registry():
    """Test that a pair registered with two p-crosses is reported."""
    state = init_state(parse_permutation("1423"))
    check_move(state)
    state.crossing_registry[frozenset({1, 2})] = 2
    with pytest.raises(InvariantViolation, match=r"at most one p-cross between two pipes \(pipes \[1, 2\]\)"):
        check_move(state)


def test_crossing_registry_follows_routes():
    """Test that the registry is refreshed after every move."""
    state = _droop_until_long_line(init_state(parse_permutation("316524")))
    assert state.crossing_registry
    assert all(count == 1 for count in state.crossing_registry.values())
    mini_undroop(state, 1)
    assert all(count == 1 for count in state.crossing_registry.values())


def test_size_twelve_event_sequence():
    """Test the droops and undroops of [6,1,4,3,12,11,10,9,2,8,5,7]."""
    w = from_images([6, 1, 4, 3, 12, 11, 10, 9, 2, 8, 5, 7])
    state = init_state(w)
    while state.queue:
        pipe = state.queue[0]
        droop_pipe(state)
        if pipe == 6:
            assert topmost_long_line(state) == LongLine(pipe=1, cell=(5, 6))
        else:
            assert topmost_long_line(state) is None
        resolve_long_lines(state)
        check_step(state)

    droops = [e.pipe for e in state.trace if e.kind == "droop"]
    assert droops == [2, 3, 4, 1, 6]
    undroops = [e.pipe for e in state.trace if e.kind == "mini_undroop"]
    assert undroops == [1, 1, 1, 4, 4, 4, 4, 3, 3, 3, 3]
    first_undroop = next(i for i, e in enumerate(state.trace) if e.kind == "mini_undroop")
    assert state.trace[first_undroop - 1].kind == "droop"
    assert state.trace[first_undroop - 1].pipe == 6
