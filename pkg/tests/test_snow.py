"""Tests for the snow module."""

import pytest

from maxbpd.perm import all_permutations, identity, inverse, parse_permutation
from maxbpd.snow import (
    Diagram,
    DiagramError,
    dark_clouds,
    is_dominant,
    lehmer_weights,
    left_stars_per_pipe,
    rajcode,
    rajcode_pair,
    rothe_diagram,
    snow_diagrams,
    stars_per_pipe,
)


def test_rothe_diagram_examples():
    """Test Rothe diagrams of the worked examples."""
    assert rothe_diagram(parse_permutation("251634")).cells == {
        (1, 1), (2, 1), (2, 3), (2, 4), (4, 3), (4, 4)
    }
    assert rothe_diagram(parse_permutation("21453")).cells == {(1, 1), (3, 3), (4, 3)}
    assert len(rothe_diagram(identity(4))) == 0


def test_diagram_rejects_cells_outside_grid():
    """Test that a diagram cannot hold a cell outside its grid."""
    with pytest.raises(DiagramError, match="outside"):
        Diagram(3, frozenset({(4, 1)}))


def test_diagram_weights_sum_to_size():
    """Test that row and column weights both sum to the number of cells."""
    diagram = rothe_diagram(parse_permutation("251634"))
    assert sum(diagram.row_weight()) == len(diagram)
    assert sum(diagram.col_weight()) == len(diagram)


def test_dark_clouds_scan_order():
    """Test dark clouds of Rothe(251634) come out bottom to top."""
    dark = dark_clouds(rothe_diagram(parse_permutation("251634")))
    assert dark == ((4, 4), (2, 3), (1, 1))


def test_dark_clouds_skip_used_column():
    """Test that a row whose only cell sits in a darkened column gets no dark cell."""
    assert set(dark_clouds(rothe_diagram(parse_permutation("21453")))) == {(4, 3), (1, 1)}


def test_dark_clouds_empty():
    """Test that the empty diagram has no dark clouds."""
    assert dark_clouds(Diagram(3)) == ()


def test_snow_diagrams_example():
    """Test snow and left snow stars of Rothe(251634)."""
    snow, left = snow_diagrams(rothe_diagram(parse_permutation("251634")))
    assert snow.snow_cells == {(1, 3), (1, 4), (3, 4)}
    assert left.snow_cells == {(2, 2), (4, 1), (4, 2)}
    assert snow.dark == left.dark


def test_snow_skips_cells_already_in_diagram():
    """Test that snow only fills empty cells."""
    snow, _ = snow_diagrams(rothe_diagram(parse_permutation("21453")))
    assert snow.snow_cells == {(1, 3), (2, 3)}
    assert not snow.snow_cells & snow.base.cells
    assert set(snow.dark) <= snow.base.cells


def test_young_diagram_gets_no_snow():
    """Test that a top-left-justified diagram adds no snow stars."""
    young = Diagram(4, frozenset({(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)}))
    snow, _ = snow_diagrams(young)
    assert snow.snow_cells == frozenset()


def test_rajcode_pair_examples():
    """Test rajcode pairs of the worked examples."""
    assert rajcode_pair(parse_permutation("251634")) == ((3, 3, 1, 2, 0, 0), (3, 2, 2, 2, 0, 0))
    assert rajcode_pair(parse_permutation("21453")) == ((2, 1, 1, 1, 0), (2, 1, 2, 0, 0))
    assert rajcode_pair(identity(3)) == ((0, 0, 0), (0, 0, 0))


def test_stars_per_pipe_examples():
    """Test the number of stars on each pipe's starting row."""
    assert stars_per_pipe(parse_permutation("251634")) == {1: 1, 2: 2, 3: 0, 4: 0, 5: 0, 6: 0}
    assert stars_per_pipe(parse_permutation("21453")) == {1: 1, 2: 1, 3: 0, 4: 0, 5: 0}
    assert set(stars_per_pipe(identity(4)).values()) == {0}


def test_snow_invariants_on_s6():
    """Test the snow invariants over all of S_6."""
    for w in all_permutations(6):
        row_code, col_code = rajcode_pair(w)
        assert sum(row_code) == sum(col_code)
        assert stars_per_pipe(w) == left_stars_per_pipe(w)
        assert col_code == rajcode(inverse(w))
        assert all(a >= b for a, b in zip(row_code, lehmer_weights(w)))


def test_dark_clouds_at_most_one_per_row_and_column():
    """Test that dark clouds never share a row or a column on S_5."""
    for w in all_permutations(5):
        dark = dark_clouds(rothe_diagram(w))
        assert len({r for r, _ in dark}) == len(dark)
        assert len({c for _, c in dark}) == len(dark)


def test_is_dominant():
    """Test recognition of dominant permutations."""
    assert is_dominant(parse_permutation("321"))
    assert is_dominant(parse_permutation("3412"))
    assert not is_dominant(parse_permutation("132"))
    assert is_dominant(parse_permutation("4312"))
    assert is_dominant(identity(4))
    assert not is_dominant(parse_permutation("1423"))
