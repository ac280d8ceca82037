"""Tests for the render module."""

import pytest
from PIL import Image

from maxbpd.grid import TileKind, build_srpd, rothe_pipedream
from maxbpd.perm import identity, parse_permutation
from maxbpd.render import RenderError, render, render_ascii, render_png, render_svg


def test_ascii_identity_two_by_two():
    """Test the forced 2×2 identity picture with its labels."""
    assert render_ascii(rothe_pipedream(identity(2))) == "┌─ 1\n│┌ 2\n12\n"


def test_ascii_marks_dot(p2):
    """Test that the marked elbow where pipe 1 turns up in column 4 is an elbow with a dot."""
    lines = render_ascii(p2).splitlines()
    assert lines[3][3:5] == "┘\u0323"
    assert lines[3].count("\u0323") == 1
    assert lines[0].endswith(" 2")
    assert lines[-1] == "123456"


def test_ascii_stars(w251634):
    """Test that the snow Rothe pipedream shows three stars."""
    text = render_ascii(build_srpd(w251634))
    assert text.count("*") == 3
    assert text.splitlines()[0].startswith("·┌**──")


def test_ascii_wide_labels():
    """Test that cells widen for two-digit labels and keep pipes joined."""
    lines = render_ascii(rothe_pipedream(identity(10))).splitlines()
    assert lines[0].startswith("┌──")
    assert lines[-1].startswith("1 2 3")
    assert lines[-1].endswith("10")


def test_svg_draws_pipes_and_marks(p2):
    """Test that the SVG has one marker per marked elbow and labels."""
    svg = render_svg(p2)
    assert svg.startswith("<?xml") or svg.startswith("<svg")
    assert svg.count("<circle") == p2.mark_count
    assert ">6<" in svg


def test_render_dispatch(p1):
    """Test style dispatch and unknown styles."""
    assert render(p1, "ascii") == render_ascii(p1)
    assert "<svg" in render(p1, "svg")
    with pytest.raises(RenderError, match="Unknown"):
        render(p1, "pdf")


def test_png_written(tmp_path, p2):
    """Test writing a PNG picture."""
    path = render_png(p2, tmp_path / "p2.png", cell_size=20)
    with Image.open(path) as image:
        assert image.format == "PNG"
        assert image.size == (6 * 20 + 20 + 20, 6 * 20 + 20 + 20)


def test_png_unwritable(tmp_path, p2):
    """Test that an unwritable path is a render error."""
    with pytest.raises(RenderError, match="Unable to write PNG"):
        render_png(p2, tmp_path / "missing" / "p2.png")


def test_blank_glyph():
    """Test that blanks render as a middle dot."""
    text = render_ascii(rothe_pipedream(parse_permutation("21")))
    assert text.splitlines()[0] == "·┌ 2"
    assert rothe_pipedream(parse_permutation("21")).grid[1, 1] == TileKind.BLANK
