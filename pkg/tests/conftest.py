"""Shared fixtures: the worked diagrams used across the test modules."""

import pytest

from maxbpd.grid import Mbpd, TileGrid, rothe_pipedream
from maxbpd.perm import parse_permutation

P2_ROWS = ["BBBRHH", "BBBVRH", "BRHCCH", "RCHMVR", "VVRHCC", "VVVRCC"]

RPD_251634_ROWS = ["BRHHHH", "BVBBRH", "RCHHCH", "VVBBVR", "VVRHCC", "VVVRCC"]

MAXIMAL_21453_ROWS = ["BBRHH", "BRCHH", "RCMRH", "VVBVR", "VVRCC"]

MAXIMAL_1423_ROWS = ["BRHH", "RMBR", "VRHC", "VVRC"]

MAXIMAL_316524_ROWS = ["BBBBRH", "BBRHCH", "BRMRMR", "RMRMRC", "VRCHCC", "VVVRCC"]


@pytest.fixture
def w251634():
    """The running example permutation 251634."""
    return parse_permutation("251634")


@pytest.fixture
def p1(w251634):
    """The first diagram of the 251634 example: its Rothe pipedream."""
    return rothe_pipedream(w251634)


@pytest.fixture
def p2():
    """The second diagram of the 251634 example, with one marked elbow."""
    return Mbpd.from_grid(TileGrid.from_rows(P2_ROWS))


@pytest.fixture
def isolated_config(tmp_path, monkeypatch):
    """Run with no config files and no MAXBPD_* overrides."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))
    for variable in ("MAXBPD_MAX_GRID_SIZE", "MAXBPD_ENUMERATION_BOUND", "MAXBPD_JOBS"):
        monkeypatch.delenv(variable, raising=False)
    return tmp_path
