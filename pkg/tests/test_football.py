"""Communities of the 2001 Division 1 college football schedule.

The schedule is not redistributed with the package. Put it at
``tests/data/football.gml`` or point ``HETNET_FOOTBALL_GML`` at it.
"""
import os
from pathlib import Path

import numpy as np
import pytest

from hetnet_structure import build_nmode, detect_communities, io, max_alpha, nmi

from conftest import DATA_PATH

# NMI of the team communities against the conferences
TWO_MODE_NMI = {
    0.0: 0.719,
    0.005: 0.719,
    0.01: 0.719,
    0.015: 0.719,
    0.02: 0.719,
    0.025: 0.719,
    0.03: 0.732,
}
ONE_MODE_NMI = {
    0.0: 0.695,
    0.02: 0.699,
    0.04: 0.699,
    0.06: 0.658,
    0.08: 0.658,
    0.1: 0.711,
    0.12: 0.682,
}


def _football_path():
    path = Path(os.environ.get("HETNET_FOOTBALL_GML", DATA_PATH / "football.gml"))
    if not path.exists():
        pytest.skip(f"football data not found at {path}")
    return path


def _detect(A, alpha):
    # grid values at or past the bound fall back to the truncated series
    method = "exact" if alpha < max_alpha(A) else "series"
    return detect_communities(A, alpha, method=method)


@pytest.fixture(scope="module")
def football():
    path = _football_path()
    return io.load_gml_subset(path), io.load_gml_truth(path)


@pytest.fixture(scope="module")
def football_games():
    return io.load_gml_subset(_football_path(), conferences=False)


def test_layers(football):
    graph, truth = football
    teams, conferences = graph.layers
    assert len(teams.labels) == 115
    assert len(conferences.labels) <= 13
    assert set(truth.labels) == set(teams.labels)


@pytest.mark.parametrize("alpha", sorted(TWO_MODE_NMI))
def test_two_mode(football, alpha):
    graph, truth = football
    found = _detect(build_nmode(graph), alpha).partition.restrict(truth.labels)
    assert found.n_communities == 8
    assert nmi(found, truth) == pytest.approx(TWO_MODE_NMI[alpha], abs=0.03)


@pytest.mark.parametrize("alpha", sorted(ONE_MODE_NMI))
def test_one_mode(football, football_games, alpha):
    _, truth = football
    found = _detect(build_nmode(football_games), alpha).partition
    assert nmi(found, truth) == pytest.approx(ONE_MODE_NMI[alpha], abs=0.03)


def test_one_mode_larger_bound(football, football_games):
    graph, _ = football
    # the game matrix is a principal submatrix of the two-mode one
    assert np.isfinite(max_alpha(build_nmode(football_games)))
    assert max_alpha(build_nmode(football_games)) > max_alpha(build_nmode(graph))
