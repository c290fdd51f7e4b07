"""Global fixtures for the rinq tests."""
# Fixtures that are defined in conftest.py are available across all tests.
# See here for more info: https://docs.pytest.org/en/latest/fixture.html

import numpy as np
import pytest

from rinq.rin import adjacency, load_graph

from .commons import OXYTOCIN_GRAPH_FILE, fast_schedule


@pytest.fixture(name="oxytocin_graph")
def oxytocin_graph_fixture():
    """The contact graph of 1XY1"""
    return load_graph(OXYTOCIN_GRAPH_FILE.read_text(encoding="utf-8"))


@pytest.fixture(name="oxytocin_adjacency")
def oxytocin_adjacency_fixture(oxytocin_graph):
    """The adjacency matrix of 1XY1"""
    return adjacency(oxytocin_graph)


@pytest.fixture(name="schedule")
def schedule_fixture():
    """A cheap seeded anneal schedule"""
    return fast_schedule()


@pytest.fixture(name="rng")
def rng_fixture():
    """A seeded random generator for property tests"""
    return np.random.default_rng(20240611)


@pytest.fixture(name="cache_dir")
def cache_dir_fixture(tmp_path, monkeypatch):
    """An empty structure cache, with the environment cleared"""
    monkeypatch.delenv("RINQ_CACHE_DIR", raising=False)
    monkeypatch.delenv("RINQ_PDB_MIRROR", raising=False)
    path = tmp_path / "cache"
    path.mkdir()
    return path
