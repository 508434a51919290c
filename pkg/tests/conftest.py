"""
Pytest configuration and fixtures.
"""
from pathlib import Path
import numpy as np
import pytest
from rklab.services.graph_service import GraphService
from rklab.utils.rng import replicate_stream

GRAPHS_DIR = Path(__file__).resolve().parent.parent / "graphs"


@pytest.fixture
def single_edge():
	"""x0 -- a with W = 2."""
	return GraphService.load_graph(GRAPHS_DIR / "single_edge.json")


@pytest.fixture
def triangle():
	"""x0, a, b with unit conductances."""
	return GraphService.load_graph(GRAPHS_DIR / "triangle.json")


@pytest.fixture
def four_cycle():
	"""Four-cycle x0-a-b-c plus the chord x0-b, W in {0.5, 1, 2}."""
	return GraphService.load_graph(GRAPHS_DIR / "four_cycle_chord.json")


@pytest.fixture
def unit_edge():
	"""x0 -- a with W = 1."""
	return GraphService.build_graph({"vertices": ["x0", "a"], "x0": "x0", "edges": [{"u": "x0", "v": "a", "w": 1.0}]})


@pytest.fixture
def chain():
	"""Path x0 -- a -- b with unit conductances."""
	return GraphService.build_graph({
		"vertices": ["x0", "a", "b"],
		"x0": "x0",
		"edges": [{"u": "x0", "v": "a", "w": 1.0}, {"u": "a", "v": "b", "w": 1.0}],
	})


@pytest.fixture
def rng():
	"""Seeded generator on the same stream construction the experiments use."""
	return replicate_stream(20240501, 99, 0)


@pytest.fixture
def make_rng():
	"""Factory for independent seeded streams."""
	def factory(replicate: int, pipeline: int = 0) -> np.random.Generator:
		return replicate_stream(20240501, 98, replicate, pipeline)
	return factory
