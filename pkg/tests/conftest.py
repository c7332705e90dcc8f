from pathlib import Path

import numpy as np
import pytest

from hetnet_structure import build_nmode, load_builtin
from hetnet_structure.graph import LayeredGraph

DATA_PATH = Path(__file__).parent / "data"

WOMEN = [f"w{i}" for i in range(1, 19)]
EVENTS = [f"e{i}" for i in range(1, 15)]


def random_graph(
    rng: np.random.Generator,
    max_nodes: int = 12,
    max_layers: int = 3,
    density: float = 0.4,
    weighted: bool = False,
    directed: bool = False,
) -> LayeredGraph:
    """A random layered graph with at most ``max_nodes`` nodes."""
    n_layers = int(rng.integers(1, max_layers + 1))
    sizes = [int(rng.integers(1, max(2, max_nodes // n_layers) + 1)) for _ in range(n_layers)]
    layers = [
        (f"layer{k}", [f"n{k}_{i}" for i in range(size)]) for k, size in enumerate(sizes)
    ]
    labels = [label for _, lbls in layers for label in lbls]

    edges = []
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            if i == j or (not directed and j < i):
                continue
            if rng.random() < density:
                w = float(rng.integers(1, 4)) if weighted else 1.0
                edges.append((a, b, w))
    return LayeredGraph.from_labels(layers, edges, directed=directed)


@pytest.fixture(scope="session")
def southern_women():
    return load_builtin("southern_women")


@pytest.fixture(scope="session")
def sw_matrix(southern_women):
    return build_nmode(southern_women)


@pytest.fixture(scope="function")
def two_node():
    return LayeredGraph.from_labels({"people": ["a", "b"]}, [("a", "b")])


@pytest.fixture(scope="function")
def two_node_matrix(two_node):
    return build_nmode(two_node)


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(1234)
