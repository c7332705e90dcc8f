import attr
import numpy as np
import pytest
from scipy import sparse

from hetnet_structure.exceptions import (
    DataError,
    DuplicateEdgeError,
    EmptyLayerError,
    InvalidWeightError,
)
from hetnet_structure.graph import (
    Edge,
    Layer,
    LayeredGraph,
    LayerWeights,
    NModeMatrix,
    NodeRef,
    apply_layer_weights,
    build_nmode,
    graph_from_nmode,
    project_unipartite_binary,
    project_unipartite_weighted,
    projection_graph,
    stack_layers,
)

from conftest import EVENTS, WOMEN, random_graph


def test_layer_offsets():
    layers = stack_layers([("x", ["a", "b"]), ("y", ["c", "d", "e"])])
    assert [layer.offset for layer in layers] == [0, 2]
    assert [layer.size for layer in layers] == [2, 3]
    assert layers[1].stop == 5


def test_layer_validation():
    with pytest.raises(EmptyLayerError):
        Layer(name="x", labels=[])
    with pytest.raises(ValueError, match="unique"):
        Layer(name="x", labels=["a", "a"])
    with pytest.raises(ValueError):
        Layer(name="", labels=["a"])


def test_graph_validation():
    x = Layer(name="x", labels=["a"])
    with pytest.raises(ValueError, match="layer names"):
        LayeredGraph(layers=[x, Layer(name="x", labels=["b"], offset=1)])
    with pytest.raises(ValueError, match="offset"):
        LayeredGraph(layers=[x, Layer(name="y", labels=["b"], offset=0)])
    with pytest.raises(ValueError, match="unique across layers"):
        LayeredGraph(layers=[x, Layer(name="y", labels=["a"], offset=1)])

    bad = Edge(NodeRef(0, 0, "a"), NodeRef(0, 1, "b"))
    with pytest.raises(DataError):
        LayeredGraph(layers=[x], edges=[bad])


def test_edge_weight():
    a = NodeRef(0, 0, "a")
    with pytest.raises(InvalidWeightError):
        Edge(a, a, -1.0)
    with pytest.raises(InvalidWeightError):
        Edge(a, a, np.nan)
    assert Edge(a, a).weight == 1.0


def test_from_labels_unknown_label():
    with pytest.raises(DataError, match="unknown node label 'z'"):
        LayeredGraph.from_labels({"x": ["a"]}, [("a", "z")])


def test_node_lookup(southern_women):
    assert southern_women.n_nodes == 32
    assert southern_women.index("w1") == 0
    assert southern_women.index("e1") == 18
    assert southern_women.node("e14") == NodeRef(1, 13, "e14")
    assert southern_women.layer_index("events") == 1
    with pytest.raises(DataError):
        southern_women.index("nobody")
    with pytest.raises(DataError, match="no such layer") as exc:
        southern_women.layer_index("teams")
    assert not isinstance(exc.value, EmptyLayerError)
    with pytest.raises(DataError, match="no such layer"):
        southern_women.layer_index(5)


def test_build_nmode_southern_women(sw_matrix):
    A = sw_matrix
    assert A.dimension == 32
    assert A.block("women", "women").nnz == 0
    assert A.block("events", "events").nnz == 0
    xy = A.block("women", "events").toarray()
    assert xy.shape == (18, 14)
    assert xy.sum() == 89
    np.testing.assert_array_equal(A.block("events", "women").toarray(), xy.T)
    assert A.is_symmetric()
    assert A.labels == tuple(WOMEN + EVENTS)


def test_build_nmode_empty():
    g = LayeredGraph.from_labels([("x", ["a", "b"]), ("y", ["c", "d", "e"])])
    A = build_nmode(g)
    assert A.dimension == 5
    assert A.entries.nnz == 0


def test_build_nmode_single_edge(two_node_matrix):
    np.testing.assert_array_equal(two_node_matrix.dense, [[0, 1], [1, 0]])


def test_build_nmode_directed():
    g = LayeredGraph.from_labels(
        {"x": ["a", "b"]}, [("a", "b", 2.0), ("b", "a", 3.0)], directed=True
    )
    np.testing.assert_array_equal(build_nmode(g).dense, [[0, 2], [3, 0]])


def test_duplicate_edges():
    g = LayeredGraph.from_labels({"x": ["a", "b"]}, [("a", "b"), ("b", "a")])
    with pytest.raises(DuplicateEdgeError):
        build_nmode(g)

    g = LayeredGraph.from_labels({"x": ["a", "b"]}, [("a", "b"), ("a", "b")], directed=True)
    with pytest.raises(DuplicateEdgeError):
        build_nmode(g)


@pytest.mark.parametrize("seed", range(10))
def test_undirected_symmetric(seed):
    g = random_graph(np.random.default_rng(seed), weighted=True)
    assert build_nmode(g).is_symmetric()


def test_nmode_validation():
    layers = stack_layers([("x", ["a", "b"])])
    with pytest.raises(ValueError, match="dimension"):
        NModeMatrix(entries=np.zeros((3, 3)), layers=layers)
    with pytest.raises(ValueError):
        NModeMatrix(entries=np.array([[0, -1], [0, 0]]), layers=layers)
    with pytest.raises(ValueError):
        NModeMatrix(entries=np.zeros((2, 3)), layers=layers)

    A = NModeMatrix.from_dense([[0, 1], [1, 0]], layers)
    assert sparse.issparse(A.entries)
    assert A == NModeMatrix(entries=sparse.csr_matrix(A.dense), layers=layers)


def test_layer_weights_identity(sw_matrix):
    w = LayerWeights.for_layers(2)
    assert apply_layer_weights(sw_matrix, w) == sw_matrix


def test_layer_weights_zero_intra():
    g = LayeredGraph.from_labels(
        [("x", ["a", "b"]), ("y", ["c"])], [("a", "b"), ("a", "c"), ("b", "c", 2)]
    )
    w = LayerWeights.for_layers(2, intra={0: 0.0, 1: 0.0})
    out = apply_layer_weights(build_nmode(g), w)
    assert out.block(0, 0).nnz == 0
    assert out.block(1, 1).nnz == 0
    np.testing.assert_array_equal(out.block(0, 1).toarray(), [[1], [2]])


def test_layer_weights_one_block():
    g = LayeredGraph.from_labels(
        [("x", ["a", "b"]), ("y", ["c"])], [("a", "b"), ("a", "c"), ("b", "c", 2)]
    )
    A = build_nmode(g)
    out = apply_layer_weights(A, LayerWeights.for_layers(2, inter={(0, 1): 2.0}))

    np.testing.assert_array_equal(out.block(0, 1).toarray(), 2 * A.block(0, 1).toarray())
    np.testing.assert_array_equal(out.block(1, 0).toarray(), A.block(1, 0).toarray())
    np.testing.assert_array_equal(out.block(0, 0).toarray(), A.block(0, 0).toarray())


@pytest.mark.parametrize("factor", [0.5, 2.0, 3.0])
def test_layer_weights_linear(sw_matrix, factor):
    base = apply_layer_weights(sw_matrix, LayerWeights.for_layers(2, inter={(1, 0): 1.5}))
    scaled = apply_layer_weights(
        sw_matrix, LayerWeights.for_layers(2, inter={(1, 0): 1.5 * factor})
    )
    np.testing.assert_allclose(
        scaled.block(1, 0).toarray(), factor * base.block(1, 0).toarray()
    )
    np.testing.assert_array_equal(scaled.block(0, 1).toarray(), base.block(0, 1).toarray())


def test_layer_weights_validation():
    with pytest.raises(InvalidWeightError):
        LayerWeights.for_layers(2, intra={0: -1.0})
    with pytest.raises(ValueError, match="cover"):
        LayerWeights(intra=[1.0, 1.0], inter={(0, 1): 1.0})
    with pytest.raises(ValueError, match="out of range"):
        LayerWeights.for_layers(2, intra={2: 1.0})
    with pytest.raises(ValueError):
        apply_layer_weights(
            build_nmode(LayeredGraph.from_labels({"x": ["a"]})), LayerWeights.for_layers(2)
        )


def test_layer_weights_matrix():
    w = LayerWeights.for_layers(2, intra={1: 3.0}, inter={(1, 0): 0.5})
    np.testing.assert_array_equal(w.matrix(), [[1.0, 1.0], [0.5, 3.0]])


def _bipartite(attendance):
    people = list(attendance)
    events = sorted({e for evs in attendance.values() for e in evs})
    edges = [(p, e) for p, evs in attendance.items() for e in evs]
    return LayeredGraph.from_labels({"people": people, "events": events}, edges)


def test_projection_disjoint():
    g = _bipartite({"a": ["x"], "b": ["y"]})
    assert project_unipartite_binary(g, "people", "events").entries.nnz == 0
    assert project_unipartite_weighted(g, "people", "events").entries.nnz == 0


def test_projection_single_node():
    g = _bipartite({"a": ["x", "y"]})
    P = project_unipartite_weighted(g, 0, 1)
    assert P.dimension == 1
    assert P.entries.nnz == 0


def test_projection_counts():
    g = _bipartite({"a": ["x", "y", "z"], "b": ["x", "y"], "c": ["z"]})
    W = project_unipartite_weighted(g, "people", "events")
    np.testing.assert_array_equal(W.dense, [[0, 2, 1], [2, 0, 0], [1, 0, 0]])
    B = project_unipartite_binary(g, "people", "events")
    np.testing.assert_array_equal(B.dense, [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    assert W.layers[0].name == "people"
    assert W.layers[0].offset == 0


def test_projection_errors(southern_women):
    with pytest.raises(ValueError, match="differ"):
        project_unipartite_binary(southern_women, "women", "women")
    with pytest.raises(DataError, match="no such layer"):
        project_unipartite_binary(southern_women, "teams", "events")


def test_southern_women_projections(southern_women, sw_matrix):
    xy = sw_matrix.block("women", "events").toarray()
    oracle = xy @ xy.T
    np.fill_diagonal(oracle, 0)

    W = project_unipartite_weighted(southern_women, "women", "events")
    np.testing.assert_array_equal(W.dense, oracle)
    np.testing.assert_array_equal(W.dense.sum(axis=1), oracle.sum(axis=1))

    B = project_unipartite_binary(southern_women, "women", "events")
    assert B.dimension == 18
    assert B.is_symmetric()
    assert set(np.unique(B.dense)) <= {0.0, 1.0}
    np.testing.assert_array_equal(B.dense, (W.dense >= 1).astype(float))

    # pairwise intersection oracle
    events = {w: set(np.flatnonzero(xy[i])) for i, w in enumerate(WOMEN)}
    for i, a in enumerate(WOMEN):
        for j, b in enumerate(WOMEN):
            assert B.dense[i, j] == float(i != j and bool(events[a] & events[b]))


@pytest.mark.parametrize("seed", range(8))
def test_projection_brute_force(seed):
    rng = np.random.default_rng(seed)
    xy = (rng.random((4, 5)) < 0.5).astype(int)
    attendance = {f"p{i}": [f"v{j}" for j in np.flatnonzero(xy[i])] for i in range(4)}
    people = list(attendance)
    events = [f"v{j}" for j in range(5)]
    edges = [(p, e) for p, evs in attendance.items() for e in evs]
    g = LayeredGraph.from_labels({"people": people, "events": events}, edges)

    oracle = xy @ xy.T
    np.fill_diagonal(oracle, 0)
    np.testing.assert_array_equal(project_unipartite_weighted(g, 0, 1).dense, oracle)


def test_projection_graph(southern_women):
    g = projection_graph(southern_women, "women", "events", weighted=True)
    assert len(g.layers) == 1
    assert not g.directed
    assert build_nmode(g) == project_unipartite_weighted(southern_women, "women", "events")


def test_graph_from_nmode_roundtrip(southern_women, sw_matrix):
    g = graph_from_nmode(sw_matrix)
    assert len(g.edges) == 89
    assert build_nmode(g) == sw_matrix


def test_graph_from_nmode_asymmetric():
    A = NModeMatrix.from_dense([[0, 1], [0, 0]], stack_layers([("x", ["a", "b"])]))
    with pytest.raises(ValueError, match="symmetric"):
        graph_from_nmode(A)
    g = graph_from_nmode(A, directed=True)
    assert g.directed
    assert build_nmode(g) == A


def test_immutable(southern_women):
    with pytest.raises(attr.exceptions.FrozenInstanceError):
        southern_women.directed = True
