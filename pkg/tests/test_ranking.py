import numpy as np
import pytest

from hetnet_structure.centrality import CentralityParams, bonacich_exact
from hetnet_structure.community import Partition
from hetnet_structure.exceptions import DivergenceError, PartitionMismatchError
from hetnet_structure.graph import LayeredGraph, NodeRef, build_nmode
from hetnet_structure.ranking import (
    RankTable,
    RoleLabel,
    ScoreTable,
    alpha_sweep,
    classify_roles,
    community_scores,
    fractional_ranks,
    rank_within_groups,
)

from conftest import random_graph


def _table(scores, grid=(0.0, 0.1), labels=None):
    scores = np.asarray(scores, dtype=float)
    labels = labels or [f"n{i}" for i in range(len(scores))]
    return ScoreTable(
        grid=grid, scores=scores, nodes=[NodeRef(0, i, lbl) for i, lbl in enumerate(labels)]
    )


def test_fractional_ranks():
    np.testing.assert_array_equal(fractional_ranks([3.0, 5.0, 3.0, 1.0]), [2.5, 1, 2.5, 4])
    np.testing.assert_array_equal(fractional_ranks([1.0, 1.0, 1.0]), [2, 2, 2])
    np.testing.assert_array_equal(fractional_ranks([1.0]), [1])
    np.testing.assert_array_equal(fractional_ranks([2.0, 2.0 + 1e-12, 0.0]), [1.5, 1.5, 3])


@pytest.mark.parametrize("seed", range(5))
def test_fractional_rank_sum(seed):
    rng = np.random.default_rng(seed)
    scores = rng.integers(0, 5, size=17).astype(float)
    assert fractional_ranks(scores).sum() == 17 * 18 / 2


def test_score_table_validation():
    with pytest.raises(ValueError, match="increasing"):
        _table([[1, 2]], grid=(0.1, 0.1))
    with pytest.raises(ValueError, match="shape"):
        _table([[1, 2, 3]])
    with pytest.raises(ValueError, match="empty"):
        _table(np.zeros((1, 0)), grid=())


def test_alpha_sweep_degrees(sw_matrix):
    st = alpha_sweep(sw_matrix, [0.0])
    np.testing.assert_array_equal(st.scores[:, 0], sw_matrix.dense.sum(axis=1))
    assert st.labels == sw_matrix.labels


def test_alpha_sweep_shape_and_monotone(sw_matrix):
    grid = np.round(np.arange(0, 0.141, 0.02), 12)
    st = alpha_sweep(sw_matrix, grid)
    assert st.scores.shape == (32, 8)
    assert np.all(np.diff(st.scores, axis=1) >= -1e-10)
    for k, alpha in enumerate(grid):
        C = bonacich_exact(sw_matrix, CentralityParams(alpha=alpha))
        np.testing.assert_allclose(st.scores[:, k], C.scores)


def test_alpha_sweep_bound(sw_matrix):
    with pytest.raises(DivergenceError, match="grid value alpha=0.2"):
        alpha_sweep(sw_matrix, [0.0, 0.1, 0.2])


def test_alpha_sweep_series_any_alpha(sw_matrix):
    st = alpha_sweep(sw_matrix, [0.1, 0.2], method="series", terms=3)
    assert st.scores.shape == (32, 2)


def test_rank_full_tie():
    st = _table(np.ones((3, 2)))
    rt = rank_within_groups(st, Partition.from_groups([["n0", "n1", "n2"]]))
    np.testing.assert_array_equal(rt.ranks, 2.0)


def test_rank_within_communities():
    st = _table([[5, 5], [3, 7], [1, 1], [2, 2]])
    p = Partition.from_groups([["n0", "n1"], ["n2", "n3"]])
    rt = rank_within_groups(st, p)
    np.testing.assert_array_equal(rt.ranks, [[1, 2], [2, 1], [2, 2], [1, 1]])
    assert rt.rank("n1", 0.1) == 1.0
    np.testing.assert_array_equal(rt.trajectory("n0"), [1, 2])
    with pytest.raises(KeyError):
        rt.rank("n1", 0.3)
    with pytest.raises(KeyError):
        rt.trajectory("zz")


def test_rank_by_layer():
    nodes = [NodeRef(0, 0, "a"), NodeRef(0, 1, "b"), NodeRef(1, 0, "x")]
    st = ScoreTable(grid=[0.0], scores=[[1.0], [2.0], [9.0]], nodes=nodes)
    p = Partition.from_groups([["a", "b", "x"]])
    np.testing.assert_array_equal(rank_within_groups(st, p).ranks[:, 0], [2, 1, 1])
    np.testing.assert_array_equal(
        rank_within_groups(st, p, by_layer=False).ranks[:, 0], [3, 2, 1]
    )


def test_rank_sums(sw_matrix):
    from hetnet_structure.io import load_builtin_partition

    st = alpha_sweep(sw_matrix, [0.0, 0.04, 0.08, 0.12])
    p = load_builtin_partition("southern_women_truth_bipartite")
    rt = rank_within_groups(st, p)
    for key in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        rows = [
            i
            for i, node in enumerate(st.nodes)
            if (rt.partition.assignment[i], node.layer) == key
        ]
        k = len(rows)
        np.testing.assert_allclose(rt.ranks[rows].sum(axis=0), k * (k + 1) / 2)


def test_rank_sums_mixed_layers(sw_matrix):
    from hetnet_structure.io import load_builtin_partition

    st = alpha_sweep(sw_matrix, [0.0, 0.08])
    p = load_builtin_partition("southern_women_truth_bipartite")
    mixed = rank_within_groups(st, p, by_layer=False)
    layered = rank_within_groups(st, p)
    for c in range(p.n_communities):
        rows = np.flatnonzero(mixed.partition.assignment == c)
        k = len(rows)
        np.testing.assert_allclose(mixed.ranks[rows].sum(axis=0), k * (k + 1) / 2)
        # women and events of one community are ranked apart by default
        assert not np.allclose(layered.ranks[rows].sum(axis=0), k * (k + 1) / 2)


@pytest.mark.parametrize("beta", [0.5, 3.0])
def test_rank_beta_invariance(sw_matrix, beta):
    from hetnet_structure.io import load_builtin_partition

    p = load_builtin_partition("southern_women_truth_bipartite")
    grid = [0.02, 0.1]
    base = rank_within_groups(alpha_sweep(sw_matrix, grid), p)
    scaled = rank_within_groups(alpha_sweep(sw_matrix, grid, beta=beta), p)
    np.testing.assert_array_equal(base.ranks, scaled.ranks)


def test_rank_isolated_node():
    rng = np.random.default_rng(7)
    g = random_graph(rng, max_layers=1, density=0.5)
    labels = list(g.layers[0].labels)
    edges = [(e.source.label, e.target.label) for e in g.edges]
    bigger = LayeredGraph.from_labels({"x": labels + ["lonely"]}, edges)

    st = alpha_sweep(build_nmode(g), [0.0])
    st2 = alpha_sweep(build_nmode(bigger), [0.0])
    p = Partition.from_groups([labels])
    p2 = Partition.from_groups([labels + ["lonely"]])
    r = rank_within_groups(st, p).ranks[:, 0]
    r2 = rank_within_groups(st2, p2).ranks[:, 0]
    connected = st.scores[:, 0] > 0
    # the isolated node ranks last and leaves connected nodes alone
    np.testing.assert_array_equal(r2[:-1][connected], r[connected])
    assert r2[-1] == r2.max()


def test_classify_roles():
    st = _table([[5, 1], [3, 7], [4, 2], [1, 3]], grid=(0.0, 0.1))
    p = Partition.from_groups([["n0", "n1", "n2", "n3"]])
    rt = rank_within_groups(st, p)
    roles = {r.node.label: r for r in classify_roles(rt)}
    assert roles["n1"].role == "leader"
    assert roles["n3"].role == "bridge"
    assert roles["n3"].delta_rank == 2.0
    assert roles["n2"].role == "stable"
    assert roles["n0"].role == "stable"
    assert roles["n0"].delta_rank == -3.0


def test_classify_roles_constant():
    st = _table([[3, 3, 3], [2, 2, 2], [1, 1, 1]], grid=(0.0, 0.05, 0.1))
    rt = rank_within_groups(st, Partition.from_groups([["n0", "n1", "n2"]]))
    assert [r.role for r in classify_roles(rt)] == ["leader", "stable", "stable"]


def test_classify_roles_threshold():
    st = _table([[2, 2], [1, 1.5], [3, 1]])
    rt = rank_within_groups(st, Partition.from_groups([["n0", "n1", "n2"]]))
    assert classify_roles(rt, threshold=1.0)[1].role == "bridge"
    assert classify_roles(rt, threshold=5.0)[1].role == "stable"


def test_classify_roles_one_alpha():
    st = _table([[1.0]], grid=(0.0,))
    rt = rank_within_groups(st, Partition.from_groups([["n0"]]))
    with pytest.raises(ValueError, match="two alpha"):
        classify_roles(rt)


def test_role_label_validation():
    with pytest.raises(ValueError):
        RoleLabel(node=NodeRef(0, 0, "a"), role="king", delta_rank=0)


def test_rank_table_shape():
    st = _table([[1, 2]])
    with pytest.raises(ValueError, match="same shape"):
        RankTable(table=st, ranks=np.ones((2, 2)), partition=Partition.from_groups([["n0"]]))


def test_community_scores(sw_matrix):
    from hetnet_structure.io import load_builtin_partition

    truth = load_builtin_partition("southern_women_truth_bipartite")
    C = bonacich_exact(sw_matrix, CentralityParams(alpha=0.0))
    s = community_scores(C, truth)
    by_label = dict(zip(C.labels, s))
    # events attended inside the own group
    assert by_label["w1"] == 7
    assert by_label["w16"] == 1
    assert by_label["e8"] == 8

    one = Partition.from_groups([sw_matrix.labels])
    np.testing.assert_allclose(community_scores(C, one), C.scores)


def test_alpha_sweep_within(sw_matrix):
    from hetnet_structure.io import load_builtin_partition

    truth = load_builtin_partition("southern_women_truth_bipartite")
    st = alpha_sweep(sw_matrix, [0.0, 0.1], within=truth)
    assert st.scope == "community"
    assert alpha_sweep(sw_matrix, [0.0]).scope == "total"
    C = bonacich_exact(sw_matrix, CentralityParams(alpha=0.1))
    np.testing.assert_allclose(st.scores[:, 1], community_scores(C, truth))

    with pytest.raises(PartitionMismatchError):
        alpha_sweep(sw_matrix, [0.0], within=load_builtin_partition("southern_women_truth"))
