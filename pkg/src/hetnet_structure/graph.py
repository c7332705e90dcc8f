"""Layered graphs and their N-mode adjacency matrices.

A heterogeneous network is represented as a layered graph: every entity type
(women, events, teams, conferences, ...) forms a layer, and edges may link nodes
within a layer or across layers. :func:`build_nmode` materializes such a graph
into a single square adjacency matrix whose rows and columns are ordered layer by
layer, so that block ``(k, l)`` holds the relations from layer ``k`` to layer
``l``.
"""
from __future__ import annotations

import logging
from typing import Iterable, Mapping, Sequence, Tuple, Union

import attr
import numpy as np
from cached_property import cached_property
from scipy import sparse

from . import types as tp
from .exceptions import (
    DataError,
    DuplicateEdgeError,
    EmptyLayerError,
    InvalidWeightError,
)

logger = logging.getLogger(__name__)

LayerKey = Union[int, str]
EdgeRecord = Union[Tuple[str, str], Tuple[str, str, float]]


def _label_tuple(val: Iterable) -> tuple[str, ...]:
    return tuple(str(v) for v in val)


def _check_offsets(layers: Sequence[Layer]):
    offset = 0
    for layer in layers:
        if layer.offset != offset:
            raise ValueError(
                f"layer '{layer.name}' has offset {layer.offset}, expected {offset}"
            )
        offset += layer.size


@attr.s(frozen=True, kw_only=True)
class Layer:
    """The nodes of one entity type.

    Parameters
    ----------
    name
        Unique name of the layer, e.g. ``"women"``.
    labels
        Node labels in insertion order. Their position is the node's local index.
    offset
        Index of the layer's first node in the N-mode matrix.
    """

    name: str = attr.ib(converter=str)
    labels: tuple[str, ...] = attr.ib(converter=_label_tuple)
    offset: int = attr.ib(default=0, converter=int, validator=attr.validators.ge(0))

    @name.validator
    def _name_vld(self, att, val):
        if not val:
            raise ValueError("layer name must not be empty")

    @labels.validator
    def _labels_vld(self, att, val):
        if not val:
            raise EmptyLayerError(f"layer '{self.name}' must hold at least one node")
        if len(set(val)) != len(val):
            raise ValueError(f"node labels in layer '{self.name}' must be unique")

    @property
    def size(self) -> int:
        """Number of nodes in the layer."""
        return len(self.labels)

    @property
    def stop(self) -> int:
        """One past the index of the layer's last node in the N-mode matrix."""
        return self.offset + self.size


def stack_layers(layers: Sequence[tuple[str, Sequence[str]]]) -> tuple[Layer, ...]:
    """Create layers with cumulative offsets from ``(name, labels)`` pairs."""
    out = []
    offset = 0
    for name, labels in layers:
        layer = Layer(name=name, labels=labels, offset=offset)
        out.append(layer)
        offset += layer.size
    return tuple(out)


@attr.s(frozen=True)
class NodeRef:
    """A node, identified by its layer and its index within that layer."""

    layer: int = attr.ib(converter=int)
    local_index: int = attr.ib(converter=int)
    label: str = attr.ib(converter=str)


@attr.s(frozen=True)
class Edge:
    """A weighted relation between two nodes."""

    source: NodeRef = attr.ib(validator=attr.validators.instance_of(NodeRef))
    target: NodeRef = attr.ib(validator=attr.validators.instance_of(NodeRef))
    weight: float = attr.ib(default=1.0, converter=float)

    @weight.validator
    def _weight_vld(self, att, val):
        if not np.isfinite(val) or val < 0:
            raise InvalidWeightError(
                f"edge ({self.source.label}, {self.target.label}) has invalid "
                f"weight {val}; weights must be finite and non-negative"
            )


def _resolve_layer(layers: Sequence[Layer], key: LayerKey) -> int:
    if isinstance(key, (int, np.integer)):
        if 0 <= key < len(layers):
            return int(key)
    else:
        for i, layer in enumerate(layers):
            if layer.name == key:
                return i
    raise DataError(
        f"no such layer {key!r} (layers: {[layer.name for layer in layers]})"
    )


@attr.s(frozen=True, kw_only=True)
class LayeredGraph:
    """A heterogeneous network: typed nodes partitioned into layers, plus edges.

    Node labels are unique across the whole graph, so that files and outputs can
    refer to nodes by label alone. Nodes are ordered layer by layer, and within a
    layer in insertion order.

    Parameters
    ----------
    layers
        The layers, with cumulative offsets (see :func:`stack_layers`).
    edges
        The edges. For undirected graphs each relation is listed once.
    directed
        Whether edges are ordered pairs.
    """

    layers: tuple[Layer, ...] = attr.ib(converter=tuple)
    edges: tuple[Edge, ...] = attr.ib(factory=tuple, converter=tuple)
    directed: bool = attr.ib(default=False, converter=bool)

    @layers.validator
    def _layers_vld(self, att, val):
        if not val:
            raise ValueError("a graph needs at least one layer")
        names = [layer.name for layer in val]
        if len(set(names)) != len(names):
            raise ValueError(f"layer names must be unique. Got {names}")
        _check_offsets(val)
        labels = [label for layer in val for label in layer.labels]
        if len(set(labels)) != len(labels):
            raise ValueError("node labels must be unique across layers")

    @edges.validator
    def _edges_vld(self, att, val):
        for edge in val:
            for ref in (edge.source, edge.target):
                if not 0 <= ref.layer < len(self.layers):
                    raise DataError(f"node '{ref.label}' references layer {ref.layer}")
                layer = self.layers[ref.layer]
                if (
                    not 0 <= ref.local_index < layer.size
                    or layer.labels[ref.local_index] != ref.label
                ):
                    raise DataError(
                        f"node '{ref.label}' does not exist in layer '{layer.name}'"
                    )

    @classmethod
    def from_labels(
        cls,
        layers: Mapping[str, Sequence[str]] | Sequence[tuple[str, Sequence[str]]],
        edges: Iterable[EdgeRecord] = (),
        directed: bool = False,
    ) -> LayeredGraph:
        """Build a graph from layer label lists and ``(source, target[, weight])``.

        Examples
        --------
        >>> g = LayeredGraph.from_labels(
        ...     {"people": ["a", "b"], "events": ["e"]}, [("a", "e"), ("b", "e", 2)]
        ... )
        >>> g.n_nodes
        3
        """
        if isinstance(layers, Mapping):
            layers = list(layers.items())
        stacked = stack_layers(layers)
        refs = {}
        for k, layer in enumerate(stacked):
            for i, label in enumerate(layer.labels):
                refs[label] = NodeRef(k, i, label)

        out = []
        for record in edges:
            src, dst, *rest = record
            for label in (src, dst):
                if str(label) not in refs:
                    raise DataError(f"edge refers to unknown node label '{label}'")
            weight = rest[0] if rest else 1.0
            out.append(Edge(refs[str(src)], refs[str(dst)], weight))

        return cls(layers=stacked, edges=out, directed=directed)

    @property
    def n_nodes(self) -> int:
        """Total number of nodes over all layers."""
        return sum(layer.size for layer in self.layers)

    @cached_property
    def nodes(self) -> tuple[NodeRef, ...]:
        """All nodes in N-mode matrix order."""
        return tuple(
            NodeRef(k, i, label)
            for k, layer in enumerate(self.layers)
            for i, label in enumerate(layer.labels)
        )

    @cached_property
    def labels(self) -> tuple[str, ...]:
        """All node labels in N-mode matrix order."""
        return tuple(node.label for node in self.nodes)

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, label: str) -> int:
        """Global (N-mode matrix) index of the node with the given label."""
        try:
            return self._label_index[label]
        except KeyError:
            raise DataError(f"unknown node label '{label}'") from None

    def node(self, label: str) -> NodeRef:
        """The :class:`NodeRef` with the given label."""
        return self.nodes[self.index(label)]

    def global_index(self, ref: NodeRef) -> int:
        """Global (N-mode matrix) index of a node."""
        return self.layers[ref.layer].offset + ref.local_index

    def layer_index(self, key: LayerKey) -> int:
        """Position of a layer given its name or index."""
        return _resolve_layer(self.layers, key)


def _to_csr(val) -> sparse.csr_matrix:
    out = sparse.csr_matrix(val, dtype=float)
    out.eliminate_zeros()
    out.sort_indices()
    return out


@attr.s(frozen=True, kw_only=True)
class NModeMatrix:
    """Square adjacency matrix over all nodes of a layered graph.

    Parameters
    ----------
    entries
        Sparse non-negative matrix. Entry ``(i, j)`` is the weight of the relation
        from global node ``i`` to global node ``j``.
    layers
        The layer list locating each block: block ``(k, l)`` occupies rows
        ``layers[k].offset:layers[k].stop`` and columns
        ``layers[l].offset:layers[l].stop``.
    """

    entries: sparse.csr_matrix = attr.ib(
        converter=_to_csr,
        validator=[tp.vld_square(), tp.vld_finite(), tp.vld_nonnegative()],
        eq=tp.cmp_sparse,
    )
    layers: tuple[Layer, ...] = attr.ib(converter=tuple)

    @layers.validator
    def _layers_vld(self, att, val):
        _check_offsets(val)
        total = sum(layer.size for layer in val)
        if total != self.entries.shape[0]:
            raise ValueError(
                f"layers hold {total} nodes but the matrix has dimension "
                f"{self.entries.shape[0]}"
            )

    @classmethod
    def from_dense(cls, values, layers: Sequence[Layer]) -> NModeMatrix:
        """Wrap a dense array."""
        return cls(entries=np.asarray(values, dtype=float), layers=layers)

    @property
    def dimension(self) -> int:
        """Total node count."""
        return self.entries.shape[0]

    @cached_property
    def nodes(self) -> tuple[NodeRef, ...]:
        """All nodes in matrix order."""
        return tuple(
            NodeRef(k, i, label)
            for k, layer in enumerate(self.layers)
            for i, label in enumerate(layer.labels)
        )

    @cached_property
    def labels(self) -> tuple[str, ...]:
        """Node labels in matrix order."""
        return tuple(node.label for node in self.nodes)

    @cached_property
    def layer_of(self) -> np.ndarray:
        """Layer index of every node."""
        return np.repeat(np.arange(len(self.layers)), [lyr.size for lyr in self.layers])

    @cached_property
    def dense(self) -> np.ndarray:
        """The matrix as a dense array."""
        return self.entries.toarray()

    def layer_index(self, key: LayerKey) -> int:
        """Position of a layer given its name or index."""
        return _resolve_layer(self.layers, key)

    def block(self, k: LayerKey, l: LayerKey) -> sparse.csr_matrix:
        """The sub-block of relations from layer ``k`` to layer ``l``."""
        src = self.layers[self.layer_index(k)]
        dst = self.layers[self.layer_index(l)]
        return self.entries[src.offset : src.stop, dst.offset : dst.stop]

    def is_symmetric(self, tol: float = 0.0) -> bool:
        """Whether the matrix equals its transpose (up to ``tol`` per entry)."""
        diff = (self.entries - self.entries.T).tocsr()
        diff.eliminate_zeros()
        return bool(np.all(np.abs(diff.data) <= tol))


def build_nmode(graph: LayeredGraph) -> NModeMatrix:
    """Materialize a layered graph into its N-mode adjacency matrix.

    Undirected edges are written to both ``(i, j)`` and ``(j, i)``, so undirected
    graphs yield symmetric matrices.

    Raises
    ------
    DuplicateEdgeError
        If two edges connect the same ordered pair (or, for undirected graphs, the
        same unordered pair). Weights are never silently summed.
    """
    n = graph.n_nodes
    seen = set()
    rows, cols, vals = [], [], []
    for edge in graph.edges:
        i = graph.global_index(edge.source)
        j = graph.global_index(edge.target)
        key = (i, j) if graph.directed else (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdgeError(
                f"duplicate edge between '{edge.source.label}' and "
                f"'{edge.target.label}'"
            )
        seen.add(key)

        rows.append(i)
        cols.append(j)
        vals.append(edge.weight)
        if not graph.directed and i != j:
            rows.append(j)
            cols.append(i)
            vals.append(edge.weight)

    entries = sparse.coo_matrix(
        (np.asarray(vals, dtype=float), (np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))),
        shape=(n, n),
    )
    logger.debug("built %dx%d N-mode matrix with %d edges", n, n, len(seen))
    return NModeMatrix(entries=entries, layers=graph.layers)


def _weight_tuple(val: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in val)


def _weight_dict(val: Mapping) -> dict[tuple[int, int], float]:
    return {(int(k), int(l)): float(w) for (k, l), w in dict(val).items()}


@attr.s(frozen=True, kw_only=True)
class LayerWeights:
    """Scalar weights per block of an N-mode matrix.

    Splitting ``A = D1 A1 + D2 A2`` into its intra-layer (diagonal-block) part
    ``A1`` and its inter-layer (off-diagonal-block) part ``A2``, the diagonal
    weight matrices hold one scalar per layer. Here that amounts to one weight per
    layer (``intra``) and one per ordered pair of distinct layers (``inter``).

    Parameters
    ----------
    intra
        Weight of the relations within each layer.
    inter
        Weight of the relations from layer ``k`` to layer ``l``, keyed by
        ``(k, l)`` with ``k != l``. Every ordered pair must be present; see
        :meth:`for_layers` to fill missing ones with 1.
    """

    intra: tuple[float, ...] = attr.ib(converter=_weight_tuple)
    inter: dict[tuple[int, int], float] = attr.ib(converter=_weight_dict)

    @intra.validator
    @inter.validator
    def _nonneg_vld(self, att, val):
        values = val.values() if isinstance(val, dict) else val
        for w in values:
            if not np.isfinite(w) or w < 0:
                raise InvalidWeightError(f"{att.name} weights must be non-negative. Got {w}")

    @inter.validator
    def _cover_vld(self, att, val):
        n = len(self.intra)
        expected = {(k, l) for k in range(n) for l in range(n) if k != l}
        if set(val) != expected:
            raise ValueError(
                f"inter weights must cover exactly the ordered layer pairs {sorted(expected)}"
            )

    @classmethod
    def for_layers(
        cls,
        n_layers: int,
        intra: Mapping[int, float] | None = None,
        inter: Mapping[tuple[int, int], float] | None = None,
    ) -> LayerWeights:
        """Weights for ``n_layers`` layers, defaulting every block to 1."""
        intra = dict(intra or {})
        inter = dict(inter or {})
        for key in list(intra) + [k for pair in inter for k in pair]:
            if not 0 <= key < n_layers:
                raise ValueError(f"layer {key} is out of range for {n_layers} layers")
        return cls(
            intra=[intra.get(k, 1.0) for k in range(n_layers)],
            inter={
                (k, l): inter.get((k, l), 1.0)
                for k in range(n_layers)
                for l in range(n_layers)
                if k != l
            },
        )

    @property
    def n_layers(self) -> int:
        """Number of layers covered."""
        return len(self.intra)

    def matrix(self) -> np.ndarray:
        """Weights as a ``(n_layers, n_layers)`` array, intra on the diagonal."""
        out = np.diag(np.array(self.intra, dtype=float))
        for (k, l), w in self.inter.items():
            out[k, l] = w
        return out


def apply_layer_weights(A: NModeMatrix, w: LayerWeights) -> NModeMatrix:
    """Scale every block of an N-mode matrix by its layer weight."""
    if w.n_layers != len(A.layers):
        raise ValueError(
            f"weights cover {w.n_layers} layers but the matrix has {len(A.layers)}"
        )
    coo = A.entries.tocoo()
    factors = w.matrix()[A.layer_of[coo.row], A.layer_of[coo.col]]
    scaled = sparse.coo_matrix((coo.data * factors, (coo.row, coo.col)), shape=coo.shape)
    return NModeMatrix(entries=scaled, layers=A.layers)


def _shared_neighbours(
    graph: LayeredGraph, target: LayerKey, via: LayerKey
) -> tuple[sparse.csr_matrix, Layer]:
    t = graph.layer_index(target)
    v = graph.layer_index(via)
    if t == v:
        raise ValueError("target and via layers must differ")

    A = build_nmode(graph)
    # count neighbours, not weights
    out_links = (A.block(t, v) > 0).astype(float)
    in_links = (A.block(v, t) > 0).astype(float)
    counts = (out_links @ in_links).tocsr()
    counts = (counts - sparse.diags(counts.diagonal())).tocsr()
    counts.eliminate_zeros()
    return counts, attr.evolve(graph.layers[t], offset=0)


def project_unipartite_weighted(
    graph: LayeredGraph, target: LayerKey, via: LayerKey
) -> NModeMatrix:
    """Project onto one layer, counting shared neighbours in another layer.

    Entry ``(i, j)`` is the number of ``via`` nodes that ``i`` links to and that
    link to ``j``; the diagonal is zero.
    """
    counts, layer = _shared_neighbours(graph, target, via)
    return NModeMatrix(entries=counts, layers=(layer,))


def project_unipartite_binary(
    graph: LayeredGraph, target: LayerKey, via: LayerKey
) -> NModeMatrix:
    """Project onto one layer, linking nodes that share any neighbour in ``via``."""
    counts, layer = _shared_neighbours(graph, target, via)
    return NModeMatrix(entries=(counts > 0).astype(float), layers=(layer,))


def graph_from_nmode(A: NModeMatrix, directed: bool = False) -> LayeredGraph:
    """Turn an N-mode matrix back into a layered graph.

    For undirected graphs the matrix must be symmetric and each relation becomes a
    single edge (its upper-triangular entry).
    """
    coo = A.entries.tocoo()
    rows, cols, data = coo.row, coo.col, coo.data
    if not directed:
        if not A.is_symmetric():
            raise ValueError("an undirected graph requires a symmetric matrix")
        keep = rows <= cols
        rows, cols, data = rows[keep], cols[keep], data[keep]

    order = np.lexsort((cols, rows))
    nodes = A.nodes
    edges = [Edge(nodes[rows[k]], nodes[cols[k]], data[k]) for k in order]
    return LayeredGraph(layers=A.layers, edges=edges, directed=directed)


def projection_graph(
    graph: LayeredGraph, target: LayerKey, via: LayerKey, weighted: bool = True
) -> LayeredGraph:
    """The one-layer graph whose N-mode matrix is the requested projection."""
    project = project_unipartite_weighted if weighted else project_unipartite_binary
    return graph_from_nmode(project(graph, target, via), directed=graph.directed)
