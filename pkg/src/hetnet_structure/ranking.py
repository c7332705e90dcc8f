"""Rank nodes within their communities over a sweep of attenuation factors.

As alpha grows, b-centrality counts longer paths. Nodes whose rank within their
community improves along the sweep reach other communities through long paths and
act as *bridges*; nodes ranked first at the largest alpha are community *leaders*.

A node's score is either its full b-centrality row sum or, to rank members by
their standing inside their own community, the sum over that community only.
"""
from __future__ import annotations

import logging
from typing import Literal, Sequence

import attr
import numpy as np

from . import types as tp
from .centrality import (
    CentralityMatrix,
    CentralityParams,
    Method,
    check_alpha,
    compute_centrality,
    spectral_radius,
)
from .community import Partition
from .config import DEFAULT_SETTINGS, Settings
from .exceptions import DivergenceError
from .graph import NModeMatrix, NodeRef

logger = logging.getLogger(__name__)

Role = Literal["leader", "bridge", "stable"]
Scope = Literal["total", "community"]
SCOPES = ("total", "community")


def _grid_tuple(val) -> tuple[float, ...]:
    return tuple(float(a) for a in np.atleast_1d(val))


@attr.s(frozen=True, kw_only=True)
class ScoreTable:
    """b-centrality scores of every node at every alpha of a grid.

    Parameters
    ----------
    grid
        Strictly increasing alpha values.
    scores
        Array of shape ``(n_nodes, len(grid))``.
    beta
        The direct-link weight used throughout.
    nodes
        The nodes, in row order.
    scope
        ``"total"`` if a score sums the centrality to every node, ``"community"``
        if it only sums over the node's own community.
    """

    grid: tuple[float, ...] = attr.ib(converter=_grid_tuple)
    scores: np.ndarray = attr.ib(
        converter=lambda x: np.asarray(x, dtype=float), eq=tp.cmp_array
    )
    beta: float = attr.ib(default=1.0, converter=float)
    nodes: tuple[NodeRef, ...] = attr.ib(converter=tuple)
    scope: Scope = attr.ib(default="total", validator=attr.validators.in_(SCOPES))

    @grid.validator
    def _grid_vld(self, att, val):
        if not val:
            raise ValueError("the alpha grid must not be empty")
        if np.any(np.diff(val) <= 0):
            raise ValueError(f"the alpha grid must be strictly increasing. Got {val}")

    @scores.validator
    def _scores_vld(self, att, val):
        if val.shape != (len(self.nodes), len(self.grid)):
            raise ValueError(
                f"scores must have shape {(len(self.nodes), len(self.grid))}. "
                f"Got {val.shape}"
            )

    @property
    def labels(self) -> tuple[str, ...]:
        """Node labels in row order."""
        return tuple(node.label for node in self.nodes)


@attr.s(frozen=True, kw_only=True)
class RankTable:
    """Fractional ranks of nodes within their groups at every alpha.

    Parameters
    ----------
    table
        The scores that were ranked.
    ranks
        Array of the same shape as ``table.scores``; 1 is the highest score in a
        group and tied scores share the average of their positions.
    partition
        The communities, aligned with ``table.nodes``.
    by_layer
        Whether nodes were ranked only against nodes of their own layer within
        their community.
    """

    table: ScoreTable = attr.ib(validator=attr.validators.instance_of(ScoreTable))
    ranks: np.ndarray = attr.ib(
        converter=lambda x: np.asarray(x, dtype=float), eq=tp.cmp_array
    )
    partition: Partition = attr.ib(validator=attr.validators.instance_of(Partition))
    by_layer: bool = attr.ib(default=True, converter=bool)

    @ranks.validator
    def _ranks_vld(self, att, val):
        if val.shape != self.table.scores.shape:
            raise ValueError("ranks must have the same shape as the scores")

    @property
    def grid(self) -> tuple[float, ...]:
        """The alpha grid."""
        return self.table.grid

    @property
    def labels(self) -> tuple[str, ...]:
        """Node labels in row order."""
        return self.table.labels

    def _row(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no node '{label}' in the rank table") from None

    def trajectory(self, label: str) -> np.ndarray:
        """Ranks of a node along the grid."""
        return self.ranks[self._row(label)]

    def rank(self, label: str, alpha: float) -> float:
        """Rank of a node at one grid value."""
        col = np.flatnonzero(np.isclose(self.grid, alpha, rtol=0, atol=1e-12))
        if not col.size:
            raise KeyError(f"alpha={alpha} is not on the grid {self.grid}")
        return float(self.ranks[self._row(label), col[0]])


@attr.s(frozen=True, kw_only=True)
class RoleLabel:
    """The role of a node as read off its rank trajectory."""

    node: NodeRef = attr.ib(validator=attr.validators.instance_of(NodeRef))
    role: Role = attr.ib(validator=attr.validators.in_(("leader", "bridge", "stable")))
    delta_rank: float = attr.ib(converter=float)
    community: int = attr.ib(default=0, converter=int)


def community_scores(C: CentralityMatrix, p: Partition) -> np.ndarray:
    """Row sums of a centrality matrix over each node's own community.

    ``s_i = sum_{j in community(i)} C_ij``. At ``alpha = 0`` this counts the
    direct links a node has inside its community.
    """
    assignment = p.align(C.labels).assignment
    same = assignment[:, None] == assignment[None, :]
    return np.where(same, C.values, 0.0).sum(axis=1)


def alpha_sweep(
    A: NModeMatrix,
    grid: Sequence[float],
    beta: float = 1.0,
    method: Method = "exact",
    terms: int | None = None,
    settings: Settings | None = None,
    within: Partition | None = None,
) -> ScoreTable:
    """Node scores at every alpha of a grid.

    All grid values are checked for admissibility before any centrality is
    computed.

    Parameters
    ----------
    within
        If given, a node's score only counts paths ending inside its own community
        of this partition (see :func:`community_scores`). Otherwise it is the
        full row sum of the centrality matrix.

    Raises
    ------
    DivergenceError
        Naming the first grid value at or beyond ``1 / lambda_max``.
    PartitionMismatchError
        If ``within`` does not cover the nodes of ``A``.
    """
    settings = settings or DEFAULT_SETTINGS
    grid = _grid_tuple(grid)
    if within is not None:
        within = within.align(A.labels)
    spectral = spectral_radius(A, settings)
    if method != "series":
        for alpha in grid:
            try:
                check_alpha(alpha, spectral.lambda_max, settings)
            except DivergenceError as e:
                raise DivergenceError(
                    alpha, e.bound, f"grid value {e}"
                ) from None

    columns = []
    for alpha in grid:
        C = compute_centrality(
            A,
            CentralityParams(alpha=alpha, beta=beta),
            method=method,
            terms=terms,
            settings=settings,
            spectral=spectral,
        )
        columns.append(C.scores if within is None else community_scores(C, within))
    logger.info("computed scores for %d nodes at %d alphas", A.dimension, len(grid))

    return ScoreTable(
        grid=grid,
        scores=np.column_stack(columns),
        beta=beta,
        nodes=A.nodes,
        scope="total" if within is None else "community",
    )


def fractional_ranks(scores: np.ndarray, tie_tol: float = 1e-9) -> np.ndarray:
    """Descending ranks (1 = highest) with ties averaged.

    Neighbouring sorted scores within ``tie_tol * max(1, |score|)`` of each other
    are tied.

    Examples
    --------
    >>> fractional_ranks(np.array([3.0, 5.0, 3.0, 1.0])).tolist()
    [2.5, 1.0, 2.5, 4.0]
    """
    scores = np.asarray(scores, dtype=float)
    n = scores.size
    order = np.argsort(-scores, kind="stable")
    ordered = scores[order]
    ranks = np.empty(n)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and abs(ordered[stop - 1] - ordered[stop]) <= tie_tol * max(
            1.0, abs(ordered[stop - 1])
        ):
            stop += 1
        ranks[order[start:stop]] = (start + 1 + stop) / 2
        start = stop
    return ranks


def rank_within_groups(
    st: ScoreTable,
    p: Partition,
    by_layer: bool = True,
    settings: Settings | None = None,
) -> RankTable:
    """Rank nodes against the other members of their community at every alpha.

    With ``by_layer`` (the default) a community is further split by layer, so that
    e.g. women are ranked among women and events among events. Ranks then sum to
    ``k (k + 1) / 2`` over each (community, layer) group of ``k`` nodes, not over a
    whole mixed-layer community. Pass ``by_layer=False`` for per-community sums.
    """
    settings = settings or DEFAULT_SETTINGS
    p = p.align(st.labels)
    layers = np.array([node.layer for node in st.nodes], dtype=int)
    keys = np.column_stack([p.assignment, layers if by_layer else np.zeros_like(layers)])

    ranks = np.empty_like(st.scores)
    for key in np.unique(keys, axis=0):
        rows = np.flatnonzero(np.all(keys == key, axis=1))
        for col in range(len(st.grid)):
            ranks[rows, col] = fractional_ranks(st.scores[rows, col], settings.tie_tol)

    return RankTable(table=st, ranks=ranks, partition=p, by_layer=by_layer)


def classify_roles(
    rt: RankTable, threshold: float | None = None, settings: Settings | None = None
) -> list[RoleLabel]:
    """Label every node a leader, a bridge or stable.

    A leader holds rank 1 at the largest alpha. A bridge improves its rank by at
    least ``threshold`` (default ``settings.bridge_threshold``) between the
    smallest and largest alpha without being a leader.
    """
    settings = settings or DEFAULT_SETTINGS
    threshold = settings.bridge_threshold if threshold is None else threshold
    if len(rt.grid) < 2:
        raise ValueError("classifying roles needs at least two alpha values")

    out = []
    for node, row, community in zip(rt.table.nodes, rt.ranks, rt.partition.assignment):
        delta = row[0] - row[-1]
        if row[-1] == 1.0:
            role = "leader"
        elif delta >= threshold:
            role = "bridge"
        else:
            role = "stable"
        out.append(RoleLabel(node=node, role=role, delta_rank=delta, community=community))
    return out
