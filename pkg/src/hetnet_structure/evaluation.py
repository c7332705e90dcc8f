"""Score partitions against each other with normalized mutual information."""
from __future__ import annotations

import attr
import numpy as np
from scipy.stats import entropy

from . import types as tp
from .community import Partition


@attr.s(frozen=True, kw_only=True)
class ConfusionCounts:
    """Contingency table of two partitions.

    ``counts[x, y]`` is the number of nodes in community ``x`` of the first
    partition and community ``y`` of the second.
    """

    counts: np.ndarray = attr.ib(
        converter=lambda x: np.asarray(x, dtype=np.int64),
        validator=tp.vld_nonnegative(),
        eq=tp.cmp_array,
    )

    @counts.validator
    def _counts_vld(self, att, val):
        if val.ndim != 2:
            raise ValueError("counts must be a 2D table")

    @property
    def n(self) -> int:
        """Total number of nodes."""
        return int(self.counts.sum())

    @property
    def joint(self) -> np.ndarray:
        """Joint distribution ``P(x, y) = N_xy / n``."""
        return self.counts / self.n


def confusion(X: Partition, Y: Partition) -> ConfusionCounts:
    """Contingency table of two partitions of the same nodes.

    Raises
    ------
    PartitionMismatchError
        If the partitions cover different nodes.
    """
    Y = Y.align(X.labels)
    counts = np.zeros((X.n_communities, Y.n_communities), dtype=np.int64)
    np.add.at(counts, (X.assignment, Y.assignment), 1)
    return ConfusionCounts(counts=counts)


def partition_entropy(p: Partition) -> float:
    """Shannon entropy (natural log) of the community size distribution."""
    return float(entropy(np.bincount(p.assignment))) if p.n_nodes else 0.0


def mutual_information(table: ConfusionCounts) -> float:
    """Mutual information (natural log) of a contingency table; ``0 log 0 = 0``."""
    if table.n == 0:
        return 0.0
    pxy = table.joint
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    nz = pxy > 0
    return float(np.sum(pxy[nz] * np.log(pxy[nz] / (px @ py)[nz])))


def nmi(X: Partition, Y: Partition) -> float:
    """Normalized mutual information ``2 I(X, Y) / (H(X) + H(Y))``.

    Equals 1 for identical partitions (up to community renumbering) and 0 for
    independent ones. If both partitions are a single community the entropies
    vanish; the result is then 1 if the partitions are identical and 0 otherwise.

    Examples
    --------
    >>> a = Partition.from_groups([["a", "b"], ["c", "d"]])
    >>> b = Partition.from_groups([["c", "d"], ["a", "b"]])
    >>> nmi(a, b)
    1.0
    """
    table = confusion(X, Y)
    if np.array_equal(
        X.canonical().assignment, Y.align(X.labels).canonical().assignment
    ):
        return 1.0
    h = partition_entropy(X) + partition_entropy(Y)
    if h == 0:
        return 0.0
    return float(np.clip(2 * mutual_information(table) / h, 0.0, 1.0))
