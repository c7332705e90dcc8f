"""Community detection by maximizing b-centrality modularity.

The generalized modularity of a partition compares the (rounded) b-centrality path
counts inside communities with those expected in a random multigraph that keeps
each node's total outgoing and incoming path counts:

.. math:: Q = \\sum_{ij} (R_{ij} - W^{out}_i W^{in}_j / W) \\delta(s_i, s_j)

It is maximized approximately by recursive spectral bisection: each community is
split by the sign of the leading eigenvector of its generalized modularity matrix
until no split increases ``Q``.
"""
from __future__ import annotations

import logging
import warnings
from collections import deque
from typing import Hashable, Iterable, Mapping, Sequence

import attr
import numpy as np
from cached_property import cached_property
from scipy import linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import types as tp
from .centrality import (
    CentralityMatrix,
    CentralityParams,
    Method,
    SpectralInfo,
    compute_centrality,
)
from .config import DEFAULT_SETTINGS, Settings
from .exceptions import (
    ConvergenceError,
    DegenerateNullModelError,
    PartitionMismatchError,
)
from .graph import NModeMatrix
from .utils import natural_key

logger = logging.getLogger(__name__)


@attr.s(frozen=True, kw_only=True)
class RoundedCentrality:
    """b-centrality path counts rounded to integers."""

    values: np.ndarray = attr.ib(
        converter=lambda x: np.asarray(x, dtype=np.int64),
        validator=[tp.vld_square(), tp.vld_nonnegative()],
        eq=tp.cmp_array,
    )
    labels: tuple[str, ...] = attr.ib(default=(), converter=tuple)

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.values.shape[0]


@attr.s(frozen=True, kw_only=True)
class NullModel:
    """Expected path counts of a random multigraph with fixed path marginals.

    Parameters
    ----------
    w
        Total number of paths, the sum of all rounded centralities.
    w_out
        Outgoing path count of every node (row sums).
    w_in
        Incoming path count of every node (column sums).
    """

    w: int = attr.ib(converter=int)
    w_out: np.ndarray = attr.ib(converter=np.asarray, eq=tp.cmp_array)
    w_in: np.ndarray = attr.ib(converter=np.asarray, eq=tp.cmp_array)

    @w.validator
    def _w_vld(self, att, val):
        if val <= 0:
            raise DegenerateNullModelError(
                "the rounded b-centrality matrix has no paths (W = 0); the graph is "
                "too sparse or alpha/beta too small"
            )

    @cached_property
    def expected(self) -> np.ndarray:
        """Expected path counts ``w_out[i] * w_in[j] / w``."""
        return np.outer(self.w_out, self.w_in) / self.w


def _canonical_assignment(labels: Sequence[str], assignment: Sequence[int]) -> np.ndarray:
    assignment = np.asarray(assignment)
    first = {}
    for label, c in sorted(zip(labels, assignment.tolist()), key=lambda t: natural_key(t[0])):
        first.setdefault(c, len(first))
    return np.array([first[c] for c in assignment.tolist()], dtype=int)


@attr.s(frozen=True, kw_only=True)
class Partition:
    """An assignment of nodes to communities.

    Parameters
    ----------
    labels
        Node labels, in the order of ``assignment``.
    assignment
        Community index of each node. Indices are dense (``0..k-1``).
    q
        The modularity achieved by this partition, if known.
    """

    labels: tuple[str, ...] = attr.ib(converter=lambda x: tuple(str(v) for v in x))
    assignment: np.ndarray = attr.ib(
        converter=lambda x: np.asarray(x, dtype=int), eq=tp.cmp_array
    )
    q: float | None = attr.ib(default=None)

    @labels.validator
    def _labels_vld(self, att, val):
        if len(set(val)) != len(val):
            raise ValueError("partition labels must be unique")

    @assignment.validator
    def _assignment_vld(self, att, val):
        if val.ndim != 1 or len(val) != len(self.labels):
            raise ValueError(
                f"assignment must hold one community per label ({len(self.labels)})"
            )
        if len(val) and set(np.unique(val).tolist()) != set(range(val.max() + 1)):
            raise ValueError("community indices must be dense (0..k-1)")

    @classmethod
    def from_groups(
        cls, groups: Iterable[Iterable[str]], q: float | None = None
    ) -> Partition:
        """Build a canonical partition from lists of member labels.

        Examples
        --------
        >>> Partition.from_groups([["b", "c"], ["a"]]).as_dict()
        {'a': 0, 'b': 1, 'c': 1}
        """
        labels, assignment = [], []
        for c, group in enumerate(groups):
            for label in group:
                labels.append(label)
                assignment.append(c)
        if len(set(labels)) != len(labels):
            raise ValueError("a node appears in more than one group")
        order = sorted(range(len(labels)), key=lambda i: natural_key(str(labels[i])))
        labels = [str(labels[i]) for i in order]
        assignment = [assignment[i] for i in order]
        return cls(labels=labels, assignment=_canonical_assignment(labels, assignment), q=q)

    @classmethod
    def from_mapping(
        cls, mapping: Mapping[str, Hashable], q: float | None = None
    ) -> Partition:
        """Build a canonical partition from a ``{label: community name}`` mapping."""
        groups: dict[Hashable, list[str]] = {}
        for label, key in mapping.items():
            groups.setdefault(key, []).append(label)
        return cls.from_groups(groups.values(), q=q)

    @property
    def n_nodes(self) -> int:
        """Number of nodes."""
        return len(self.labels)

    @property
    def n_communities(self) -> int:
        """Number of communities."""
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def canonical(self) -> Partition:
        """Renumber communities by their smallest member label."""
        return attr.evolve(
            self, assignment=_canonical_assignment(self.labels, self.assignment)
        )

    def groups(self) -> list[tuple[str, ...]]:
        """Member labels of every community, naturally sorted."""
        out = [[] for _ in range(self.n_communities)]
        for label, c in zip(self.labels, self.assignment.tolist()):
            out[c].append(label)
        return [tuple(sorted(g, key=natural_key)) for g in out]

    def as_dict(self) -> dict[str, int]:
        """The ``{label: community}`` mapping."""
        return dict(zip(self.labels, self.assignment.tolist()))

    def community_of(self, label: str) -> int:
        """Community index of a node."""
        try:
            return int(self.assignment[self.labels.index(label)])
        except ValueError:
            raise PartitionMismatchError(f"node '{label}' is not in the partition") from None

    def align(self, labels: Sequence[str]) -> Partition:
        """The same partition with nodes reordered to follow ``labels``.

        Raises
        ------
        PartitionMismatchError
            If ``labels`` is not a permutation of this partition's labels.
        """
        labels = tuple(labels)
        if set(labels) != set(self.labels) or len(labels) != len(self.labels):
            missing = sorted(set(labels) ^ set(self.labels), key=natural_key)
            raise PartitionMismatchError(
                f"partitions cover different nodes; mismatched labels: {missing[:10]}"
            )
        lookup = self.as_dict()
        return attr.evolve(
            self, labels=labels, assignment=[lookup[label] for label in labels]
        )

    def restrict(self, labels: Iterable[str]) -> Partition:
        """The partition induced on a subset of nodes, renumbered canonically.

        ``q`` is dropped since it does not apply to the subset.
        """
        lookup = self.as_dict()
        keep = [label for label in labels if label in lookup]
        unknown = [label for label in labels if label not in lookup]
        if unknown:
            raise PartitionMismatchError(f"nodes {unknown[:10]} are not in the partition")
        return Partition.from_mapping({label: lookup[label] for label in keep})


@attr.s(frozen=True, kw_only=True)
class Split:
    """A bisection accepted while detecting communities."""

    size: int = attr.ib(converter=int)
    eigenvalue: float = attr.ib(converter=float)
    delta_q: float = attr.ib(converter=float)
    sizes: tuple[int, int] = attr.ib(converter=tuple)


@attr.s(frozen=True, kw_only=True)
class CommunityResult:
    """Outcome of :func:`detect_communities`.

    Parameters
    ----------
    partition
        The communities found; ``partition.q`` holds the raw modularity.
    splits
        Every accepted bisection, in the order it was made.
    alpha, beta
        The attenuation factors used.
    w
        The total path count of the null model, used to normalize ``Q``.
    """

    partition: Partition = attr.ib(validator=attr.validators.instance_of(Partition))
    splits: tuple[Split, ...] = attr.ib(converter=tuple)
    alpha: float = attr.ib(converter=float)
    beta: float = attr.ib(default=1.0, converter=float)
    w: int = attr.ib(default=1, converter=int)

    @splits.validator
    def _splits_vld(self, att, val):
        for split in val:
            if split.delta_q <= 0:
                raise ValueError("every accepted split must increase the modularity")

    @property
    def q(self) -> float:
        """Raw modularity of the partition."""
        return self.partition.q

    @property
    def q_normalized(self) -> float:
        """Modularity divided by the total path count ``W``."""
        return self.partition.q / self.w


def round_centrality(C: CentralityMatrix) -> RoundedCentrality:
    """Round path counts to the nearest integer, ties away from zero.

    Examples
    --------
    >>> from hetnet_structure.centrality import CentralityParams
    >>> C = CentralityMatrix(values=[[0.49, 0.5], [1.5, 2.0]], params=CentralityParams())
    >>> round_centrality(C).values.tolist()
    [[0, 1], [2, 2]]
    """
    v = C.values
    return RoundedCentrality(
        values=np.sign(v) * np.floor(np.abs(v) + 0.5), labels=C.labels
    )


def build_null_model(R: RoundedCentrality) -> NullModel:
    """The random-multigraph null model of a rounded centrality matrix.

    Raises
    ------
    DegenerateNullModelError
        If ``R`` sums to zero.
    """
    nm = NullModel(w=R.values.sum(), w_out=R.values.sum(axis=1), w_in=R.values.sum(axis=0))
    logger.debug("null model with W=%d paths", nm.w)
    return nm


def _assignment_for(R: RoundedCentrality, p: Partition) -> np.ndarray:
    if R.labels:
        p = p.align(R.labels)
    elif p.n_nodes != R.n:
        raise PartitionMismatchError(
            f"partition has {p.n_nodes} nodes but the matrix has {R.n}"
        )
    return p.assignment


def modularity(
    R: RoundedCentrality, nm: NullModel, p: Partition, normalized: bool = False
) -> float:
    """Generalized modularity of a partition.

    Returns the raw sum ``sum_ij (R_ij - expected_ij) delta(s_i, s_j)``, or that
    sum divided by ``W`` if ``normalized``.
    """
    s = _assignment_for(R, p)
    same = s[:, None] == s[None, :]
    q = float(np.sum((R.values - nm.expected)[same]))
    return q / nm.w if normalized else q


def modularity_matrix(R: RoundedCentrality, nm: NullModel) -> np.ndarray:
    """The symmetrized modularity matrix ``(B + B^T) / 2`` with ``B = R - expected``."""
    B = R.values - nm.expected
    return (B + B.T) / 2


def _orient(vector: np.ndarray, zero_tol: float) -> np.ndarray:
    significant = np.flatnonzero(np.abs(vector) > zero_tol)
    if significant.size and vector[significant[0]] < 0:
        return -vector
    return vector


def leading_eigenpair(
    B: np.ndarray, settings: Settings | None = None
) -> tuple[float, np.ndarray]:
    """The algebraically largest eigenvalue of a symmetric matrix and its eigenvector.

    Matrices up to ``settings.dense_eigen_limit`` rows use a dense symmetric solver;
    larger ones use Lanczos iteration started from ``1 + 1e-6 * i``. The eigenvector
    is oriented so that its first non-negligible entry is positive.

    Raises
    ------
    ConvergenceError
        If the Lanczos iteration does not converge.
    """
    settings = settings or DEFAULT_SETTINGS
    n = B.shape[0]
    if n == 1:
        return float(B[0, 0]), np.ones(1)

    if n <= settings.dense_eigen_limit or n < 3:
        values, vectors = linalg.eigh(B, subset_by_index=[n - 1, n - 1])
    else:
        start = np.ones(n) + 1e-6 * np.arange(n)
        try:
            values, vectors = eigsh(
                B,
                k=1,
                which="LA",
                v0=start,
                tol=settings.eigen_tol,
                maxiter=settings.max_iter,
            )
        except ArpackNoConvergence as e:
            raise ConvergenceError(
                f"Lanczos iteration on a {n}x{n} modularity matrix did not converge",
                residual=np.nan,
                iterations=settings.max_iter,
            ) from e

    return float(values[0]), _orient(vectors[:, 0], settings.zero_tol)


def spectral_bisect(
    B_sub: np.ndarray, settings: Settings | None = None
) -> tuple[np.ndarray, float]:
    """Split nodes by the sign of the leading eigenvector of a modularity matrix.

    Returns
    -------
    signs
        ``+1``/``-1`` per node. Entries with ``|v_i| <= zero_tol`` join the
        positive group. If the matrix is indivisible (leading eigenvalue at most
        ``indivisible_tol``) every sign is ``+1``.
    eigenvalue
        The leading eigenvalue.
    """
    settings = settings or DEFAULT_SETTINGS
    B_sub = np.asarray(B_sub, dtype=float)
    if not tp.is_square(B_sub) or not np.allclose(B_sub, B_sub.T):
        raise ValueError("spectral bisection needs a symmetric square matrix")

    value, vector = leading_eigenpair(B_sub, settings)
    if value <= settings.indivisible_tol:
        return np.ones(len(B_sub), dtype=int), value
    return np.where(vector < -settings.zero_tol, -1, 1), value


def bisect_recursively(
    B: np.ndarray, w: int, settings: Settings | None = None
) -> tuple[list[np.ndarray], list[Split]]:
    """Repeatedly bisect communities until no split increases the modularity.

    Each community ``g`` is split using its generalized modularity matrix
    ``B[g, g] - diag(sum_{k in g} B[i, k])``, whose quadratic form gives twice the
    modularity gain of the split.

    Returns
    -------
    communities
        Node index arrays of the final communities.
    splits
        The accepted bisections.
    """
    settings = settings or DEFAULT_SETTINGS
    queue = deque([np.arange(B.shape[0])])
    done, splits = [], []
    while queue:
        group = queue.popleft()
        if group.size < 2:
            done.append(group)
            continue

        Bg = B[np.ix_(group, group)]
        Bg = Bg - np.diag(Bg.sum(axis=1))
        signs, value = spectral_bisect(Bg, settings)
        gain = 0.5 * float(signs @ Bg @ signs)
        pos, neg = group[signs > 0], group[signs < 0]
        if value <= settings.indivisible_tol or not neg.size or gain <= settings.split_tol * w:
            done.append(group)
            continue

        logger.debug(
            "split %d nodes into %d + %d (eigenvalue %.6g, dQ %.6g)",
            group.size, pos.size, neg.size, value, gain,
        )
        splits.append(
            Split(size=group.size, eigenvalue=value, delta_q=gain, sizes=(pos.size, neg.size))
        )
        queue.extend([pos, neg])

    return done, splits


def detect_communities(
    A: NModeMatrix,
    alpha: float,
    beta: float = 1.0,
    method: Method = "exact",
    terms: int | None = None,
    settings: Settings | None = None,
    spectral: SpectralInfo | None = None,
) -> CommunityResult:
    """Find communities maximizing the b-centrality modularity at one alpha.

    The pipeline computes b-centrality, rounds it, builds the null model and its
    symmetrized modularity matrix, then bisects recursively.

    Parameters
    ----------
    A
        The N-mode adjacency matrix.
    alpha, beta
        Attenuation factors; alpha must be admissible for the exact and adaptive
        methods.
    method, terms
        How to compute the centrality (see :func:`~.centrality.compute_centrality`).
    settings
        Numerical settings.
    spectral
        Precomputed spectral radius of ``A``.
    """
    settings = settings or DEFAULT_SETTINGS
    p = CentralityParams(alpha=alpha, beta=beta)
    C = compute_centrality(A, p, method=method, terms=terms, settings=settings, spectral=spectral)
    R = round_centrality(C)
    if np.count_nonzero(R.values) < A.entries.nnz:
        warnings.warn(
            f"rounding the b-centrality at alpha={alpha}, beta={beta} dropped some "
            "direct links; communities may fragment"
        )
    nm = build_null_model(R)
    B = modularity_matrix(R, nm)

    groups, splits = bisect_recursively(B, nm.w, settings)
    labels = A.labels
    partition = Partition.from_groups([[labels[i] for i in g] for g in groups])
    partition = attr.evolve(partition.align(labels), q=modularity(R, nm, partition))

    logger.info(
        "alpha=%g: %d communities, Q=%.6g (normalized %.6g)",
        alpha, partition.n_communities, partition.q, partition.q / nm.w,
    )
    return CommunityResult(
        partition=partition, splits=splits, alpha=alpha, beta=beta, w=nm.w
    )
