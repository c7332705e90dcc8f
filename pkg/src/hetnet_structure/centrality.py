"""Bonacich (b-)centrality of N-mode matrices.

The b-centrality matrix ``C(alpha, beta) = beta * A (I - alpha A)^-1`` counts the
attenuated paths between every pair of nodes: direct links are weighted by
``beta`` and each further step by ``alpha``. The series only converges for
``alpha < 1 / lambda_max`` where ``lambda_max`` is the spectral radius of ``A``.
"""
from __future__ import annotations

import logging
import warnings
from typing import Literal

import attr
import numpy as np
from cached_property import cached_property
from scipy import linalg

from . import types as tp
from .config import DEFAULT_SETTINGS, Settings
from .exceptions import ConvergenceError, DivergenceError, NumericalError
from .graph import NModeMatrix

logger = logging.getLogger(__name__)

Method = Literal["exact", "series", "adaptive"]
METHODS = ("exact", "series", "adaptive")


def _vld_finite_scalar(self, att, val):
    if not np.isfinite(val):
        raise ValueError(f"{att.name} must be finite. Got {val}")


@attr.s(frozen=True, kw_only=True)
class CentralityParams:
    """Attenuation factors of b-centrality.

    Parameters
    ----------
    alpha
        Weight of each indirect step. ``alpha = 0`` counts direct links only.
    beta
        Weight of direct links; a global prefactor.
    """

    alpha: float = attr.ib(
        default=0.0,
        converter=float,
        validator=[_vld_finite_scalar, attr.validators.ge(0)],
    )
    beta: float = attr.ib(
        default=1.0,
        converter=float,
        validator=[_vld_finite_scalar, attr.validators.gt(0)],
    )


@attr.s(frozen=True, kw_only=True)
class SpectralInfo:
    """The dominant eigenvalue of an adjacency matrix and how it was found."""

    lambda_max: float = attr.ib(converter=float, validator=attr.validators.ge(0))
    iterations: int = attr.ib(default=0, converter=int)
    residual: float = attr.ib(default=0.0, converter=float)

    @property
    def bound(self) -> float:
        """The convergence bound ``1 / lambda_max`` (infinite for a zero spectrum)."""
        return np.inf if self.lambda_max == 0 else 1.0 / self.lambda_max


@attr.s(frozen=True, kw_only=True)
class CentralityMatrix:
    """Pairwise b-centrality values.

    Parameters
    ----------
    values
        Dense ``n x n`` matrix; entry ``(i, j)`` is the attenuated path count from
        node ``i`` to node ``j``.
    params
        The attenuation factors used.
    labels
        Node labels in matrix order.
    method
        How the values were computed (``"exact"``, ``"series"`` or ``"adaptive"``).
    terms
        The number of series terms summed, if ``method`` is not exact.
    """

    values: np.ndarray = attr.ib(
        converter=lambda x: np.asarray(x, dtype=float),
        validator=tp.vld_square(),
        eq=tp.cmp_array,
    )
    params: CentralityParams = attr.ib(
        validator=attr.validators.instance_of(CentralityParams)
    )
    labels: tuple[str, ...] = attr.ib(default=(), converter=tuple)
    method: str = attr.ib(default="exact", validator=attr.validators.in_(METHODS))
    terms: int | None = attr.ib(default=None)

    @labels.validator
    def _labels_vld(self, att, val):
        if val and len(val) != self.values.shape[0]:
            raise ValueError(
                f"got {len(val)} labels for a matrix of dimension {self.values.shape[0]}"
            )

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.values.shape[0]

    @cached_property
    def scores(self) -> np.ndarray:
        """Per-node b-centrality scores (see :func:`node_scores`)."""
        return node_scores(self)


def spectral_radius(A: NModeMatrix, settings: Settings | None = None) -> SpectralInfo:
    """Compute the largest eigenvalue magnitude of an adjacency matrix.

    Symmetric matrices use power iteration on ``A + cI`` with ``c`` half the
    largest row sum, which keeps the Perron root dominant even for bipartite
    matrices whose spectrum is symmetric about zero. The start vector is
    ``1 + 1e-6 * i`` (normalized) so that runs are reproducible. Iteration stops
    once ``||A x - lambda x|| <= eigen_tol * max(1, lambda)``.

    Asymmetric matrices up to ``dense_eigen_limit`` nodes are solved densely,
    because power iteration can stall on defective spectra (e.g. a DAG).

    Raises
    ------
    ConvergenceError
        If the residual tolerance is not met within ``max_iter`` iterations.
    """
    settings = settings or DEFAULT_SETTINGS
    M = A.entries
    n = A.dimension
    if M.nnz == 0:
        return SpectralInfo(lambda_max=0.0)

    if not A.is_symmetric() and n <= settings.dense_eigen_limit:
        lam = float(np.max(np.abs(linalg.eigvals(A.dense))))
        logger.debug("dense spectral radius of asymmetric %dx%d matrix: %g", n, n, lam)
        return SpectralInfo(lambda_max=lam)

    shift = 0.5 * float(abs(M).sum(axis=1).max())
    x = np.ones(n) + 1e-6 * np.arange(n)
    x /= np.linalg.norm(x)

    residual = np.inf
    for it in range(1, settings.max_iter + 1):
        y = M @ x
        lam = float(x @ y)
        residual = float(np.linalg.norm(y - lam * x))
        if residual <= settings.eigen_tol * max(1.0, abs(lam)):
            logger.debug("spectral radius %.12g after %d iterations", lam, it)
            return SpectralInfo(lambda_max=abs(lam), iterations=it, residual=residual)
        y += shift * x
        x = y / np.linalg.norm(y)

    raise ConvergenceError(
        "power iteration for the spectral radius did not converge",
        residual=residual,
        iterations=settings.max_iter,
    )


def max_alpha(A: NModeMatrix, settings: Settings | None = None) -> float:
    """The convergence bound ``1 / lambda_max`` on alpha.

    Returns ``inf`` for a matrix without edges, for which every alpha converges.
    Admissible alphas lie strictly below the bound, see :func:`check_alpha`.
    """
    return spectral_radius(A, settings).bound


def check_alpha(
    alpha: float, lambda_max: float, settings: Settings | None = None
) -> None:
    """Raise :class:`DivergenceError` unless ``alpha * lambda_max < 1 - margin``."""
    settings = settings or DEFAULT_SETTINGS
    if alpha * lambda_max >= 1 - settings.alpha_margin:
        bound = np.inf if lambda_max == 0 else 1.0 / lambda_max
        raise DivergenceError(alpha, bound)


def recurrence_residual(A: NModeMatrix, C: CentralityMatrix) -> float:
    """Largest entry of ``|C - (beta A + alpha A C)|``."""
    p = C.params
    expected = p.beta * A.dense + p.alpha * (A.entries @ C.values)
    return float(np.max(np.abs(C.values - expected)))


def bonacich_exact(
    A: NModeMatrix,
    p: CentralityParams,
    settings: Settings | None = None,
    spectral: SpectralInfo | None = None,
) -> CentralityMatrix:
    """Exact b-centrality by a dense linear solve.

    Solves ``(I - alpha A) C = beta A``. Since ``A`` commutes with
    ``(I - alpha A)^-1`` this is ``beta A (I - alpha A)^-1``.

    Parameters
    ----------
    A
        The adjacency matrix.
    p
        Attenuation factors. ``p.alpha`` must be admissible for ``A``.
    settings
        Numerical settings.
    spectral
        A precomputed :func:`spectral_radius` of ``A``, to skip recomputing it.

    Raises
    ------
    DivergenceError
        If alpha is at or beyond ``1 / lambda_max``.
    NumericalError
        If the solve fails or its result violates the recurrence
        ``C = beta A + alpha A C`` by more than ``recurrence_tol * max(1, max|C|)``.
    """
    settings = settings or DEFAULT_SETTINGS
    spectral = spectral or spectral_radius(A, settings)
    check_alpha(p.alpha, spectral.lambda_max, settings)

    n = A.dimension
    if n > settings.dense_solve_limit:
        warnings.warn(
            f"solving a dense {n}x{n} system; consider method='series' for large graphs"
        )

    rhs = p.beta * A.dense
    if p.alpha == 0:
        values = rhs
    else:
        try:
            values = linalg.solve(np.eye(n) - p.alpha * A.dense, rhs)
        except linalg.LinAlgError as e:
            raise NumericalError(f"b-centrality solve failed at alpha={p.alpha}: {e}") from e

    out = CentralityMatrix(values=values, params=p, labels=A.labels, method="exact")
    residual = recurrence_residual(A, out)
    scale = max(1.0, float(np.max(np.abs(values))))
    if residual > settings.recurrence_tol * scale:
        raise NumericalError(
            f"b-centrality at alpha={p.alpha} violates its recurrence by {residual:.3e}"
        )
    logger.debug("exact b-centrality at alpha=%g: recurrence residual %.3e", p.alpha, residual)
    return out


def bonacich_series(
    A: NModeMatrix,
    p: CentralityParams,
    terms: int | None = None,
    settings: Settings | None = None,
) -> CentralityMatrix:
    """Truncated b-centrality series ``sum_{k < terms} beta alpha^k A^(k+1)``.

    No admissibility check is made: a finite sum exists for any alpha. The default
    number of terms is ``settings.series_terms``.
    """
    settings = settings or DEFAULT_SETTINGS
    terms = settings.series_terms if terms is None else int(terms)
    if terms < 1:
        raise ValueError(f"terms must be at least 1. Got {terms}")

    term = p.beta * A.dense
    total = term.copy()
    for _ in range(terms - 1):
        term = p.alpha * (A.entries @ term)
        total += term

    return CentralityMatrix(
        values=total, params=p, labels=A.labels, method="series", terms=terms
    )


def bonacich_adaptive(
    A: NModeMatrix,
    p: CentralityParams,
    tol: float | None = None,
    max_terms: int | None = None,
    settings: Settings | None = None,
    spectral: SpectralInfo | None = None,
) -> CentralityMatrix:
    """b-centrality by iterating ``P <- beta A + alpha A P`` until it settles.

    Starts from ``P = beta A`` and stops when the largest entry change is at most
    ``tol * max(1, max|P|)`` (``tol`` defaults to ``settings.eigen_tol``). This
    avoids the dense solve of :func:`bonacich_exact` while still converging to it.

    Raises
    ------
    DivergenceError
        If alpha is not admissible.
    ConvergenceError
        If the iteration has not settled after ``max_terms`` terms
        (default ``settings.max_iter``).
    """
    settings = settings or DEFAULT_SETTINGS
    tol = settings.eigen_tol if tol is None else tol
    max_terms = settings.max_iter if max_terms is None else max_terms
    spectral = spectral or spectral_radius(A, settings)
    check_alpha(p.alpha, spectral.lambda_max, settings)

    direct = p.beta * A.dense
    current = direct
    change = np.inf
    for k in range(2, max_terms + 1):
        new = direct + p.alpha * (A.entries @ current)
        change = float(np.max(np.abs(new - current)))
        current = new
        if change <= tol * max(1.0, float(np.max(np.abs(current)))):
            logger.debug("adaptive b-centrality settled after %d terms", k)
            return CentralityMatrix(
                values=current, params=p, labels=A.labels, method="adaptive", terms=k
            )

    raise ConvergenceError(
        f"b-centrality series at alpha={p.alpha} did not settle",
        residual=change,
        iterations=max_terms,
    )


def katz(
    A: NModeMatrix,
    alpha: float,
    terms: int | None = None,
    settings: Settings | None = None,
) -> CentralityMatrix:
    """Katz status scores, the ``beta = alpha`` case of b-centrality.

    Exact unless ``terms`` is given, in which case the series is truncated.
    """
    p = CentralityParams(alpha=alpha, beta=alpha)
    if terms is None:
        return bonacich_exact(A, p, settings=settings)
    return bonacich_series(A, p, terms=terms, settings=settings)


def radius(alpha: float) -> float:
    """Expected path length ``1 / (1 - alpha)`` implied by an attenuation factor.

    Examples
    --------
    >>> radius(0.5)
    2.0
    """
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative. Got {alpha}")
    if alpha >= 1:
        raise DivergenceError(alpha, 1.0, f"the radius diverges for alpha={alpha} >= 1")
    return 1.0 / (1.0 - alpha)


def compute_centrality(
    A: NModeMatrix,
    p: CentralityParams,
    method: Method = "exact",
    terms: int | None = None,
    settings: Settings | None = None,
    spectral: SpectralInfo | None = None,
) -> CentralityMatrix:
    """Compute b-centrality with the named method."""
    if method == "exact":
        return bonacich_exact(A, p, settings=settings, spectral=spectral)
    if method == "series":
        return bonacich_series(A, p, terms=terms, settings=settings)
    if method == "adaptive":
        return bonacich_adaptive(
            A, p, max_terms=terms, settings=settings, spectral=spectral
        )
    raise ValueError(f"method must be one of {METHODS}. Got '{method}'")


def node_scores(C: CentralityMatrix) -> np.ndarray:
    """Total attenuated paths emanating from each node (row sums of ``C``)."""
    return C.values.sum(axis=1)
