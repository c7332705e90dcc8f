"""Numerical settings shared by the centrality, community and ranking modules."""
from __future__ import annotations

import attr

_positive = attr.validators.gt(0)


@attr.s(frozen=True, kw_only=True)
class Settings:
    """Tolerances and limits used by the numerical routines.

    Every routine that needs one of these accepts a ``settings`` argument and falls
    back to :data:`DEFAULT_SETTINGS`. Derive variants with :func:`attr.evolve`.

    Parameters
    ----------
    eigen_tol
        Residual tolerance of the eigensolvers, relative to ``max(1, |lambda|)``.
        It is absolute only for eigenvalues of magnitude at most 1.
    max_iter
        Maximum number of iterations of the eigensolvers.
    alpha_margin
        An attenuation factor is admissible when ``alpha * lambda_max < 1 - margin``.
    recurrence_tol
        Maximum allowed residual of ``C = beta*A + alpha*A*C`` for the exact method,
        relative to ``max(1, max|C|)``. It is absolute only when no entry of
        ``C`` exceeds 1.
    zero_tol
        Eigenvector entries with magnitude at most this are treated as zero (and put
        into the positive group).
    indivisible_tol
        A community whose leading modularity eigenvalue is at most this is not split.
    split_tol
        A split is only accepted if its modularity gain exceeds ``split_tol * W``.
    tie_tol
        Scores within ``tie_tol * max(1, |score|)`` of each other share a rank.
    bridge_threshold
        Minimum rank improvement over an alpha sweep for a node to be a bridge.
    series_terms
        Default number of terms of the truncated b-centrality series.
    dense_eigen_limit
        Bisection subproblems of at most this size use a dense eigensolver, larger
        ones use Lanczos iteration.
    dense_solve_limit
        Exact solves on more nodes than this emit a warning.
    """

    eigen_tol: float = attr.ib(default=1e-10, converter=float, validator=_positive)
    max_iter: int = attr.ib(default=100_000, converter=int, validator=_positive)
    alpha_margin: float = attr.ib(
        default=1e-9, converter=float, validator=attr.validators.ge(0)
    )
    recurrence_tol: float = attr.ib(default=1e-8, converter=float, validator=_positive)
    zero_tol: float = attr.ib(default=1e-12, converter=float, validator=_positive)
    indivisible_tol: float = attr.ib(
        default=1e-12, converter=float, validator=attr.validators.ge(0)
    )
    split_tol: float = attr.ib(
        default=1e-12, converter=float, validator=attr.validators.ge(0)
    )
    tie_tol: float = attr.ib(default=1e-9, converter=float, validator=attr.validators.ge(0))
    bridge_threshold: float = attr.ib(
        default=1.0, converter=float, validator=attr.validators.ge(0)
    )
    series_terms: int = attr.ib(default=3, converter=int, validator=attr.validators.ge(1))
    dense_eigen_limit: int = attr.ib(
        default=500, converter=int, validator=attr.validators.ge(0)
    )
    dense_solve_limit: int = attr.ib(default=5000, converter=int, validator=_positive)


DEFAULT_SETTINGS = Settings()
