"""Types and attrs helpers to be used throughout the package."""
from __future__ import annotations

from typing import Any, Callable, Union

import attr
import numpy as np
from scipy import sparse

Matrix = Union[np.ndarray, sparse.spmatrix]

cmp_array = attr.cmp_using(eq=np.array_equal)


def _sparse_equal(a: sparse.spmatrix, b: sparse.spmatrix) -> bool:
    if a.shape != b.shape:
        return False
    if not sparse.issparse(a):
        return np.array_equal(a, b)
    diff = sparse.csr_matrix(a - b)
    diff.eliminate_zeros()
    return diff.nnz == 0


cmp_sparse = attr.cmp_using(eq=_sparse_equal)


def is_square(val: Matrix) -> bool:
    """Evaluate whether a given array or sparse matrix is square and 2D."""
    shape = getattr(val, "shape", ())
    return len(shape) == 2 and shape[0] == shape[1]


def vld_square() -> Callable[[Any, attr.Attribute, Any], None]:
    """Attr validator to check that a matrix is square."""

    def _check_square(self, att: attr.Attribute, val: Any):
        if not is_square(val):
            raise ValueError(
                f"{att.name} must be a square matrix. Got shape "
                f"{getattr(val, 'shape', None)}"
            )

    return _check_square


def vld_nonnegative(
    error: type[Exception] = ValueError,
) -> Callable[[Any, attr.Attribute, Any], None]:
    """Attr validator to check that all values (dense or sparse) are >= 0.

    Parameters
    ----------
    error
        The exception class raised on failure.
    """

    def _check_nonnegative(self, att: attr.Attribute, val: Any):
        data = val.data if sparse.issparse(val) else np.asarray(val)
        if data.size and not np.all(data >= 0):
            raise error(f"{att.name} must be non-negative. Got min {np.min(data)}")

    return _check_nonnegative


def vld_finite() -> Callable[[Any, attr.Attribute, Any], None]:
    """Attr validator to check that all values are finite."""

    def _check_finite(self, att: attr.Attribute, val: Any):
        data = val.data if sparse.issparse(val) else np.asarray(val)
        if not np.all(np.isfinite(data)):
            raise ValueError(f"{att.name} must be finite")

    return _check_finite
