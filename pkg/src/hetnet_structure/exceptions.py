"""Exceptions raised throughout the package.

Errors about the *data* (malformed files, duplicate edges, partitions over
different node sets) derive from :class:`DataError`, which is also a
``ValueError``. Errors about the *numerics* (divergent series, eigensolvers that
fail to converge) derive from :class:`NumericalError`.
"""
from __future__ import annotations


class HetnetError(Exception):
    """Base class of every error raised by hetnet_structure."""


class DataError(HetnetError, ValueError):
    """The input data is invalid."""


class DuplicateEdgeError(DataError):
    """The same ordered node pair was given more than one edge."""


class InvalidWeightError(DataError):
    """An edge or layer weight is negative (or not a number)."""


class EmptyLayerError(DataError):
    """A layer that was asked for holds no nodes."""


class GraphFormatError(DataError):
    """A graph file does not follow the expected format.

    Parameters
    ----------
    message
        Description of the problem.
    line
        1-based line number in the offending file, if known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GMLFormatError(DataError):
    """A GML file could not be read as a graph of teams and games."""


class PartitionMismatchError(DataError):
    """Two partitions do not cover the same set of nodes."""


class UnknownDatasetError(DataError):
    """A built-in dataset name is not recognised."""


class DegenerateNullModelError(DataError):
    """The rounded centrality matrix holds no paths at all (W = 0)."""


class NumericalError(HetnetError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result."""


class DivergenceError(NumericalError, ValueError):
    """The attenuation factor is at or beyond the convergence bound 1/lambda.

    Parameters
    ----------
    alpha
        The offending attenuation factor.
    bound
        The reciprocal of the largest eigenvalue of the adjacency matrix.
    """

    def __init__(self, alpha: float, bound: float, message: str | None = None):
        self.alpha = alpha
        self.bound = bound
        if message is None:
            message = (
                f"alpha={alpha!r} is not below the convergence bound "
                f"1/lambda_max={bound:.6g}"
            )
        super().__init__(message)


class ConvergenceError(NumericalError):
    """An iterative procedure ran out of iterations.

    Parameters
    ----------
    message
        Description of the procedure that failed.
    residual
        The residual reached when the procedure stopped.
    iterations
        The number of iterations performed.
    """

    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"{message} (residual={residual:.3e} after {iterations} iterations)"
        )
