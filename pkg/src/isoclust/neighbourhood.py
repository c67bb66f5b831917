"""Neighbourhood counting over a dissimilarity matrix.

With a euclidean matrix these are density counts (points within a metric
radius); with an isolation matrix they are mass counts. The code path is
identical; only the matrix kind differs. The query point itself is always
counted (its self-dissimilarity is zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .similarity import DissimilarityMatrix

__all__ = [
    "NeighbourhoodFunction",
    "neighbourhood_count",
    "neighbourhood_counts",
    "neighbourhood_curve",
    "alpha_neighbourhood_graph",
]


def _values(matrix) -> np.ndarray:
    return matrix.values if isinstance(matrix, DissimilarityMatrix) else np.asarray(matrix)


@dataclass(frozen=True, eq=False)
class NeighbourhoodFunction:
    """A dissimilarity matrix paired with a fixed cutoff."""

    matrix: DissimilarityMatrix
    cutoff: float

    def __post_init__(self) -> None:
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")

    def count(self, i: int) -> int:
        return neighbourhood_count(self.matrix, i, self.cutoff)

    def counts(self) -> np.ndarray:
        return neighbourhood_counts(self.matrix, self.cutoff)


def neighbourhood_count(matrix, i: int, cutoff: float) -> int:
    """Number of points within ``cutoff`` of point i, including i itself
    (closed-ball boundary)."""
    values = _values(matrix)
    if not 0 <= i < values.shape[0]:
        raise IndexError(f"point index {i} out of range for n={values.shape[0]}")
    return int(np.count_nonzero(values[i] <= cutoff))


def neighbourhood_counts(matrix, cutoff: float) -> np.ndarray:
    """Neighbourhood count of every point at once."""
    return np.count_nonzero(_values(matrix) <= cutoff, axis=1)


def neighbourhood_curve(matrix, i: int, cutoffs) -> np.ndarray:
    """Counts at each of an ascending sequence of cutoffs; non-decreasing."""
    cutoffs = np.asarray(cutoffs, dtype=np.float64)
    if cutoffs.ndim != 1 or cutoffs.size == 0:
        raise ValueError("cutoffs must be a non-empty 1-D sequence")
    if np.any(np.diff(cutoffs) < 0):
        raise ValueError("cutoffs must be sorted ascending")
    values = _values(matrix)
    if not 0 <= i < values.shape[0]:
        raise IndexError(f"point index {i} out of range for n={values.shape[0]}")
    row = np.sort(values[i])
    return np.searchsorted(row, cutoffs, side="right").astype(np.int64)


def alpha_neighbourhood_graph(matrix, cutoff: float) -> np.ndarray:
    """Boolean adjacency: edge (i, j) iff i != j and matrix[i, j] <= cutoff."""
    adj = _values(matrix) <= cutoff
    np.fill_diagonal(adj, False)
    return adj
