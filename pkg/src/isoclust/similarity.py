"""Isolation similarity over partition ensembles, its exact enumeration
oracle, full dissimilarity matrices, and 2-D contour grids.

The estimated similarity of two points is the fraction of ensemble
members in which they share a partition; dissimilarity is one minus that,
so isolation entries are always integer multiples of 1/t.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .partition import KIND_ANNE, PartitionEnsemble

__all__ = [
    "EUCLIDEAN",
    "DissimilarityMatrix",
    "similarity",
    "exact_similarity",
    "dissimilarity_matrix",
    "contour_grid",
    "save_matrix_csv",
    "save_matrix_npz",
    "load_matrix_npz",
]

EUCLIDEAN = "euclidean"

MAX_EXACT_SUBSETS = 10**6

MATRIX_FORMAT = "isoclust-matrix"
MATRIX_VERSION = 1


@dataclass(eq=False)
class DissimilarityMatrix:
    """Symmetric zero-diagonal pairwise dissimilarities.

    ``kind`` is one of isolation-anne, isolation-iforest, euclidean.
    """

    values: np.ndarray
    kind: str
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _ensemble_kind(ensemble: PartitionEnsemble) -> str:
    return f"isolation-{ensemble.kind}"


def similarity(ensemble: PartitionEnsemble, x: np.ndarray, y: np.ndarray) -> float:
    """Fraction of ensemble members in which x and y share a partition."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    if ensemble.kind == KIND_ANNE:
        # one argmin over all members at once
        centres = np.stack([m.centres for m in ensemble.members])  # (t, psi, d)
        dx = np.linalg.norm(centres - x[None, :, :], axis=2)
        dy = np.linalg.norm(centres - y[None, :, :], axis=2)
        hits = np.argmin(dx, axis=1) == np.argmin(dy, axis=1)
        return float(np.mean(hits))
    hits = sum(int(m.cells_of(x)[0] == m.cells_of(y)[0]) for m in ensemble.members)
    return hits / ensemble.t


def exact_similarity(data: Dataset, kind: str, psi: int, x: np.ndarray, y: np.ndarray) -> float:
    """Exact mean of the same-cell indicator over all psi-subsets of the
    data: the brute-force expectation the ensemble estimate converges to.

    Only the Voronoi kind is enumerable; tree construction has its own
    randomness beyond the subsample, so no finite enumeration covers it.
    """
    if kind != KIND_ANNE:
        raise ValueError("exact_similarity is defined for the Voronoi (anne) kind only")
    n = data.n
    if not 1 <= psi <= n:
        raise ValueError(f"psi must be in [1, n={n}], got {psi}")
    total = math.comb(n, psi)
    if total > MAX_EXACT_SUBSETS:
        raise ValueError(f"C({n},{psi}) = {total} subsets exceeds the enumeration guard")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx = np.linalg.norm(data.points - x[None, :], axis=1).tolist()
    dy = np.linalg.norm(data.points - y[None, :], axis=1).tolist()
    hits = 0
    for subset in combinations(range(n), psi):
        bx = by = subset[0]
        vx, vy = dx[bx], dy[by]
        for i in subset[1:]:
            if dx[i] < vx:
                vx, bx = dx[i], i
            if dy[i] < vy:
                vy, by = dy[i], i
        hits += bx == by
    return hits / total


def _cells_block(member, X: np.ndarray, block: int = 4096) -> np.ndarray:
    # chunked to bound the (block, psi, d) broadcast in the Voronoi case
    out = np.empty(X.shape[0], dtype=np.int64)
    for start in range(0, X.shape[0], block):
        out[start : start + block] = member.cells_of(X[start : start + block])
    return out


def ensemble_cells(ensemble: PartitionEnsemble, X: np.ndarray, threads: int = 1) -> np.ndarray:
    """Partition id of every row of X under every member; shape (t, n)."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(lambda m: _cells_block(m, X), ensemble.members))
    else:
        rows = [_cells_block(m, X) for m in ensemble.members]
    return np.stack(rows)


def dissimilarity_matrix(
    data: Dataset,
    source: PartitionEnsemble | str,
    threads: int = 1,
) -> DissimilarityMatrix:
    """Full pairwise dissimilarity matrix.

    ``source`` is either a built ensemble (isolation dissimilarity
    1 - similarity) or the string "euclidean". Symmetry and the zero
    diagonal are exact by construction.
    """
    X = data.points
    n = data.n
    if isinstance(source, str):
        if source != EUCLIDEAN:
            raise ValueError(f"unknown metric spec {source!r}")
        from scipy.spatial.distance import cdist

        upper = np.triu(cdist(X, X), k=1)
        return DissimilarityMatrix(values=upper + upper.T, kind=EUCLIDEAN, provenance={"metric": EUCLIDEAN})
    if source.d != data.d:
        raise ValueError(f"ensemble dimension {source.d} does not match data dimension {data.d}")
    cells = ensemble_cells(source, X, threads=threads)
    counts = np.zeros((n, n), dtype=np.int32)
    for row in cells:
        counts += row[:, None] == row[None, :]
    values = 1.0 - counts / source.t
    np.fill_diagonal(values, 0.0)
    return DissimilarityMatrix(
        values=values,
        kind=_ensemble_kind(source),
        provenance={"kind": source.kind, "psi": source.psi, "t": source.t, "seed": source.seed},
    )


def contour_grid(
    ensemble: PartitionEnsemble,
    data: Dataset,
    reference: np.ndarray,
    resolution: tuple[int, int],
    bounds: tuple[tuple[float, float], tuple[float, float]] | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dissimilarity from a reference point to every vertex of a 2-D grid.

    Returns (xs, ys, grid) with grid[i, j] = dissimilarity(reference,
    (xs[j], ys[i])); flattening the grid row-major matches scanning y
    outer, x inner.
    """
    if data.d != 2 or ensemble.d != 2:
        raise ValueError("contour grids require 2-D data")
    nx, ny = resolution
    if bounds is None:
        lo = data.points.min(axis=0)
        hi = data.points.max(axis=0)
        bounds = ((lo[0], hi[0]), (lo[1], hi[1]))
    xs = np.linspace(bounds[0][0], bounds[0][1], nx)
    ys = np.linspace(bounds[1][0], bounds[1][1], ny)
    gx, gy = np.meshgrid(xs, ys)
    queries = np.column_stack([gx.ravel(), gy.ravel()])
    ref = np.asarray(reference, dtype=np.float64).reshape(1, 2)
    hits = np.zeros(queries.shape[0], dtype=np.int64)
    for m in ensemble.members:
        hits += m.cells_of(queries) == m.cells_of(ref)[0]
    grid = (1.0 - hits / ensemble.t).reshape(ny, nx)
    return xs, ys, grid


def save_matrix_csv(matrix: DissimilarityMatrix, path: str | Path, header_lines: tuple[str, ...] = ()) -> None:
    """Row-major CSV export with 9-significant-digit values."""
    with open(Path(path), "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for row in matrix.values:
            fh.write(",".join(format(v, ".9g") for v in row) + "\n")


def save_matrix_npz(matrix: DissimilarityMatrix, path: str | Path) -> None:
    """Binary export: values plus a JSON header (n, kind, provenance)."""
    meta = {
        "format": MATRIX_FORMAT,
        "version": MATRIX_VERSION,
        "n": matrix.n,
        "kind": matrix.kind,
        "provenance": matrix.provenance,
    }
    np.savez_compressed(Path(path), values=matrix.values, meta=json.dumps(meta))


def load_matrix_npz(path: str | Path) -> DissimilarityMatrix:
    with np.load(Path(path), allow_pickle=False) as record:
        meta = json.loads(str(record["meta"]))
        if meta.get("format") != MATRIX_FORMAT:
            raise ValueError(f"{path}: not a dissimilarity matrix record")
        return DissimilarityMatrix(
            values=record["values"], kind=meta["kind"], provenance=meta.get("provenance", {})
        )
