"""Clustering cores over a precomputed dissimilarity matrix.

``dbscan`` run on a euclidean matrix is classic DBSCAN; run on an
isolation matrix it is the mass-based variant, with no other change. The
density-peaks baseline is included for benchmark comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .neighbourhood import alpha_neighbourhood_graph, neighbourhood_counts
from .similarity import DissimilarityMatrix

__all__ = [
    "NOISE",
    "Clustering",
    "DPState",
    "dbscan",
    "mass_connected",
    "dp_state",
    "density_peaks",
    "save_clustering_csv",
]

NOISE = -1


@dataclass(eq=False)
class Clustering:
    """Per-point cluster assignment; NOISE (-1) marks unassigned points."""

    labels: np.ndarray
    parameters: dict = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        non_noise = self.labels[self.labels != NOISE]
        return int(np.unique(non_noise).size)


@dataclass(eq=False)
class DPState:
    """Density-peaks per-point state: density, separation, and the index
    of the nearest denser point (-1 for the global density maximum)."""

    rho: np.ndarray
    delta: np.ndarray
    nearest_higher: np.ndarray


def _component_labels(adj: np.ndarray, counts: np.ndarray, min_points: int) -> np.ndarray:
    """Deterministic DBSCAN labelling from a boolean adjacency matrix.

    Core points are those with neighbourhood count >= min_points.
    Clusters are the connected components of the core-core subgraph, with
    ids assigned by ascending index of each component's first core point;
    a non-core point adjacent to core points joins the lowest-id such
    cluster, matching ascending-index expansion order. Everything else is
    noise.
    """
    n = adj.shape[0]
    labels = np.full(n, NOISE, dtype=np.int64)
    core = counts >= min_points
    core_idx = np.nonzero(core)[0]
    if core_idx.size == 0:
        return labels

    sub = adj[np.ix_(core_idx, core_idx)]
    _, comp = connected_components(csr_matrix(sub), directed=False)
    # relabel components in order of first appearance over ascending core index
    _, first = np.unique(comp, return_index=True)
    remap = np.empty(comp.max() + 1, dtype=np.int64)
    remap[comp[np.sort(first)]] = np.arange(first.size)
    labels[core_idx] = remap[comp]

    border_idx = np.nonzero(~core)[0]
    if border_idx.size:
        reach = adj[np.ix_(border_idx, core_idx)]
        candidate = np.where(reach, labels[core_idx][None, :], np.iinfo(np.int64).max)
        best = candidate.min(axis=1)
        hit = best != np.iinfo(np.int64).max
        labels[border_idx[hit]] = best[hit]
    return labels


def dbscan(matrix: DissimilarityMatrix, cutoff: float, min_points: int) -> Clustering:
    """Density/mass-connected clustering at a fixed cutoff and threshold.

    A point is core when at least ``min_points`` points (itself included)
    lie within ``cutoff``; clusters grow transitively through core points,
    non-core points within reach of a core join as border, and the rest
    are noise. Output is deterministic: see _component_labels for the tie
    rules.
    """
    if min_points < 1:
        raise ValueError(f"min_points must be >= 1, got {min_points}")
    adj = alpha_neighbourhood_graph(matrix, cutoff)
    counts = neighbourhood_counts(matrix, cutoff)
    labels = _component_labels(adj, counts, min_points)
    return Clustering(labels=labels, parameters={"cutoff": cutoff, "min_points": min_points})


def mass_connected(matrix, i: int, j: int, cutoff: float, tau: int) -> bool:
    """Direct or transitive connectivity between points i and j.

    Direct: they are within ``cutoff`` of each other and at least one of
    them has neighbourhood count >= tau. Transitive: a chain of points
    links them with consecutive dissimilarities <= cutoff and every
    interior point of the chain has count >= tau.
    """
    if i == j:
        return True
    values = matrix.values if isinstance(matrix, DissimilarityMatrix) else np.asarray(matrix)
    counts = neighbourhood_counts(values, cutoff)
    if values[i, j] <= cutoff and (counts[i] >= tau or counts[j] >= tau):
        return True
    core = counts >= tau
    adj_i = values[i] <= cutoff
    adj_i[i] = False
    visited = core & adj_i
    frontier = np.nonzero(visited)[0]
    while frontier.size:
        if np.any(values[np.ix_(frontier, [j])] <= cutoff):
            return True
        reach = (values[frontier] <= cutoff).any(axis=0)
        new = core & reach & ~visited
        new[i] = new[j] = False
        visited |= new
        frontier = np.nonzero(new)[0]
    return False


def dp_state(matrix, d_c: float) -> DPState:
    """Per-point density-peaks quantities at cutoff ``d_c``.

    rho is the neighbourhood count; delta the dissimilarity to the
    nearest point of higher density (density ties broken by ascending
    index). The global maximum takes delta = its largest dissimilarity
    and a -1 sentinel.
    """
    values = matrix.values if isinstance(matrix, DissimilarityMatrix) else np.asarray(matrix)
    n = values.shape[0]
    rho = neighbourhood_counts(values, d_c)
    order = np.lexsort((np.arange(n), -rho))
    delta = np.empty(n, dtype=np.float64)
    nearest_higher = np.full(n, -1, dtype=np.int64)
    top = order[0]
    delta[top] = values[top].max()
    for pos in range(1, n):
        i = order[pos]
        earlier = order[:pos]
        dists = values[i, earlier]
        k = int(np.argmin(dists))
        delta[i] = dists[k]
        nearest_higher[i] = earlier[k]
    return DPState(rho=rho, delta=delta, nearest_higher=nearest_higher)


def density_peaks(matrix: DissimilarityMatrix, k: int, d_c: float) -> Clustering:
    """Density-peaks baseline: seed the k points of largest rho*delta,
    then pass every remaining point down to its nearest denser neighbour
    in descending-density order. Assigns every point (no noise)."""
    values = matrix.values if isinstance(matrix, DissimilarityMatrix) else np.asarray(matrix)
    n = values.shape[0]
    if not 2 <= k <= n:
        raise ValueError(f"k must be in [2, n={n}], got {k}")
    if d_c <= 0:
        raise ValueError(f"d_c must be > 0, got {d_c}")
    state = dp_state(matrix, d_c)
    gamma = state.rho * state.delta
    seeds = np.lexsort((np.arange(n), -gamma))[:k]
    labels = np.full(n, NOISE, dtype=np.int64)
    labels[seeds] = np.arange(k)
    order = np.lexsort((np.arange(n), -state.rho))
    for i in order:
        if labels[i] != NOISE:
            continue
        nh = state.nearest_higher[i]
        if nh >= 0:
            labels[i] = labels[nh]
        else:
            # density maximum that was not seeded: adopt the nearest seed
            labels[i] = labels[seeds[np.argmin(values[i, seeds])]]
    return Clustering(labels=labels, parameters={"k": k, "d_c": d_c})


def save_clustering_csv(clustering: Clustering, path: str | Path, header_lines: tuple[str, ...] = ()) -> None:
    """CSV export: point index, label (noise = -1)."""
    with open(Path(path), "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("index,label\n")
        for i, lab in enumerate(clustering.labels):
            fh.write(f"{i},{int(lab)}\n")
