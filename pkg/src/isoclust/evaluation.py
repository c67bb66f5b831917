"""F1 scoring against ground truth, the grid-search benchmark protocol,
and the mode/valley detectability diagnostic.

The benchmark protocol evaluates every point of a parameter grid and, for
randomized dissimilarities, averages F1 over independently seeded
ensembles; the reported best row is the argmax of the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .cluster import NOISE, Clustering, _component_labels, dp_state
from .dataset import Dataset
from .partition import KIND_ANNE, KIND_IFOREST, build_ensemble
from .similarity import EUCLIDEAN, DissimilarityMatrix, dissimilarity_matrix

__all__ = [
    "ALGORITHMS",
    "F1Report",
    "ParamGrid",
    "SweepRow",
    "SweepReport",
    "DetectabilityReport",
    "f1_score",
    "default_grid",
    "grid_search",
    "detectability_diagnostic",
    "save_sweep_csv",
    "save_detectability_csv",
]

ALGORITHMS = ("dbscan", "mbscan-anne", "mbscan-iforest", "dp")

# seed stride between benchmark repeats; larger than any ensemble size so
# per-member seeds (seed + i) never collide across repeats
_REPEAT_STRIDE = 100003


@dataclass(frozen=True)
class F1Report:
    """Per-cluster precision/recall/F1 under the optimal one-to-one
    cluster-to-class matching, and the macro average over truth classes."""

    cluster_ids: tuple[int, ...]
    per_cluster: tuple[tuple[float, float, float], ...]
    matching: dict[int, int]
    macro_f1: float
    n_classes: int


def _pair_scores(labels: np.ndarray, truth_codes: np.ndarray, k: int):
    """Precision/recall/F1 of every (cluster, class) pair."""
    cluster_ids = np.unique(labels[labels != NOISE])
    if cluster_ids.size == 0:
        return cluster_ids, None, None, None
    pos = np.searchsorted(cluster_ids, labels)
    mask = labels != NOISE
    cont = np.zeros((cluster_ids.size, k), dtype=np.float64)
    np.add.at(cont, (pos[mask], truth_codes[mask]), 1.0)
    cluster_sizes = cont.sum(axis=1)
    class_sizes = np.bincount(truth_codes, minlength=k).astype(np.float64)
    precision = cont / cluster_sizes[:, None]
    recall = cont / class_sizes[None, :]
    denom = precision + recall
    f1 = np.divide(2.0 * precision * recall, denom, out=np.zeros_like(denom), where=denom > 0)
    return cluster_ids, precision, recall, f1


def _macro_f1(labels: np.ndarray, truth_codes: np.ndarray, k: int) -> float:
    cluster_ids, _, _, f1 = _pair_scores(labels, truth_codes, k)
    if cluster_ids.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(f1, maximize=True)
    return float(f1[rows, cols].sum() / k)


def f1_score(predicted: Clustering | np.ndarray, truth) -> F1Report:
    """Macro F1 of a clustering against ground-truth classes.

    Clusters are matched one-to-one to classes by the assignment that
    maximizes summed F1; unmatched classes contribute zero, noise points
    count against the recall of their class, and the average is taken
    over the number of truth classes.
    """
    labels = predicted.labels if isinstance(predicted, Clustering) else np.asarray(predicted)
    truth = np.asarray(truth)
    if truth.size == 0:
        raise ValueError("truth labels are empty")
    if labels.shape != truth.shape:
        raise ValueError(f"length mismatch: {labels.shape[0]} predictions vs {truth.shape[0]} truths")
    classes, truth_codes = np.unique(truth, return_inverse=True)
    k = classes.size
    cluster_ids, precision, recall, f1 = _pair_scores(labels, truth_codes, k)
    if cluster_ids.size == 0:
        return F1Report(cluster_ids=(), per_cluster=(), matching={}, macro_f1=0.0, n_classes=k)
    rows, cols = linear_sum_assignment(f1, maximize=True)
    matched = dict(zip(rows.tolist(), cols.tolist()))
    per_cluster = []
    matching = {}
    for r, cid in enumerate(cluster_ids.tolist()):
        if r in matched:
            c = matched[r]
            per_cluster.append((float(precision[r, c]), float(recall[r, c]), float(f1[r, c])))
            matching[int(cid)] = int(classes[c])
        else:
            per_cluster.append((0.0, 0.0, 0.0))
    macro = float(f1[rows, cols].sum() / k)
    return F1Report(
        cluster_ids=tuple(int(c) for c in cluster_ids),
        per_cluster=tuple(per_cluster),
        matching=matching,
        macro_f1=macro,
        n_classes=k,
    )


@dataclass(frozen=True)
class ParamGrid:
    """Search ranges; fields not applicable to an algorithm are ignored.

    cutoffs covers epsilon, alpha, and the density-peaks d_c.
    """

    cutoffs: tuple[float, ...]
    min_points: tuple[int, ...] = ()
    k_values: tuple[int, ...] = ()
    psi_values: tuple[int, ...] = ()
    t: int = 200


def default_grid(data: Dataset, algorithm: str) -> ParamGrid:
    """Benchmark defaults: cutoff in [0.001, 0.999] over 101 linear steps,
    MinPts and k in [2, 40], t = 200, and 10 equal-interval psi values
    between 2 and ceil(n/2)."""
    cutoffs = tuple(np.round(np.linspace(0.001, 0.999, 101), 12).tolist())
    span = np.linspace(2, math.ceil(data.n / 2), 10)
    psi = tuple(np.unique(np.clip(np.rint(span).astype(int), 1, data.n)).tolist())
    return ParamGrid(
        cutoffs=cutoffs,
        min_points=tuple(range(2, 41)),
        k_values=tuple(range(2, min(41, data.n + 1))),
        psi_values=psi,
        t=200,
    )


@dataclass(frozen=True)
class SweepRow:
    params: dict
    mean_f1: float
    std_f1: float


@dataclass(eq=False)
class SweepReport:
    algorithm: str
    rows: list[SweepRow]
    best: SweepRow
    repeats: int
    seed: int
    grid: ParamGrid
    dataset: str = ""


def _dbscan_f1_grid(
    values: np.ndarray, truth_codes: np.ndarray, k: int, cutoffs, min_points
) -> np.ndarray:
    """Macro F1 for every (cutoff, min_points) pair on one matrix."""
    out = np.empty((len(cutoffs), len(min_points)))
    for ci, cutoff in enumerate(cutoffs):
        adj = values <= cutoff
        np.fill_diagonal(adj, False)
        counts = adj.sum(axis=1) + 1
        for mi, mp in enumerate(min_points):
            labels = _component_labels(adj, counts, mp)
            out[ci, mi] = _macro_f1(labels, truth_codes, k)
    return out


def _dp_assign(values: np.ndarray, state, k: int) -> np.ndarray:
    n = values.shape[0]
    gamma = state.rho * state.delta
    seeds = np.lexsort((np.arange(n), -gamma))[:k]
    labels = np.full(n, NOISE, dtype=np.int64)
    labels[seeds] = np.arange(k)
    for i in np.lexsort((np.arange(n), -state.rho)):
        if labels[i] != NOISE:
            continue
        nh = state.nearest_higher[i]
        labels[i] = labels[nh] if nh >= 0 else labels[seeds[np.argmin(values[i, seeds])]]
    return labels


def _dp_f1_grid(values: np.ndarray, truth_codes: np.ndarray, k: int, cutoffs, k_values) -> np.ndarray:
    out = np.empty((len(cutoffs), len(k_values)))
    for ci, d_c in enumerate(cutoffs):
        state = dp_state(values, d_c)
        for ki, kk in enumerate(k_values):
            out[ci, ki] = _macro_f1(_dp_assign(values, state, kk), truth_codes, k)
    return out


def grid_search(
    data: Dataset,
    algorithm: str,
    grid: ParamGrid | None = None,
    repeats: int = 10,
    seed: int = 0,
    threads: int = 1,
) -> SweepReport:
    """Evaluate every grid point; the report's best row is the argmax of
    mean F1 (ties to the earliest row in grid order).

    For the isolation algorithms each repeat builds freshly seeded
    ensembles (seed + repeat * stride); deterministic algorithms are
    evaluated once with zero std.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm spec {algorithm!r}; expected one of {ALGORITHMS}")
    if data.labels is None:
        raise ValueError("grid_search needs ground-truth labels")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if grid is None:
        grid = default_grid(data, algorithm)
    if not grid.cutoffs:
        raise ValueError("empty cutoff range")
    classes, truth_codes = np.unique(data.labels, return_inverse=True)
    k = classes.size

    if algorithm == "dp":
        values = dissimilarity_matrix(data, EUCLIDEAN).values
        if not grid.k_values:
            raise ValueError("empty k range")
        scores = _dp_f1_grid(values, truth_codes, k, grid.cutoffs, grid.k_values)[None, :, :]
        param_axes = [("d_c", grid.cutoffs), ("k", grid.k_values)]
    elif algorithm == "dbscan":
        if not grid.min_points:
            raise ValueError("empty min_points range")
        values = dissimilarity_matrix(data, EUCLIDEAN).values
        scores = _dbscan_f1_grid(values, truth_codes, k, grid.cutoffs, grid.min_points)[None, :, :]
        param_axes = [("cutoff", grid.cutoffs), ("min_points", grid.min_points)]
    else:
        if not grid.min_points:
            raise ValueError("empty min_points range")
        if not grid.psi_values:
            raise ValueError("empty psi range")
        kind = KIND_ANNE if algorithm == "mbscan-anne" else KIND_IFOREST
        per_repeat = np.empty(
            (repeats, len(grid.psi_values), len(grid.cutoffs), len(grid.min_points))
        )
        for r in range(repeats):
            for pi, psi in enumerate(grid.psi_values):
                ens = build_ensemble(data, kind, psi, grid.t, seed + r * _REPEAT_STRIDE)
                values = dissimilarity_matrix(data, ens, threads=threads).values
                per_repeat[r, pi] = _dbscan_f1_grid(
                    values, truth_codes, k, grid.cutoffs, grid.min_points
                )
        scores = per_repeat
        param_axes = [
            ("psi", grid.psi_values),
            ("cutoff", grid.cutoffs),
            ("min_points", grid.min_points),
        ]

    mean = scores.mean(axis=0)
    std = scores.std(axis=0)
    rows: list[SweepRow] = []
    for flat, (m, s) in enumerate(zip(mean.ravel(), std.ravel())):
        coords = np.unravel_index(flat, mean.shape)
        params = {name: axis[c] for (name, axis), c in zip(param_axes, coords)}
        rows.append(SweepRow(params=params, mean_f1=float(m), std_f1=float(s)))
    best = max(rows, key=lambda row: row.mean_f1)
    return SweepReport(
        algorithm=algorithm,
        rows=rows,
        best=best,
        repeats=repeats if algorithm.startswith("mbscan") else 1,
        seed=seed,
        grid=grid,
        dataset=data.name,
    )


def save_sweep_csv(report: SweepReport, path: str | Path, header_lines: tuple[str, ...] = ()) -> None:
    names = list(report.rows[0].params)
    with open(Path(path), "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"# best: {report.best.params} mean_f1={report.best.mean_f1:.9g}\n")
        fh.write(",".join(names) + ",mean_f1,std_f1\n")
        for row in report.rows:
            cells = [format(row.params[n], ".9g") if isinstance(row.params[n], float) else str(row.params[n]) for n in names]
            fh.write(",".join(cells) + f",{row.mean_f1:.9g},{row.std_f1:.9g}\n")


@dataclass(frozen=True)
class DetectabilityReport:
    """Mode masses and pairwise valley bottlenecks at one cutoff.

    valleys[(i, j)] is the largest attainable minimum neighbourhood count
    along any path between modes i and j in the cutoff graph (0 when the
    modes are disconnected). The condition holds when every mode pair is
    connected and the smallest mode mass strictly exceeds every valley,
    i.e. a threshold exists that severs all inter-mode paths while keeping
    every mode.
    """

    cutoff: float
    mode_masses: dict[int, int]
    valleys: dict[tuple[int, int], int]
    satisfied: bool


def _bottleneck_valleys(adj: np.ndarray, masses: np.ndarray, modes: list[int]) -> dict:
    """Largest mass threshold at which each mode pair stays connected in
    the subgraph of points with at least that mass, found by binary search
    over the distinct mass levels; 0 for pairs the graph never connects.
    """
    n = adj.shape[0]
    valleys: dict[tuple[int, int], int] = {}
    _, comp_full = connected_components(csr_matrix(adj), directed=False)
    pending = []
    for a, i in enumerate(modes):
        for j in modes[a + 1 :]:
            if comp_full[i] == comp_full[j]:
                pending.append((i, j))
            else:
                valleys[(i, j)] = 0
    if not pending:
        return valleys

    levels = np.unique(masses)[::-1]  # descending; lower threshold => more nodes
    memo: dict[int, np.ndarray] = {}

    def labels_at(level_idx: int) -> np.ndarray:
        if level_idx not in memo:
            keep = np.nonzero(masses >= levels[level_idx])[0]
            _, comp = connected_components(
                csr_matrix(adj[np.ix_(keep, keep)]), directed=False
            )
            lab = np.full(n, -1, dtype=np.int64)
            lab[keep] = comp
            memo[level_idx] = lab
        return memo[level_idx]

    def connected(level_idx: int, i: int, j: int) -> bool:
        lab = labels_at(level_idx)
        return lab[i] >= 0 and lab[j] >= 0 and lab[i] == lab[j]

    for i, j in pending:
        lo, hi = 0, levels.size - 1  # connected at hi (full graph), monotone in level_idx
        if connected(lo, i, j):
            valleys[(i, j)] = int(levels[lo])
            continue
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if connected(mid, i, j):
                hi = mid
            else:
                lo = mid
        valleys[(i, j)] = int(levels[hi])
    return valleys


def detectability_diagnostic(
    matrix: DissimilarityMatrix, mode_indices, cutoff_grid
) -> list[DetectabilityReport]:
    """For each cutoff, the mass at every designated mode and the minimax
    valley between every mode pair, plus whether a separating threshold
    exists (see DetectabilityReport)."""
    modes = [int(i) for i in mode_indices]
    if len(set(modes)) < 2:
        raise ValueError("need at least two distinct mode indices")
    values = matrix.values
    reports = []
    for cutoff in cutoff_grid:
        adj = values <= cutoff
        np.fill_diagonal(adj, False)
        masses = adj.sum(axis=1) + 1
        valleys = _bottleneck_valleys(adj, masses, modes)
        mode_masses = {m: int(masses[m]) for m in modes}
        satisfied = all(v > 0 for v in valleys.values()) and min(mode_masses.values()) > max(
            valleys.values()
        )
        reports.append(
            DetectabilityReport(
                cutoff=float(cutoff),
                mode_masses=mode_masses,
                valleys=valleys,
                satisfied=satisfied,
            )
        )
    return reports


def save_detectability_csv(
    reports: list[DetectabilityReport], path: str | Path, header_lines: tuple[str, ...] = ()
) -> None:
    modes = list(reports[0].mode_masses)
    pairs = list(reports[0].valleys)
    with open(Path(path), "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        cols = ["cutoff"]
        cols += [f"mass_{m}" for m in modes]
        cols += [f"valley_{i}_{j}" for i, j in pairs]
        cols.append("satisfied")
        fh.write(",".join(cols) + "\n")
        for rep in reports:
            cells = [format(rep.cutoff, ".9g")]
            cells += [str(rep.mode_masses[m]) for m in modes]
            cells += [str(rep.valleys[p]) for p in pairs]
            cells.append(str(int(rep.satisfied)))
            fh.write(",".join(cells) + "\n")
