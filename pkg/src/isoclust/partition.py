"""Isolating partitionings: Voronoi diagrams of point samples and
axis-parallel isolation trees, plus ensembles of either kind.

Each partitioning maps any query point to exactly one partition id.
Voronoi cells are induced by a size-psi subsample (each cell isolates one
sampled point); isolation trees recursively split a size-psi subsample
with random axis-parallel cuts until every distinct point is isolated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset

__all__ = [
    "KIND_ANNE",
    "KIND_IFOREST",
    "VoronoiPartitioning",
    "IsolationTree",
    "PartitionEnsemble",
    "build_ensemble",
    "cell_of",
    "same_cell",
    "save_ensemble",
    "load_ensemble",
]

KIND_ANNE = "anne"
KIND_IFOREST = "iforest"

ENSEMBLE_FORMAT = "isoclust-ensemble"
ENSEMBLE_VERSION = 1


@dataclass(frozen=True, eq=False)
class VoronoiPartitioning:
    """Voronoi diagram of a subsample; cell ids index the centres.

    ``sample_indices`` are the source-row indices of the centres, kept
    sorted ascending so that nearest-centre ties resolve to the lowest
    sample index (argmin picks the first of equal distances).
    """

    centres: np.ndarray
    sample_indices: np.ndarray

    @property
    def d(self) -> int:
        return self.centres.shape[1]

    def cells_of(self, X: np.ndarray) -> np.ndarray:
        X = _check_queries(X, self.d)
        # (m, psi) squared distances; sqrt not needed for argmin
        diff = X[:, None, :] - self.centres[None, :, :]
        return np.argmin(np.einsum("mpd,mpd->mp", diff, diff), axis=1)


@dataclass(frozen=True, eq=False)
class IsolationTree:
    """Flattened binary isolation tree.

    ``feature``/``threshold`` describe internal nodes; leaves carry
    ``feature == -1`` and a ``leaf_id``. Descent sends a query left when
    its value on the split attribute is strictly below the threshold.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_id: np.ndarray
    d: int

    @property
    def n_leaves(self) -> int:
        return int(self.leaf_id.max()) + 1

    def cells_of(self, X: np.ndarray) -> np.ndarray:
        X = _check_queries(X, self.d)
        pos = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[pos] >= 0
        while np.any(active):
            idx = np.nonzero(active)[0]
            node = pos[idx]
            go_left = X[idx, self.feature[node]] < self.threshold[node]
            pos[idx] = np.where(go_left, self.left[node], self.right[node])
            active[idx] = self.feature[pos[idx]] >= 0
        return self.leaf_id[pos]


@dataclass(frozen=True, eq=False)
class PartitionEnsemble:
    """t independently sampled partitionings of one kind."""

    kind: str
    psi: int
    t: int
    seed: int
    members: tuple

    @property
    def d(self) -> int:
        return self.members[0].d


def _check_queries(X: np.ndarray, d: int) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != d:
        raise ValueError(f"query dimension {X.shape[1]} does not match partitioning dimension {d}")
    return X


def _build_voronoi(points: np.ndarray, psi: int, rng: np.random.Generator) -> VoronoiPartitioning:
    idx = np.sort(rng.choice(points.shape[0], size=psi, replace=False))
    return VoronoiPartitioning(centres=points[idx], sample_indices=idx)


def _build_tree(points: np.ndarray, psi: int, rng: np.random.Generator) -> IsolationTree:
    idx = np.sort(rng.choice(points.shape[0], size=psi, replace=False))
    sample = points[idx]
    feature, threshold, left, right, leaf_id = [], [], [], [], []
    n_leaves = 0

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf_id.append(-1)
        return len(feature) - 1

    # Explicit stack; splits always shrink both sides so this terminates
    # once each node holds a single distinct point.
    stack = [(new_node(), np.arange(psi))]
    while stack:
        node, rows = stack.pop()
        sub = sample[rows]
        lo, hi = sub.min(axis=0), sub.max(axis=0)
        splittable = np.nonzero(hi > lo)[0]
        if splittable.size == 0:
            leaf_id[node] = n_leaves
            n_leaves += 1
            continue
        attr = int(rng.choice(splittable))
        val = rng.uniform(lo[attr], hi[attr])
        while val <= lo[attr]:  # guard the measure-zero draw at the boundary
            val = rng.uniform(lo[attr], hi[attr])
        go_left = sub[:, attr] < val
        feature[node] = attr
        threshold[node] = float(val)
        right[node] = new_node()
        left[node] = new_node()
        # left pushed last so leaf ids are assigned left-to-right
        stack.append((right[node], rows[~go_left]))
        stack.append((left[node], rows[go_left]))

    return IsolationTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        leaf_id=np.asarray(leaf_id, dtype=np.int64),
        d=points.shape[1],
    )


def build_ensemble(data: Dataset, kind: str, psi: int, t: int, seed: int) -> PartitionEnsemble:
    """Build t partitionings, each from a fresh psi-subset sampled
    uniformly without replacement.

    Member i draws from its own generator seeded with ``seed + i``, so
    serial and member-parallel builds produce identical ensembles.
    """
    if kind not in (KIND_ANNE, KIND_IFOREST):
        raise ValueError(f"unknown partitioning kind {kind!r}")
    if not 1 <= psi <= data.n:
        raise ValueError(f"psi must be in [1, n={data.n}], got {psi}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    build = _build_voronoi if kind == KIND_ANNE else _build_tree
    members = tuple(build(data.points, psi, np.random.default_rng(seed + i)) for i in range(t))
    return PartitionEnsemble(kind=kind, psi=psi, t=t, seed=seed, members=members)


def cell_of(partitioning: VoronoiPartitioning | IsolationTree, x: np.ndarray) -> int:
    """Partition id of a single query point."""
    return int(partitioning.cells_of(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def same_cell(partitioning, x: np.ndarray, y: np.ndarray) -> bool:
    return cell_of(partitioning, x) == cell_of(partitioning, y)


def save_ensemble(ensemble: PartitionEnsemble, path: str | Path) -> None:
    """Serialize an ensemble to a versioned JSON record."""
    members = []
    for m in ensemble.members:
        if isinstance(m, VoronoiPartitioning):
            members.append(
                {"centres": m.centres.tolist(), "sample_indices": m.sample_indices.tolist()}
            )
        else:
            members.append(
                {
                    "feature": m.feature.tolist(),
                    "threshold": m.threshold.tolist(),
                    "left": m.left.tolist(),
                    "right": m.right.tolist(),
                    "leaf_id": m.leaf_id.tolist(),
                    "d": m.d,
                }
            )
    record = {
        "format": ENSEMBLE_FORMAT,
        "version": ENSEMBLE_VERSION,
        "kind": ensemble.kind,
        "psi": ensemble.psi,
        "t": ensemble.t,
        "seed": ensemble.seed,
        "members": members,
    }
    Path(path).write_text(json.dumps(record))


def load_ensemble(path: str | Path) -> PartitionEnsemble:
    record = json.loads(Path(path).read_text())
    if record.get("format") != ENSEMBLE_FORMAT:
        raise ValueError(f"{path}: not an ensemble record")
    if record.get("version") != ENSEMBLE_VERSION:
        raise ValueError(f"{path}: unsupported ensemble version {record.get('version')}")
    members = []
    for m in record["members"]:
        if record["kind"] == KIND_ANNE:
            members.append(
                VoronoiPartitioning(
                    centres=np.asarray(m["centres"], dtype=np.float64),
                    sample_indices=np.asarray(m["sample_indices"], dtype=np.int64),
                )
            )
        else:
            members.append(
                IsolationTree(
                    feature=np.asarray(m["feature"], dtype=np.int64),
                    threshold=np.asarray(m["threshold"], dtype=np.float64),
                    left=np.asarray(m["left"], dtype=np.int64),
                    right=np.asarray(m["right"], dtype=np.int64),
                    leaf_id=np.asarray(m["leaf_id"], dtype=np.int64),
                    d=int(m["d"]),
                )
            )
    return PartitionEnsemble(
        kind=record["kind"],
        psi=int(record["psi"]),
        t=int(record["t"]),
        seed=int(record["seed"]),
        members=tuple(members),
    )
