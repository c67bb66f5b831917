"""Monte-Carlo estimates of the probability that two fixed points share a
Voronoi cell, under sparse vs dense placement on a two-density field.

Each trial draws a fresh psi-subset of the background field and asks, for
a matched pair couple of equal inter-point distance, whether the sparse
pair and the dense pair each fall into one cell. Sweeping psi (at fixed
distance) and distance (at fixed psi) reproduces the characteristic that
the dense pair separates sooner and faster.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset

__all__ = [
    "SimulationConfig",
    "SimulationResult",
    "two_density_field",
    "default_config",
    "simulate_vs_psi",
    "simulate_vs_distance",
]

_BLOCK = 1000  # trials per seeded block; fixed so thread count cannot change results


def two_density_field(seed: int = 0, sparse_cells: tuple[int, int] = (10, 20)) -> Dataset:
    """Grid-jittered two-density background: the right half of the unit
    square carries 4x the point density of the left half."""
    nx, ny = sparse_cells
    rng = np.random.default_rng(seed)

    def jittered(nx: int, ny: int, x0: float, x1: float) -> np.ndarray:
        w = (x1 - x0) / nx
        h = 1.0 / ny
        ix, iy = np.meshgrid(np.arange(nx), np.arange(ny))
        offsets = rng.random((nx * ny, 2))
        return np.column_stack(
            [x0 + (ix.ravel() + offsets[:, 0]) * w, (iy.ravel() + offsets[:, 1]) * h]
        )

    left = jittered(nx, ny, 0.0, 0.5)
    right = jittered(2 * nx, 2 * ny, 0.5, 1.0)
    points = np.vstack([left, right])
    labels = np.concatenate(
        [np.zeros(len(left), np.int64), np.ones(len(right), np.int64)]
    )
    return Dataset(points=points, labels=labels, name=f"two_density_field_s{seed}")


@dataclass(frozen=True, eq=False)
class SimulationConfig:
    """Background field, one matched pair couple, and the sweep grids.

    The sparse and dense pairs must have equal inter-point distance; the
    distance sweep re-places both pairs around the same midpoints.
    """

    background: Dataset
    pair_sparse: tuple[np.ndarray, np.ndarray]
    pair_dense: tuple[np.ndarray, np.ndarray]
    psi_values: tuple[int, ...]
    distances: tuple[float, ...]
    trials: int
    seed: int = 0

    def __post_init__(self) -> None:
        ds = float(np.linalg.norm(np.subtract(*self.pair_sparse)))
        dd = float(np.linalg.norm(np.subtract(*self.pair_dense)))
        if abs(ds - dd) > 1e-12:
            raise ValueError(f"pair distances differ: sparse {ds!r} vs dense {dd!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def default_config(seed: int = 0, trials: int = 10000) -> SimulationConfig:
    """Defaults: 4x-density field, horizontal pairs of distance 0.2 centred
    in each half, psi in {2, 4, ..., 64}, distances 0.05..0.5."""
    return SimulationConfig(
        background=two_density_field(seed=seed),
        pair_sparse=(np.array([0.15, 0.5]), np.array([0.35, 0.5])),
        pair_dense=(np.array([0.65, 0.5]), np.array([0.85, 0.5])),
        psi_values=tuple(range(2, 65, 2)),
        distances=tuple(np.round(np.arange(0.05, 0.501, 0.05), 10).tolist()),
        trials=trials,
        seed=seed,
    )


@dataclass(eq=False)
class SimulationResult:
    """Estimated same-cell probabilities with binomial standard errors,
    per grid point of the swept parameter."""

    axis: str
    grid: np.ndarray
    p_sparse: np.ndarray
    p_dense: np.ndarray
    se_sparse: np.ndarray
    se_dense: np.ndarray
    trials: int
    seed: int

    def to_csv(self, path: str | Path, header_lines: tuple[str, ...] = ()) -> None:
        with open(Path(path), "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(f"{self.axis},p_sparse,p_dense,se_sparse,se_dense\n")
            for row in zip(self.grid, self.p_sparse, self.p_dense, self.se_sparse, self.se_dense):
                fh.write(",".join(format(v, ".9g") for v in row) + "\n")


def _pair_distances(points: np.ndarray, pair) -> tuple[np.ndarray, np.ndarray]:
    x, y = (np.asarray(p, dtype=np.float64) for p in pair)
    return (
        np.linalg.norm(points - x[None, :], axis=1),
        np.linalg.norm(points - y[None, :], axis=1),
    )


def _block_hits(n: int, psi: int, size: int, rng: np.random.Generator, dists) -> np.ndarray:
    """Same-cell hits for each pair over one block of trials.

    A trial's psi-subset is the psi smallest of n random keys, i.e. a
    uniform sample without replacement; rows are sorted so argmin ties
    resolve to the lowest sample index, as in ensemble construction.
    """
    keys = rng.random((size, n))
    idx = np.argpartition(keys, psi - 1, axis=1)[:, :psi] if psi < n else np.tile(np.arange(n), (size, 1))
    idx.sort(axis=1)
    rows = np.arange(size)
    hits = np.empty(len(dists), dtype=np.int64)
    for k, (dx, dy) in enumerate(dists):
        nearest_x = idx[rows, np.argmin(dx[idx], axis=1)]
        nearest_y = idx[rows, np.argmin(dy[idx], axis=1)]
        hits[k] = int(np.count_nonzero(nearest_x == nearest_y))
    return hits


def _estimate(config: SimulationConfig, tag: int, grid_index: int, psi: int, pairs, threads: int):
    points = config.background.points
    n = config.background.n
    dists = [_pair_distances(points, pair) for pair in pairs]
    blocks = [
        (b, min(_BLOCK, config.trials - b * _BLOCK))
        for b in range((config.trials + _BLOCK - 1) // _BLOCK)
    ]

    def run(block) -> np.ndarray:
        b, size = block
        rng = np.random.default_rng((config.seed, tag, grid_index, b))
        return _block_hits(n, psi, size, rng, dists)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(block) for block in blocks]
    hits = np.sum(parts, axis=0)
    p = hits / config.trials
    se = np.sqrt(p * (1.0 - p) / config.trials)
    return p, se


def simulate_vs_psi(config: SimulationConfig, threads: int = 1) -> SimulationResult:
    """Same-cell probability of each pair as psi sweeps at fixed distance.

    Both pairs are evaluated on the same subsets, trial by trial.
    """
    n = config.background.n
    for psi in config.psi_values:
        if not 1 <= psi <= n:
            raise ValueError(f"psi {psi} out of range [1, n={n}]")
    ps, pd, ss, sd = [], [], [], []
    for gi, psi in enumerate(config.psi_values):
        p, se = _estimate(config, 0, gi, psi, [config.pair_sparse, config.pair_dense], threads)
        ps.append(p[0])
        pd.append(p[1])
        ss.append(se[0])
        sd.append(se[1])
    return SimulationResult(
        axis="psi",
        grid=np.asarray(config.psi_values, dtype=np.float64),
        p_sparse=np.asarray(ps),
        p_dense=np.asarray(pd),
        se_sparse=np.asarray(ss),
        se_dense=np.asarray(sd),
        trials=config.trials,
        seed=config.seed,
    )


def _placed_pairs(config: SimulationConfig, distance: float):
    pairs = []
    for pair, lo, hi in (
        (config.pair_sparse, 0.0, 0.5),
        (config.pair_dense, 0.5, 1.0),
    ):
        x, y = (np.asarray(p, dtype=np.float64) for p in pair)
        gap = np.linalg.norm(y - x)
        unit = (y - x) / gap if gap > 0 else np.array([1.0, 0.0])
        mid = (x + y) / 2.0
        a, b = mid - unit * distance / 2.0, mid + unit * distance / 2.0
        for p in (a, b):
            if not (lo <= p[0] <= hi and 0.0 <= p[1] <= 1.0):
                raise ValueError(
                    f"pair point {p.tolist()} at distance {distance} falls outside its half"
                )
        pairs.append((a, b))
    return pairs


def simulate_vs_distance(config: SimulationConfig, psi: int = 15, threads: int = 1) -> SimulationResult:
    """Same-cell probability of each pair as the inter-point distance
    sweeps at fixed psi, pairs re-placed around their fixed midpoints."""
    if not 1 <= psi <= config.background.n:
        raise ValueError(f"psi {psi} out of range [1, n={config.background.n}]")
    if any(d < 0 for d in config.distances):
        raise ValueError("distances must be non-negative")
    ps, pd, ss, sd = [], [], [], []
    for gi, distance in enumerate(config.distances):
        pairs = _placed_pairs(config, distance)
        p, se = _estimate(config, 1, gi, psi, pairs, threads)
        ps.append(p[0])
        pd.append(p[1])
        ss.append(se[0])
        sd.append(se[1])
    return SimulationResult(
        axis="distance",
        grid=np.asarray(config.distances, dtype=np.float64),
        p_sparse=np.asarray(ps),
        p_dense=np.asarray(pd),
        se_sparse=np.asarray(ss),
        se_dense=np.asarray(sd),
        trials=config.trials,
        seed=config.seed,
    )
