"""Dataset loading, min-max normalization, and synthetic generators."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset",
    "NormalizationReport",
    "load_csv",
    "save_csv",
    "min_max_normalize",
    "synth_two_density",
    "synth_three_cluster_hard",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x d point matrix with optional integer class labels.

    Immutable after construction; every value must be finite and, when
    labels are present, their length must equal the number of rows.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be a non-empty 2-D matrix, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            r, c = np.argwhere(~np.isfinite(pts))[0]
            raise ValueError(f"non-finite value at row {r}, column {c}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.shape != (pts.shape[0],):
                raise ValueError(
                    f"labels length {lab.shape[0] if lab.ndim == 1 else lab.shape} "
                    f"does not match n={pts.shape[0]}"
                )
            if np.any(lab < 0):
                raise ValueError("labels must be non-negative integers")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class NormalizationReport:
    """Per-attribute min/max used by min_max_normalize, plus the columns
    that were constant (mapped to 0 rather than dropped)."""

    minimum: tuple[float, ...]
    maximum: tuple[float, ...]
    constant_attributes: frozenset[int] = field(default_factory=frozenset)


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path: str | Path, label_column: int | str | None = None) -> Dataset:
    """Load a comma-separated dataset, optionally extracting a label column.

    A header row is auto-detected: the first row is a header when some
    column fails to parse as a number there but parses in the second row.
    Lines starting with '#' are treated as comments and skipped.
    Label values that are already non-negative integers are kept verbatim
    (so save/load round-trips); anything else is recoded to dense
    integers in order of first appearance.

    ``label_column`` may be a 0-based column index (negative allowed) or a
    header name (requires a header row).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and not row[0].lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty file")

    width = len(rows[0])
    for ln, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: ragged row {ln + 1}: expected {width} cells, got {len(row)}")

    parsed = [[_parse_float(c.strip()) for c in row] for row in rows[:2]]
    header: list[str] | None = None
    if len(rows) > 1 and any(p0 is None and p1 is not None for p0, p1 in zip(parsed[0], parsed[1])):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]

    if isinstance(label_column, str):
        if header is None:
            raise ValueError(f"{path}: label column {label_column!r} given by name but file has no header")
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise ValueError(f"{path}: no header column named {label_column!r}") from None
    elif label_column is not None:
        label_idx = label_column % width
        if not 0 <= label_idx < width:
            raise ValueError(f"{path}: label column {label_column} out of range for width {width}")
    else:
        label_idx = None

    feature_cols = [j for j in range(width) if j != label_idx]
    points = np.empty((len(rows), len(feature_cols)), dtype=np.float64)
    offset = 2 if header is not None else 1
    for i, row in enumerate(rows):
        for k, j in enumerate(feature_cols):
            v = _parse_float(row[j].strip())
            if v is None:
                raise ValueError(
                    f"{path}: non-numeric cell {row[j]!r} at row {i + offset}, column {j + 1}"
                )
            points[i, k] = v

    labels = None
    if label_idx is not None:
        raw = [row[label_idx].strip() for row in rows]
        try:
            as_int = [int(cell) for cell in raw]
        except ValueError:
            as_int = None
        if as_int is not None and min(as_int) >= 0:
            labels = np.asarray(as_int, dtype=np.int64)
        else:
            codes: dict[str, int] = {}
            labels = np.asarray([codes.setdefault(c, len(codes)) for c in raw], dtype=np.int64)

    return Dataset(points=points, labels=labels, name=path.stem)


def save_csv(data: Dataset, path: str | Path, header_lines: tuple[str, ...] = ()) -> None:
    """Write a dataset as CSV with 9-significant-digit values.

    The label column, if present, is written last under the name "label".
    ``header_lines`` are emitted first as '#'-prefixed comments.
    """
    path = Path(path)
    names = [f"f{j}" for j in range(data.d)]
    if data.labels is not None:
        names.append("label")
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(data.n):
            cells = [format(v, ".9g") for v in data.points[i]]
            if data.labels is not None:
                cells.append(str(int(data.labels[i])))
            fh.write(",".join(cells) + "\n")


def min_max_normalize(data: Dataset) -> tuple[Dataset, NormalizationReport]:
    """Rescale each attribute to [0, 1]; constant attributes map to 0.

    Idempotent: applying it twice gives bit-identical values.
    """
    lo = data.points.min(axis=0)
    hi = data.points.max(axis=0)
    span = hi - lo
    constant = span == 0.0
    scaled = np.zeros_like(data.points)
    ok = ~constant
    scaled[:, ok] = (data.points[:, ok] - lo[ok]) / span[ok]
    report = NormalizationReport(
        minimum=tuple(lo.tolist()),
        maximum=tuple(hi.tolist()),
        constant_attributes=frozenset(np.nonzero(constant)[0].tolist()),
    )
    return Dataset(points=scaled, labels=data.labels, name=data.name), report


def synth_two_density(
    n_sparse: int, n_dense: int, density_ratio: float, seed: int
) -> Dataset:
    """Uniform points on the left half of the unit square plus a denser
    uniform batch on the right half; labels are 0 (left) and 1 (right).

    The halves have equal area, so the density ratio is n_dense/n_sparse;
    ``density_ratio`` is recorded in the dataset name as a declaration of
    intent rather than re-derived.
    """
    if n_sparse < 1 or n_dense < 1:
        raise ValueError("point counts must be >= 1")
    rng = np.random.default_rng(seed)
    left = rng.uniform([0.0, 0.0], [0.5, 1.0], size=(n_sparse, 2))
    right = rng.uniform([0.5, 0.0], [1.0, 1.0], size=(n_dense, 2))
    points = np.vstack([left, right])
    labels = np.concatenate([np.zeros(n_sparse, np.int64), np.ones(n_dense, np.int64)])
    return Dataset(points=points, labels=labels, name=f"two_density_r{density_ratio:g}_s{seed}")


def _truncated_blob(rng: np.random.Generator, centre, sigma: float, n: int) -> np.ndarray:
    """Isotropic Gaussian sample clipped to radius 2.5*sigma by rejection."""
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        batch = rng.normal(loc=centre, scale=sigma, size=(2 * (n - filled) + 8, 2))
        keep = batch[np.linalg.norm(batch - centre, axis=1) <= 2.5 * sigma]
        take = min(len(keep), n - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out


# Geometry of the hard three-cluster layout: two dense blobs whose tails
# overlap in a populated corridor, plus a far sparse blob. The corridor is
# locally denser than the sparse cluster's mode at every radius, which is
# what defeats a single global distance threshold.
_HARD_SPECS = (
    ((0.22, 0.28), 0.05, 400),
    ((0.44, 0.28), 0.05, 400),
    ((0.72, 0.72), 0.11, 200),
)


def synth_three_cluster_hard(seed: int) -> Dataset:
    """Two dense Gaussian-like clusters with overlapping tails plus one
    sparse cluster, on the unit square. Labels 0/1 dense, 2 sparse."""
    rng = np.random.default_rng(seed)
    parts, labels = [], []
    for lab, (centre, sigma, n) in enumerate(_HARD_SPECS):
        parts.append(_truncated_blob(rng, np.asarray(centre), sigma, n))
        labels.append(np.full(n, lab, dtype=np.int64))
    return Dataset(
        points=np.vstack(parts),
        labels=np.concatenate(labels),
        name=f"three_cluster_hard_s{seed}",
    )
