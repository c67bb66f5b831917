"""Command-line front door: similarity | cluster | sweep | simulate |
contour | bench.

Every run is fully determined by its flags (plus an optional flat
key=value config file that flags override), and every output file starts
with a provenance header echoing the effective configuration. The
--threads flag only caps worker counts; results are identical for any
value, so it is not part of the echoed config.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import dbscan, density_peaks, save_clustering_csv
from .dataset import Dataset, load_csv, min_max_normalize, synth_two_density
from .evaluation import (
    ALGORITHMS,
    ParamGrid,
    default_grid,
    f1_score,
    grid_search,
    save_sweep_csv,
)
from .partition import KIND_ANNE, KIND_IFOREST, build_ensemble
from .similarity import (
    EUCLIDEAN,
    dissimilarity_matrix,
    contour_grid,
    load_matrix_npz,
    save_matrix_csv,
    save_matrix_npz,
)
from .simulate import default_config, simulate_vs_distance, simulate_vs_psi

_CONFIG_ONLY = {"threads", "config", "func", "command"}


def _provenance(command: str, args: argparse.Namespace) -> tuple[str, ...]:
    lines = [f"isoclust {__version__}", f"command: {command}"]
    for key in sorted(vars(args)):
        if key in _CONFIG_ONLY:
            continue
        value = getattr(args, key)
        if value is not None:
            lines.append(f"{key}={value}")
    return tuple(lines)


def _apply_config_file(args: argparse.Namespace, parser_defaults: dict) -> None:
    """Fill unset flags from a flat key=value file; flags win."""
    if not getattr(args, "config", None):
        return
    path = Path(args.config)
    if not path.exists():
        raise FileNotFoundError(f"no such config file: {path}")
    for ln, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {ln}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if not hasattr(args, key):
            raise ValueError(f"{path}: line {ln}: unknown key {key!r}")
        if getattr(args, key) is None or getattr(args, key) == parser_defaults.get(key):
            current = parser_defaults.get(key)
            caster = type(current) if current is not None else str
            if caster is bool:
                setattr(args, key, value.lower() in ("1", "true", "yes"))
            else:
                setattr(args, key, caster(value) if caster is not str else value)


def _load_data(args: argparse.Namespace) -> Dataset:
    label = args.label
    if label is not None:
        try:
            label = int(label)
        except ValueError:
            pass
    data = load_csv(args.data, label_column=label)
    if getattr(args, "normalize", False):
        data, _ = min_max_normalize(data)
    return data


def _int_list(spec: str) -> tuple[int, ...]:
    """Parse "2:40" (inclusive range), "2:40:5" (count), or "2,5,7"."""
    if ":" in spec:
        parts = [int(p) for p in spec.split(":")]
        if len(parts) == 2:
            return tuple(range(parts[0], parts[1] + 1))
        lo, hi, num = parts
        return tuple(np.unique(np.rint(np.linspace(lo, hi, num)).astype(int)).tolist())
    return tuple(int(p) for p in spec.split(","))


def _float_list(spec: str) -> tuple[float, ...]:
    """Parse "0.001:0.999:101" (linspace) or "0.1,0.2,0.3"."""
    if ":" in spec:
        lo, hi, num = spec.split(":")
        return tuple(np.round(np.linspace(float(lo), float(hi), int(num)), 12).tolist())
    return tuple(float(p) for p in spec.split(","))


def _build_from_flags(data: Dataset, args: argparse.Namespace):
    if args.psi is None:
        raise ValueError(f"--psi is required for kind {args.kind!r}")
    if args.psi < 1:
        raise ValueError(f"psi must be >= 1, got {args.psi}")
    return build_ensemble(data, args.kind, args.psi, args.t, args.seed)


def cmd_similarity(args: argparse.Namespace) -> int:
    data = _load_data(args)
    if args.kind == EUCLIDEAN:
        matrix = dissimilarity_matrix(data, EUCLIDEAN)
    else:
        ensemble = _build_from_flags(data, args)
        matrix = dissimilarity_matrix(data, ensemble, threads=args.threads)
    out = Path(args.out)
    if out.suffix == ".npz":
        matrix.provenance["config"] = list(_provenance("similarity", args))
        save_matrix_npz(matrix, out)
    else:
        save_matrix_csv(matrix, out, header_lines=_provenance("similarity", args))
    print(f"wrote {out} ({matrix.n}x{matrix.n}, kind={matrix.kind})")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    data = _load_data(args)
    if args.matrix:
        matrix = load_matrix_npz(args.matrix)
        if matrix.n != data.n:
            raise ValueError(f"matrix is {matrix.n}x{matrix.n} but dataset has n={data.n}")
    elif args.kind == EUCLIDEAN:
        matrix = dissimilarity_matrix(data, EUCLIDEAN)
    else:
        ensemble = _build_from_flags(data, args)
        matrix = dissimilarity_matrix(data, ensemble, threads=args.threads)
    if args.algorithm == "dbscan":
        result = dbscan(matrix, args.cutoff, args.min_points)
    elif args.algorithm == "dp":
        result = density_peaks(matrix, args.k, args.cutoff)
    else:
        raise ValueError(f"unknown clustering algorithm {args.algorithm!r}")
    save_clustering_csv(result, args.out, header_lines=_provenance("cluster", args))
    line = f"wrote {args.out} (clusters={result.n_clusters})"
    if data.labels is not None:
        report = f1_score(result, data.labels)
        line += f" f1={report.macro_f1:.6f}"
    print(line)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    data = _load_data(args)
    grid = default_grid(data, args.algorithm)
    overrides = {}
    if args.cutoffs:
        overrides["cutoffs"] = _float_list(args.cutoffs)
    if args.min_points:
        overrides["min_points"] = _int_list(args.min_points)
    if args.k_values:
        overrides["k_values"] = _int_list(args.k_values)
    if args.psi_values:
        overrides["psi_values"] = _int_list(args.psi_values)
    if args.t:
        overrides["t"] = args.t
    if overrides:
        grid = ParamGrid(
            cutoffs=overrides.get("cutoffs", grid.cutoffs),
            min_points=overrides.get("min_points", grid.min_points),
            k_values=overrides.get("k_values", grid.k_values),
            psi_values=overrides.get("psi_values", grid.psi_values),
            t=overrides.get("t", grid.t),
        )
    report = grid_search(
        data, args.algorithm, grid=grid, repeats=args.repeats, seed=args.seed, threads=args.threads
    )
    save_sweep_csv(report, args.out, header_lines=_provenance("sweep", args))
    print(f"wrote {args.out} best={report.best.params} mean_f1={report.best.mean_f1:.6f}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = default_config(seed=args.seed, trials=args.trials)
    if args.mode == "psi":
        result = simulate_vs_psi(config, threads=args.threads)
    elif args.mode == "distance":
        result = simulate_vs_distance(config, psi=args.psi, threads=args.threads)
    else:
        raise ValueError(f"unknown simulation mode {args.mode!r}")
    result.to_csv(args.out, header_lines=_provenance("simulate", args))
    print(f"wrote {args.out} ({len(result.grid)} grid points, trials={result.trials})")
    return 0


def cmd_contour(args: argparse.Namespace) -> int:
    data = _load_data(args)
    ensemble = build_ensemble(data, args.kind, args.psi, args.t, args.seed)
    reference = np.array([float(v) for v in args.ref.split(",")])
    nx, ny = (int(v) for v in args.resolution.split(","))
    bounds = None
    if args.bounds:
        x0, x1, y0, y1 = (float(v) for v in args.bounds.split(","))
        bounds = ((x0, x1), (y0, y1))
    xs, ys, grid = contour_grid(ensemble, data, reference, (nx, ny), bounds)
    with open(args.out, "w", newline="") as fh:
        for line in _provenance("contour", args):
            fh.write(f"# {line}\n")
        fh.write("y\\x," + ",".join(format(x, ".9g") for x in xs) + "\n")
        for i, y in enumerate(ys):
            fh.write(format(y, ".9g") + "," + ",".join(format(v, ".9g") for v in grid[i]) + "\n")
    print(f"wrote {args.out} ({ny}x{nx} grid)")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    manifest = Path(args.manifest)
    if not manifest.exists():
        raise FileNotFoundError(f"no such manifest: {manifest}")
    algorithms = tuple(args.algorithms.split(","))
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm spec {algo!r}; expected one of {ALGORITHMS}")
    entries = []
    with open(manifest, newline="") as fh:
        for row in csv.DictReader(fh):
            entries.append(row)
    if not entries:
        raise ValueError(f"{manifest}: no datasets listed")
    with open(args.out, "w", newline="") as fh:
        for line in _provenance("bench", args):
            fh.write(f"# {line}\n")
        fh.write("dataset,algorithm,best_f1,std_f1,best_params\n")
        for entry in entries:
            label_spec = entry.get("label") or None
            if label_spec is not None:
                try:
                    label_spec = int(label_spec)
                except ValueError:
                    pass
            data = load_csv(entry["path"], label_column=label_spec)
            data, _ = min_max_normalize(data)
            for algo in algorithms:
                report = grid_search(
                    data, algo, repeats=args.repeats, seed=args.seed, threads=args.threads
                )
                params = ";".join(f"{k}={v}" for k, v in report.best.params.items())
                fh.write(
                    f"{entry['name']},{algo},{report.best.mean_f1:.9g},"
                    f"{report.best.std_f1:.9g},{params}\n"
                )
                fh.flush()
                print(f"{entry['name']} {algo}: best mean F1 {report.best.mean_f1:.4f}")
    print(f"wrote {args.out}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    from .dataset import save_csv, synth_three_cluster_hard

    if args.generator == "two-density":
        data = synth_two_density(args.n_sparse, args.n_dense, args.ratio, args.seed)
    elif args.generator == "three-cluster-hard":
        data = synth_three_cluster_hard(args.seed)
    else:
        raise ValueError(f"unknown generator {args.generator!r}")
    save_csv(data, args.out, header_lines=_provenance("synth", args))
    print(f"wrote {args.out} (n={data.n}, d={data.d})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoclust", description=__doc__)
    parser.add_argument("--version", action="version", version=f"isoclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--threads", type=int, default=1, help="worker cap; never affects results")
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--out", required=True, help="output file path")

    def data_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data", required=True, help="dataset CSV path")
        p.add_argument("--label", default=None, help="label column index or header name")
        p.add_argument("--normalize", action="store_true", help="min-max normalize to [0,1]")

    p = sub.add_parser("similarity", help="write a dissimilarity matrix")
    data_flags(p)
    p.add_argument("--kind", choices=(KIND_ANNE, KIND_IFOREST, EUCLIDEAN), default=KIND_ANNE)
    p.add_argument("--psi", type=int, default=None)
    p.add_argument("--t", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("cluster", help="run dbscan or density peaks")
    data_flags(p)
    p.add_argument("--algorithm", choices=("dbscan", "dp"), default="dbscan")
    p.add_argument("--matrix", help="reuse a saved .npz dissimilarity matrix")
    p.add_argument("--kind", choices=(KIND_ANNE, KIND_IFOREST, EUCLIDEAN), default=EUCLIDEAN)
    p.add_argument("--psi", type=int, default=None)
    p.add_argument("--t", type=int, default=200)
    p.add_argument("--cutoff", type=float, default=0.1, help="epsilon / alpha / d_c")
    p.add_argument("--min-points", type=int, default=4, dest="min_points")
    p.add_argument("--k", type=int, default=3, help="density-peaks target cluster count")
    common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("sweep", help="grid-search a parameter range")
    data_flags(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--cutoffs", help='e.g. "0.001:0.999:101" or "0.1,0.2"')
    p.add_argument("--min-points", dest="min_points", help='e.g. "2:40"')
    p.add_argument("--k-values", dest="k_values", help='e.g. "2:40"')
    p.add_argument("--psi-values", dest="psi_values", help='e.g. "2,16,64"')
    p.add_argument("--t", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="same-cell probability curves")
    p.add_argument("--mode", choices=("psi", "distance"), default="psi")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--psi", type=int, default=15, help="fixed psi for the distance sweep")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("contour", help="dissimilarity contour grid on 2-D data")
    data_flags(p)
    p.add_argument("--kind", choices=(KIND_ANNE, KIND_IFOREST), default=KIND_ANNE)
    p.add_argument("--psi", type=int, default=14)
    p.add_argument("--t", type=int, default=200)
    p.add_argument("--ref", required=True, help="reference point, e.g. 0.5,0.5")
    p.add_argument("--resolution", default="50,50", help="nx,ny grid vertices")
    p.add_argument("--bounds", help="x0,x1,y0,y1 (default: data range)")
    common(p)
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("bench", help="Table-style benchmark over a dataset manifest")
    p.add_argument("--manifest", required=True, help="CSV with columns name,path,label")
    p.add_argument("--algorithms", default="dbscan,mbscan-anne,mbscan-iforest,dp")
    p.add_argument("--repeats", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--generator", choices=("two-density", "three-cluster-hard"), required=True)
    p.add_argument("--n-sparse", type=int, default=100, dest="n_sparse")
    p.add_argument("--n-dense", type=int, default=400, dest="n_dense")
    p.add_argument("--ratio", type=float, default=4.0)
    common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        defaults = {
            action.dest: action.default
            for action in parser._subparsers._group_actions[0].choices[args.command]._actions
        }
        _apply_config_file(args, defaults)
        return args.func(args)
    except (ValueError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
