#!/usr/bin/env python3
"""Emit dissimilarity contour grids around a reference point on the
two-density square, for the Voronoi and tree ensembles side by side."""

import argparse
import sys
from pathlib import Path

from isoclust import build_ensemble, contour_grid, synth_two_density


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--psi", type=int, default=14)
    parser.add_argument("--t", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--resolution", type=int, default=60)
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    data = synth_two_density(200, 800, 4.0, seed=args.seed)
    reference = [0.5, 0.5]
    res = (args.resolution, args.resolution)

    for kind in ("anne", "iforest"):
        ensemble = build_ensemble(data, kind, args.psi, args.t, seed=args.seed)
        xs, ys, grid = contour_grid(ensemble, data, reference, res, bounds=((0, 1), (0, 1)))
        path = outdir / f"contour_{kind}.csv"
        with open(path, "w") as fh:
            fh.write(f"# kind={kind} psi={args.psi} t={args.t} seed={args.seed} ref={reference}\n")
            fh.write("y\\x," + ",".join(format(x, ".9g") for x in xs) + "\n")
            for i, y in enumerate(ys):
                fh.write(format(y, ".9g") + "," + ",".join(format(v, ".9g") for v in grid[i]) + "\n")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
