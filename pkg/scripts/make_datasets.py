#!/usr/bin/env python3
"""Export the bundled scikit-learn benchmark datasets and the synthetic
generators to CSV files under data/, ready for the CLI and the bench
manifest."""

import sys
from pathlib import Path

from sklearn.datasets import load_breast_cancer, load_iris, load_wine

from isoclust import Dataset, save_csv, synth_three_cluster_hard, synth_two_density

OUT = Path(__file__).resolve().parent.parent / "data"


def main() -> int:
    OUT.mkdir(exist_ok=True)
    for loader, name in ((load_iris, "iris"), (load_wine, "wine"), (load_breast_cancer, "wdbc")):
        bunch = loader()
        save_csv(Dataset(points=bunch.data, labels=bunch.target, name=name), OUT / f"{name}.csv")
        print(f"wrote {OUT / f'{name}.csv'}")
    save_csv(synth_two_density(200, 800, 4.0, seed=0), OUT / "two_density.csv")
    save_csv(synth_three_cluster_hard(0), OUT / "three_cluster_hard.csv")
    print(f"wrote {OUT / 'two_density.csv'}")
    print(f"wrote {OUT / 'three_cluster_hard.csv'}")

    manifest = OUT / "manifest.csv"
    rows = ["name,path,label"]
    for name in ("iris", "wine", "wdbc", "two_density", "three_cluster_hard"):
        rows.append(f"{name},{OUT / f'{name}.csv'},label")
    manifest.write_text("\n".join(rows) + "\n")
    print(f"wrote {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
