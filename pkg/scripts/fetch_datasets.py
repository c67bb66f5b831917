#!/usr/bin/env python3
"""Download the UCI new-thyroid and seeds datasets into data/ as CSVs with
a trailing "label" column (needs network access to archive.ics.uci.edu).

These two files unlock the thyroid and seeds rows of the benchmark
acceptance tests; without them those tests skip.
"""

import io
import sys
from pathlib import Path

import numpy as np
import requests

from isoclust import Dataset, save_csv

OUT = Path(__file__).resolve().parent.parent / "data"

THYROID_URL = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/"
    "thyroid-disease/new-thyroid.data"
)
SEEDS_URL = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/00236/seeds_dataset.txt"
)


def fetch(url: str) -> str:
    response = requests.get(url, timeout=30)
    response.raise_for_status()
    return response.text


def main() -> int:
    OUT.mkdir(exist_ok=True)

    # new-thyroid: class is the FIRST comma-separated column, classes 1..3
    raw = fetch(THYROID_URL)
    rows = [line.split(",") for line in raw.strip().splitlines()]
    labels = np.array([int(r[0]) - 1 for r in rows])
    points = np.array([[float(v) for v in r[1:]] for r in rows])
    save_csv(Dataset(points=points, labels=labels, name="new_thyroid"), OUT / "new_thyroid.csv")
    print(f"wrote {OUT / 'new_thyroid.csv'} ({len(rows)} rows)")

    # seeds: whitespace-separated, class is the LAST column, classes 1..3
    raw = fetch(SEEDS_URL)
    table = np.loadtxt(io.StringIO(raw))
    save_csv(
        Dataset(points=table[:, :-1], labels=table[:, -1].astype(int) - 1, name="seeds"),
        OUT / "seeds.csv",
    )
    print(f"wrote {OUT / 'seeds.csv'} ({table.shape[0]} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
