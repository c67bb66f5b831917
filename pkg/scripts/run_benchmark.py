#!/usr/bin/env python3
"""Best-F1 benchmark over the data/ manifest: every algorithm, full
default grids, mean of 10 trials for the randomized similarities.

Run scripts/make_datasets.py first (and scripts/fetch_datasets.py when
network is available) to populate data/.
"""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    manifest = ROOT / "data" / "manifest.csv"
    if not manifest.exists():
        print(f"{manifest} missing; run scripts/make_datasets.py first", file=sys.stderr)
        return 1
    out = ROOT / "results" / "benchmark.csv"
    out.parent.mkdir(exist_ok=True)
    cmd = [
        sys.executable, "-m", "isoclust", "bench",
        "--manifest", str(manifest),
        "--algorithms", "dbscan,mbscan-anne,mbscan-iforest,dp",
        "--repeats", "10",
        "--seed", "0",
        "--out", str(out),
    ]
    return subprocess.call(cmd)


if __name__ == "__main__":
    sys.exit(main())
