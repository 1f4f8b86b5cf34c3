"""Run every config in scripts/configs (or the ones named on the command line)."""

import sys
import time
from pathlib import Path

from utopian_gap.harness import load_config, run_experiment

HERE = Path(__file__).parent


def main(paths):
    paths = [Path(p) for p in paths] or sorted((HERE / "configs").glob("*.json"))
    for path in paths:
        start = time.perf_counter()
        result = run_experiment(load_config(path))
        print(f"{path.name}: {result.csv_path} ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main(sys.argv[1:])
