"""Mean gap reduction from revealing all size-(n-1) coalitions, by unanimity density."""

import argparse

import numpy as np

from utopian_gap.generators import Distribution
from utopian_gap.policies import GapEstimator, largest_first


def reduction(n, density, trials, seed):
    dist = Distribution("totally_monotonic", n, {"density": density})
    order = largest_first(n, n)
    before, after = [], []
    for j in range(trials):
        score = GapEstimator(dist.sample(seed, j))
        before.append(score(()))
        after.append(score(order))
    return 1 - np.mean(after) / np.mean(before)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--density", type=float, nargs="+", default=[1.0, 0.5, 0.2, 0.1, 0.05, 0.02])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("density," + ",".join(f"n={n}" for n in args.n))
    for d in args.density:
        cells = [f"{100 * reduction(n, d, args.trials, args.seed):.1f}%" for n in args.n]
        print(f"{d}," + ",".join(cells))


if __name__ == "__main__":
    main()
