"""Gap between the best symmetric value of Phi and N^2 for even N."""

import argparse

from circhad.optimize import OptimizerConfig, gap_scan, gap_scan_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=16)
    ap.add_argument("--starts", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = gap_scan(args.n_max, OptimizerConfig(starts=args.starts, seed=args.seed))
    print(gap_scan_csv(rows), end="")


if __name__ == "__main__":
    main()
