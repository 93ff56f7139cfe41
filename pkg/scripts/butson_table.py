"""Rebuild the obstruction table for circulant Butson matrices."""

import argparse
import time

from circhad.butson import DEFAULT_BUDGET, obstruction_table, table_csv, table_grid, turyn_l9_analysis


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=9)
    ap.add_argument("--l-max", type=int, default=9)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--csv", default=None, help="also write the table as CSV")
    args = ap.parse_args()
    t = time.time()
    reps = obstruction_table(range(2, args.n_max + 1), range(2, args.l_max + 1),
                             budget=args.budget, workers=args.threads)
    print(table_grid(reps))
    print(f"{len(reps)} cells in {time.time() - t:.1f}s")
    for r in reps:
        if r.status == "blank_unknown":
            print(f"blank ({r.n}, {r.l}): {r.notes}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(table_csv(reps))
    a = turyn_l9_analysis(6)
    print("l=9, N=6: class patterns", a["class_patterns"], "solutions", a["n_solutions"])


if __name__ == "__main__":
    main()
