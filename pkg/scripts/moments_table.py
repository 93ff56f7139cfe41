"""Exact and sampled moments of Phi, the C coefficients, and the p-norm route."""

import argparse

from circhad.moments import (c_table_csv, enveloping_moment_exact, phi_moment_bruteforce,
                             phi_moment_montecarlo, pnorm_min_estimate)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(c_table_csv(6), end="")
    print("N,p,enveloping,phi_exact,phi_mc,stderr")
    for n in range(2, 5):
        for p in range(1, 4):
            exact = phi_moment_bruteforce(n, p) if n ** (2 * p) <= 10 ** 7 else None
            mc = phi_moment_montecarlo(n, p, args.samples, seed=args.seed)
            print(f"{n},{p},{enveloping_moment_exact(n, p)},{exact},{mc.value:.4f},{mc.stderr:.4f}")
    for n in (4, 8):
        for row in pnorm_min_estimate(n, [1, 2, 4, 8, 16, 32], args.samples, seed=args.seed):
            print(f"pnorm N={n} p={row['p']}: {row['estimate']:.4f}")


if __name__ == "__main__":
    main()
