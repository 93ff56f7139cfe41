"""Check the named minima and rediscover them by multistart search."""

import argparse
import json
import time

from circhad.optimize import NAMED_MINIMA, OptimizerConfig, minimize_phi, verify_named_minima


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--starts", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sizes", default="4,8,12,16")
    args = ap.parse_args()
    for key in NAMED_MINIMA:
        print(f"{key}: Phi = {verify_named_minima(key):.12f}")
    cfg = OptimizerConfig(starts=args.starts, seed=args.seed)
    for n in map(int, args.sizes.split(",")):
        t = time.time()
        res = minimize_phi(n, "real_symmetric", cfg)
        out = res.to_json()
        out["seconds"] = round(time.time() - t, 2)
        print(json.dumps(out, sort_keys=True))


if __name__ == "__main__":
    main()
