"""Write a synthetic table pool to a directory.

Usage: python scripts/generate_pool.py OUT_DIR [--n 500] [--seed 0]
"""

import argparse

from tablescout.synth import random_pool
from tablescout.tables import write_pool


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    pool = random_pool(args.n, seed=args.seed)
    write_pool(pool, args.out_dir)
    print(f"wrote {len(pool)} tables to {args.out_dir}")


if __name__ == "__main__":
    main()
