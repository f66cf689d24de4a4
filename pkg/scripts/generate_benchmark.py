"""Write a planted-relevance pool + benchmark pair to disk.

The pool lands in OUT_DIR/tables, the benchmark files (queries.jsonl,
qrels.tsv, manifest.json, queries/) at OUT_DIR, so OUT_DIR works both as a
benchmark directory and, via OUT_DIR/tables, as the pool to index.

Usage: python scripts/generate_benchmark.py OUT_DIR [--queries 100] [--pool-size 500] [--seed 0]
"""

import argparse
from pathlib import Path

from tablescout.synth import planted_benchmark
from tablescout.tables import write_benchmark, write_pool


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--pool-size", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out_dir)
    pool, bench = planted_benchmark(n_queries=args.queries, pool_size=args.pool_size, seed=args.seed)
    write_pool(pool, out / "tables")
    write_benchmark(bench, out)
    print(f"wrote {len(pool)} tables, {len(bench.queries)} queries, {len(bench.qrels)} qrels to {out}")


if __name__ == "__main__":
    main()
