"""Benchmark retrieval latency over a synthetic memory store.

Fills a store with random unit vectors and times end-to-end answer
generation against the deterministic mock backend.
"""

from __future__ import annotations

import argparse
import json
import sys

from recallkit.harness import bench_store


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--blocks", type=int, default=10_000, help="memory blocks to insert")
    parser.add_argument("--queries", type=int, default=50, help="timed queries to run")
    parser.add_argument("--seed", type=int, default=7, help="RNG seed for vectors and queries")
    args = parser.parse_args(argv)

    stats = bench_store(n_blocks=args.blocks, n_queries=args.queries, seed=args.seed)
    json.dump(stats, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
