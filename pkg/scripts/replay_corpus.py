"""Replay the bundled persona corpus and print the metrics report.

Runs every case through all three trigger modes on the deterministic
local backends, so the output is identical from run to run.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from recallkit.harness import DEFAULT_QUERY_MS_PER_CHAR, DEFAULT_TICK_MS, replay_corpus


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--json",
        type=pathlib.Path,
        default=None,
        metavar="PATH",
        help="also write the full report as JSON to PATH",
    )
    parser.add_argument(
        "--tick-ms",
        type=int,
        default=DEFAULT_TICK_MS,
        help="virtual milliseconds charged per backend generation",
    )
    parser.add_argument(
        "--query-ms-per-char",
        type=int,
        default=DEFAULT_QUERY_MS_PER_CHAR,
        help="simulated speaking time per character of a voiced question",
    )
    args = parser.parse_args(argv)

    report = replay_corpus(tick_ms=args.tick_ms, query_ms_per_char=args.query_ms_per_char)
    sys.stdout.write(report.render_table())
    if args.json is not None:
        args.json.write_text(report.to_json(), encoding="utf-8")
        print(f"wrote {args.json}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
