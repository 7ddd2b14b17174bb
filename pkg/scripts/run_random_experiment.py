"""Monitor cost of asynchronous OD on random corpora of growing size.

Prints a CSV row per trace count; traces arrive one per round.
"""

import argparse
import sys

from hyperpt.bench import grid, to_csv
from hyperpt.gen import GenParams
from hyperpt.monitor import MonitorOptions
from hyperpt.od import od_async


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--counts", default="50,100,200")
    ap.add_argument("--length", type=int, default=50)
    ap.add_argument("--low-in", type=float, default=10.0)
    ap.add_argument("--low-out", type=float, default=10.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--stop-at-violation", action="store_true")
    ap.add_argument("--out", help="CSV file (default stdout)")
    args = ap.parse_args(argv)

    base = GenParams("random", low_in_pct=args.low_in, low_out_pct=args.low_out, seed=args.seed)
    opts = MonitorOptions.od_profile(collect_all=not args.stop_at_violation)
    counts = [int(x) for x in args.counts.split(",")]
    rows = grid(od_async(), base, counts, [args.length], opts, args.repeat)
    text = to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for r in rows:
        print(f"n={r.traces}: maxWorkbag/n = {r.max_workbag / r.traces:.2f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
