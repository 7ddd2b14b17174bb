"""Monitor cost of asynchronous OD on periodic corpora (all traces equal, so OD holds).

Every tuple is run to the end of its traces; the monitor cannot accept early.
"""

import argparse
import sys

from hyperpt.bench import grid, to_csv
from hyperpt.gen import GenParams
from hyperpt.monitor import MonitorOptions
from hyperpt.od import od_async


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--counts", default="10,20,40")
    ap.add_argument("--lengths", default="100,1000")
    ap.add_argument("--period", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--out", help="CSV file (default stdout)")
    args = ap.parse_args(argv)

    base = GenParams("periodic", period=args.period)
    counts = [int(x) for x in args.counts.split(",")]
    lengths = [int(x) for x in args.lengths.split(",")]
    rows = grid(od_async(), base, counts, lengths, MonitorOptions.od_profile(), args.repeat)
    text = to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.verdict == "clean" for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
