#!/usr/bin/env python3
"""Convert the MASS `Aids2` table to the `start,end,status` format read by
`censtail convert`.

Usage: export_aids2.py Aids2.csv [out.csv]

The source columns `diag` and `death` are day counts since 1960-01-01;
`status` is `D` or `A`. Rows keep their original order.
"""

import csv
import sys
from datetime import date, timedelta

EPOCH = date(1960, 1, 1)


def main(argv):
    if len(argv) not in (2, 3):
        sys.exit(__doc__)
    out = open(argv[2], "w", newline="") if len(argv) == 3 else sys.stdout
    with open(argv[1], newline="") as src:
        rows = csv.DictReader(src)
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["start", "end", "status"])
        for r in rows:
            start = EPOCH + timedelta(days=int(r["diag"]))
            end = EPOCH + timedelta(days=int(r["death"]))
            w.writerow([start.isoformat(), end.isoformat(), r["status"]])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main(sys.argv)
