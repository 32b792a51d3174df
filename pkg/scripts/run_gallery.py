"""Run the verify pipeline on every gallery entry and write one JSON report each.

    python3 scripts/run_gallery.py --grid 5 --out reports/
"""

import argparse
import contextlib
import io
import json
import pathlib
import sys

from qtwist.cli import main
from qtwist.gallery import GALLERY, get_entry


def run(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, json.loads(buf.getvalue()) if buf.getvalue().strip() else {}


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=5)
    ap.add_argument("--grid-8d", type=int, default=2, help="grid for 8-dimensional entries (points grow as grid^8)")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="reports")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for eid in GALLERY:
        grid = args.grid_8d if get_entry(eid).chart.dim_r == 8 else args.grid
        path = out / f"{eid}.json"
        code, doc = run(["verify", "--example", eid, "--grid", str(grid), "--seed", str(args.seed),
                         "--output-path", str(path)])
        worst = max(worst, code)
        print(f"{eid:15s} verdict={doc.get('verdict')} cond_i={doc['cond_i']['max']:.2e} "
              f"n2={doc['cond_iii']['n2_max']:.2e} exit={code}", file=sys.stderr)
    sys.exit(worst)
