"""Degree, splitting type and h0 staircase for H^n in standard and random bases."""

import argparse

import numpy as np

from qtwist.hmodule import HModule, localization_report

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--random-bases", type=int, default=2)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'module':>12} {'rank':>4} {'deg':>4}  splitting        h0(0,-1,-2)")
    for n in range(1, args.max_n + 1):
        mods = [("std", HModule.standard(n))]
        for k in range(args.random_bases):
            s = rng.normal(size=(4 * n, 4 * n)) + 3 * np.eye(4 * n)
            mods.append((f"rand{k}", HModule.standard(n).conjugated(s)))
        for tag, V in mods:
            r = localization_report(V)
            h = r["h0_table"]
            print(f"{f'H{n}/{tag}':>12} {r['rank']:>4} {r['degree']:>4}  {str(r['splitting_type']):16s} "
                  f"{h['0']},{h['-1']},{h['-2']}")
