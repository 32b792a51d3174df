"""Measure c in (d alpha)^{0,2}(X, Y) = c * alpha(N(X, Y)).

Samples random non-integrable structures (rotated flat structure, random
rotation strength and embedding), random (1,0)-forms and (0,1)-fields,
and reports the spread of the ratio.  Writes a small JSON calibration file.
"""

import argparse
import json

import numpy as np

from qtwist import dual as dn
from qtwist.gallery import rotation_fields
from qtwist.geometry import QuaternionicChart, VectorField, form_10, form_bracket_ratio, induced_acs, vector_01


def affine_field(rng):
    a, b = rng.normal(size=4), rng.normal(size=(4, 4))
    return VectorField(4, lambda p: b @ dn.lift(p) + a)


def measure(n, seed):
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(n):
        chart = QuaternionicChart(1, -np.ones(4), np.ones(4), rotation_fields(rng.uniform(0.1, 0.6)), validate=False)
        u = rng.normal(size=3)
        J = induced_acs(chart, u / np.linalg.norm(u))
        b0, b1 = rng.normal(size=4), rng.normal(size=(4, 4))
        alpha = form_10(J, lambda p, b0=b0, b1=b1: b0 + b1 @ dn.lift(p))
        X, Y = vector_01(J, affine_field(rng)), vector_01(J, affine_field(rng))
        ratios.append(form_bracket_ratio(J, alpha, X, Y, rng.uniform(-0.8, 0.8, 4)))
    return np.array(ratios)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--output", default="form_constant.json")
    args = ap.parse_args()
    r = measure(args.samples, args.seed)
    c = complex(np.median(r.real), np.median(r.imag))
    rep = {
        "constant": [c.real, c.imag],
        "max_deviation": float(np.abs(r - c).max()),
        "samples": args.samples,
        "seed": args.seed,
    }
    with open(args.output, "w") as fh:
        json.dump(rep, fh, indent=2, sort_keys=True)
    print(json.dumps(rep, indent=2, sort_keys=True))
