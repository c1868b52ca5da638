#!/usr/bin/env python3
"""Phase estimation average variance vs probe energy.

Produces the data behind the squeezed-vs-coherent comparisons: for each
squeezing strength the average posterior variance is tabulated against
the mean photon number, for heterodyne (series) and homodyne (numeric)
detection.
"""

import argparse
import math

import numpy as np

from gaussbayes import phase
from gaussbayes.harness import format_value
from gaussbayes.measurement import HETERODYNE, homodyne
from gaussbayes.phasespace import ProbeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--detection", choices=("heterodyne", "homodyne"),
                    default="heterodyne")
    ap.add_argument("--r", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
    ap.add_argument("--psi", type=float, default=0.0,
                    help="squeezing angle (homodyne only)")
    ap.add_argument("--n", type=float, nargs="+",
                    default=list(np.round(np.linspace(0.25, 4.0, 16), 4)))
    ap.add_argument("--out", default="phase_sweep.csv")
    args = ap.parse_args()

    lines = ["detection,r,psi,n,alpha,avg_variance"]
    for r in args.r:
        for n in args.n:
            rest = n - math.sinh(r) ** 2
            if rest < 0 or (args.detection == "heterodyne" and rest == 0):
                continue
            alpha = math.sqrt(rest)
            if args.detection == "heterodyne":
                psi = math.pi if r > 0 else 0.0
                value = (phase.coherent_het_average_variance(alpha) if r == 0
                         else phase.squeezed_het_average_variance(alpha, r))
            else:
                psi = args.psi
                task = phase.PhaseTask(ProbeSpec(alpha, r, psi), homodyne())
                value = phase.average_variance_numeric(task).value
            lines.append(",".join(format_value(v) for v in
                                  (args.detection, r, psi, n, alpha, value)))
    with open(args.out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} rows to {args.out}")


if __name__ == "__main__":
    main()
