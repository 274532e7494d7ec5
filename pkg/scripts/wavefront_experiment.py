#!/usr/bin/env python3
"""Wave-front correlation experiment.

For the drift b = -t the sign condition holds exactly in the -x covector.
Scanning boundary-value data 1/(x + i delta) for shrinking delta shows the
matching asymmetry: the -x direction decays strictly faster than +x.  Writes
per-direction magnitude tables as CSV next to this script (or to the
directory given as argv[1])."""

import sys
from pathlib import Path

import numpy as np

from involucalc.algebra import Poly
from involucalc.approx import NormalFormField, field_vars
from involucalc.fbi import direction_scan, sample_data, sign_condition

HW, WSUP, WPLAT, KAPPA, N = 0.5, 0.95, 0.95 * 0.75, 1.0, 256
RADII = list(np.logspace(np.log10(1.2), np.log10(120.0), 7))


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    outdir.mkdir(parents=True, exist_ok=True)
    vars = field_vars(1)
    field = NormalFormField(1, (-Poly.var(vars, "t"),))
    for xi0 in ((-1,), (1,)):
        r = sign_condition(field, xi0)
        print(f"sign condition at xi0 = {xi0[0]:+d}: value {r.value} -> "
              f"{'Holds' if r.holds else 'Fails'}")
    for delta in (0.1, 0.05, 0.025):
        data = sample_data(
            lambda X, T, d=delta: 1.0 / (X + 1j * d),
            halfwidth=HW, n=N, window_support=WSUP, window_plateau=WPLAT,
        )
        scan = direction_scan(data, KAPPA, (0.0, 0.0), 2, RADII)
        gap = scan.slopes[0] - scan.slopes[1]
        print(
            f"delta = {delta}: slope(+x) = {scan.slopes[0]:+.2f}, "
            f"slope(-x) = {scan.slopes[1]:+.2f}, gap = {gap:.2f}"
        )
        path = outdir / f"wavefront_delta_{str(delta).replace('.', 'p')}.csv"
        scan.write_csv(path)
        print(f"  csv: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
