"""Scan chi^2 conventions (weighting x window) for the slit-width fit.

Prints the width reductions at beta_E0 = 1/2 and 1/5 for each convention and
flags those inside the 1.0-2.0 % / 0.6-1.4 % bands.

    python scripts/convention_scan.py [--bins 201 2001]
"""
import argparse
import math

from pilotwave.fitting import scan_conventions
from pilotwave.model import ExperimentGeometry


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bins", type=int, nargs="+", default=[201])
    ap.add_argument("--pilot-wavelength", type=float, default=2e-9)
    args = ap.parse_args()

    rows = scan_conventions(
        ExperimentGeometry(),
        2 * math.pi / args.pilot_wavelength,
        theta_ranges_over_pi=(1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0),
        bins=args.bins,
    )
    print(f"{'weighting':>9} {'window/pi':>9} {'bins':>5} {'b=1/2 %':>8} {'b=1/5 %':>8}  in band")
    for r in rows:
        print(f"{r.weighting:>9} {r.theta_range_over_pi:9.1f} {r.bins:5d} "
              f"{r.reduction_half:8.3f} {r.reduction_fifth:8.3f}  {'yes' if r.in_band else ''}")


if __name__ == "__main__":
    main()
