"""Where does the alternating example start to trap orbits?

For each dwell time on the quarter ladder, prints where field 0 carries the
point 1/2 and the resulting gap below the upper saddle. The first negative
value in the second column is the dwell time the example uses.
"""

import argparse

from morseflow.flow import integrate_segment
from morseflow.scenarios import LADDER, find_h_flicker, flicker_fields


def main() -> int:
    ap = argparse.ArgumentParser(description="dwell-time scan for the alternating example")
    ap.add_argument("--upto", type=int, default=12, help="number of ladder steps to show")
    args = ap.parse_args()
    a, b = flicker_fields()
    chosen = find_h_flicker()
    print(f"{'h':>6} {'phi_0(h, 1/2)':>15} {'1/2 - phi_1(h, 0)':>18}")
    for h in LADDER[:args.upto]:
        step = float(h) / 64
        mark = "  <- chosen" if h == chosen.h else ""
        print(f"{float(h):6.2f} {integrate_segment(a, 0.5, float(h), step):15.6f} "
              f"{0.5 - integrate_segment(b, 0.0, float(h), step):18.6f}{mark}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
