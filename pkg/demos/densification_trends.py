"""Does the optimal bias survive small-cell densification?

As the small-cell tier densifies, out-of-band offloading should back off
(the new cells interfere only with each other, so chasing a distant one
stops paying), while in-band offloading keeps its sweet spot (the added
interference hits everyone alike). This script runs the density trend in
both layouts and prints the per-ratio optima.

Run:  python3 demos/densification_trends.py [--realizations 20]
"""

import argparse

from hetnetlb import (Objective, TrendMode, density_trend, out_of_band_scenario,
                      reference_scenario)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--realizations", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--ratios", default="2,5,10")
    args = ap.parse_args()

    ratios = [float(r) for r in args.ratios.split(",")]
    grid = [float(b) for b in range(0, 31)]

    print("out-of-band (5th percentile objective):")
    for point in density_trend(out_of_band_scenario(), ratios, TrendMode.OUT_OF_BAND,
                               Objective.PCT5, args.realizations, args.seed,
                               workers=args.workers, bias_grid_db=grid):
        print(f"  {point.ratio:4.0f} small cells per macro -> "
              f"best bias {point.best_bias_db:g} dB")

    print("in-band (median objective):")
    for point in density_trend(reference_scenario(), ratios, TrendMode.IN_BAND,
                               Objective.PCT50, args.realizations, args.seed,
                               workers=args.workers, bias_grid_db=grid):
        print(f"  {point.ratio:4.0f} small cells per macro -> "
              f"best bias {point.best_bias_db:g} dB")


if __name__ == "__main__":
    main()
