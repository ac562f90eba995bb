"""Two-layer hit-rate contours and the tandem simulation check.

Evaluates the analytic hierarchy on a (c1, c2) grid for Zipf(0.8) over 10^4
objects, then simulates 16 edge caches feeding one core cache.

    python scripts/hierarchy_contours.py --out results/contours.csv [--skip-sim]
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from cachemix.hierarchy import contour_grid, evaluate_two_layer
from cachemix.simulator import run_tandem, tandem_overall_hit
from cachemix.traffic import Zipf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/contours.csv"))
    ap.add_argument("--alpha", type=float, default=0.8)
    ap.add_argument("--skip-sim", action="store_true")
    ap.add_argument("--seed", type=int, default=9)
    args = ap.parse_args()
    law = Zipf(args.alpha, 10**4)
    grid = [0.0, *np.geomspace(10, 5000, 12)]
    h = contour_grid(law, grid, grid)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["c1", "c2", "hit_percent"])
        for i, a in enumerate(grid):
            for j, b in enumerate(grid):
                w.writerow([repr(a), repr(b), repr(100 * h[i, j])])
    print(f"wrote {args.out}; max asymmetry {100 * np.abs(h - h.T).max():.2f} pp")
    for c in (100, 1000):
        whole = evaluate_two_layer(law, c, 0).total_reduction
        split = evaluate_two_layer(law, c / 2, c / 2).total_reduction
        print(f"C={c}: hit(C, 0) = {whole:.4f}, hit(C/2, C/2) = {split:.4f}")
    if not args.skip_sim:
        l1, l2 = run_tandem(law, 16, 100, 1000, 12 * 10**6, seed=args.seed)
        model = evaluate_two_layer(law, 100, 1000)
        print(f"tandem 16 x 100 + 1000: simulated {tandem_overall_hit(l1, l2):.4f} "
              f"(layer 1 {l1.overall_hit:.4f}), analytic {model.total_reduction:.4f} "
              f"(layer 1 {model.layer1_reduction:.4f})")


if __name__ == "__main__":
    main()
