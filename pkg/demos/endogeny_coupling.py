"""Shared-weight coupling on the truncated Poisson weighted tree.

Does the root value of the tree recursion depend only on the tree's own
edge weights, or does boundary noise survive to the root? The coupling
experiment answers numerically: it solves the min recursion twice over
one shared set of tree weights, hanging two independently seeded
boundary conditions at depth d. If the boundary influence dies out,
the two root values approach each other as d grows.

Every random number is keyed by its tree path, so both passes see
bit-identical weights and the experiment replays exactly for any
worker count. The script runs a short depth ladder, prints the gap
statistics with one-sided z-scores for the decrease, and closes with
the degenerate boundary that collapses the gap to zero by construction.
"""

import numpy as np

from logistic_rde import BoundaryLaw, PwitConfig, run_coupling
from logistic_rde.stats import ONE_SIDED_1PCT_Z, decrease_z_score


def main():
    depths = (0, 2, 4, 6)
    config = PwitConfig(depth=max(depths), replicates=2000)
    print(f"coupling {config.replicates} replicate pairs per depth, "
          f"master seed {config.master_seed}")

    report = run_coupling(config, depths=depths, keep_samples=True)
    print("  depth   E|X1 - X2|   KS(min law)   KS(root law)")
    for row in report.rows:
        print(f"  {row.depth:5d}   {row.mean_abs_root_gap:10.4f}   "
              f"{row.ks_statistic_min_vs_logistic:11.4f}   "
              f"{row.ks_statistic_root_vs_logistic:12.4f}")

    print("\nis each decrease real? one-sided z-scores "
          f"(1% threshold {ONE_SIDED_1PCT_Z:.2f})")
    gaps = {d: np.abs(x1 - x2) for d, (x1, x2) in report.samples.items()}
    for a, b in zip(depths, depths[1:]):
        z = decrease_z_score(gaps[a], gaps[b])
        print(f"  depth {a} -> {b}: z = {z:5.1f}")

    print("\nat depth 0 the boundaries are independent logistic draws, "
          "so the gap")
    print("has the closed-form mean 2; deeper boundaries matter less "
          "and less.")

    print("\ncontrol: a point-mass boundary carries no noise to forget")
    frozen = PwitConfig(depth=4, replicates=500,
                        boundary_law=BoundaryLaw.parse("point_mass:1.5"))
    control = run_coupling(frozen, depths=(0, 4), keep_samples=False)
    for row in control.rows:
        print(f"  depth {row.depth}: E|X1 - X2| = {row.mean_abs_root_gap}")


if __name__ == "__main__":
    main()
