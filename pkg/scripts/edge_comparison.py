"""Soft and hard edge statistics of the Jacobi matrix model against their reference draws.

Writes a quantile table to stdout.  The soft edge is compared with the top
eigenvalue of the discretized stochastic Airy operator, the hard edge with
the rescaled smallest Laguerre eigenvalue at large n.
"""
import argparse

import numpy as np

from ensemble_lab.campaigns import CampaignConfig, run

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def table(name, rows, left, right):
    a = np.array([r[1] for r in rows])
    b = np.array([r[2] for r in rows])
    print(f"\n{name}")
    print(f"{'q':>6} {left:>12} {right:>12}")
    for q in QUANTILES:
        print(f"{q:6.2f} {np.quantile(a, q):12.4f} {np.quantile(b, q):12.4f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    soft = run(CampaignConfig("verify-edge-soft", 50, ensemble="jacobi-matrix", a1=50.0, a2=1e6,
                              reps=args.reps, seed=args.seed, threads=args.threads))
    table(f"soft edge, KS = {soft.summary['ks_two_sample']:.4f}", soft.rows, "Jacobi", "Airy")
    hard = run(CampaignConfig("verify-edge-hard", 30, ensemble="jacobi-matrix", a1=31.0, a2=1e6,
                              reps=args.reps, seed=args.seed, threads=args.threads))
    table(f"hard edge (c = 1), KS = {hard.summary['ks_two_sample']:.4f}", hard.rows, "Jacobi", "Laguerre")


if __name__ == "__main__":
    main()
