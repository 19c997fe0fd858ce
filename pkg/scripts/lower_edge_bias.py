"""Finite-n bias of the scaled extreme Jacobi eigenvalues against their limits.

For each n the a1 ratio is held at gamma and the 50-rep means of
(a2/n) lambda_max and (a2/n) lambda_min are compared with
beta (1 +- sqrt(gamma))^2 / (2 gamma).
"""
import argparse

from ensemble_lab.campaigns import CampaignConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80, 160])
    ap.add_argument("--a2", type=float, default=1e5)
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    print(f"{'n':>5} {'max':>9} {'target':>9} {'rel':>7} {'min':>9} {'target':>9} {'rel':>7}")
    for n in args.sizes:
        s = run(CampaignConfig("verify-extremes", n, ensemble="jacobi-matrix", beta=2.0,
                               gamma_target=args.gamma, a2=args.a2, reps=args.reps, seed=args.seed)).summary
        print(
            f"{n:5d} {s['lambda_max_scaled_mean']:9.4f} {s['lambda_max_target']:9.4f} "
            f"{s['lambda_max_rel_error']:7.2%} {s['lambda_min_scaled_mean']:9.4f} "
            f"{s['lambda_min_target']:9.4f} {s['lambda_min_rel_error']:7.2%}"
        )


if __name__ == "__main__":
    main()
