"""Variation distance between scaled Jacobi and Laguerre spectra as a2 grows.

Prints one line per a2 with tv_hat, its jackknife standard error, and the
unit-mean check.  Example:

    python scripts/tv_decay.py --n 10 --a1 10 --reps 100000
"""
import argparse

from ensemble_lab import EnsembleParams, RngStream, estimate_tv, log_kn_exact


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--a1", type=float, default=10.0)
    ap.add_argument("--exponents", type=float, nargs="+", default=[4, 5, 6, 7])
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    root = RngStream(args.seed)
    print(f"{'a2':>10} {'log K_n':>14} {'tv_hat':>12} {'se':>10} {'mean-1':>12} {'se':>10}")
    for k, e in enumerate(args.exponents):
        p = EnsembleParams(args.beta, args.n, args.a1, 10.0**e)
        est = estimate_tv(p, args.reps, root.spawn(k, "tv-decay"), args.threads)
        print(
            f"{p.a2:10.3g} {log_kn_exact(p):14.6e} {est.tv_hat:12.4e} {est.stderr_tv:10.2e} "
            f"{est.unit_mean_hat - 1:12.3e} {est.stderr_mean:10.2e}"
        )


if __name__ == "__main__":
    main()
