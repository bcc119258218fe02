"""Closed forms of the two-bidder lower bound over a log grid of N, with a sampling check of E[F2]."""
import argparse
import csv
import sys

import numpy as np

from augmech.harness.lowerbound import lower_bound_formulas, mc_verify_benchmark_mean


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=4.42)
    ap.add_argument("--max-exp", type=float, default=12.0)
    ap.add_argument("--points", type=int, default=25)
    ap.add_argument("--samples", type=int, default=10**5, help="0 skips the sampling check")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("N", "benchmark_mean", "mc_benchmark_mean", "revenue_upper", "ratio_bound", "limit_bound"))
    for N in np.logspace(0.3, args.max_exp, args.points):
        lb = lower_bound_formulas(float(N), args.alpha)
        mc = mc_verify_benchmark_mean(float(N), args.samples, rng) if args.samples and N < 1e7 else float("nan")
        w.writerow((f"{N:.6g}", f"{lb.benchmark_mean:.6f}", f"{mc:.6f}", f"{lb.revenue_upper:.6f}",
                    f"{lb.ratio_bound:.6f}", f"{lb.limit_bound:.8f}"))


if __name__ == "__main__":
    main()
