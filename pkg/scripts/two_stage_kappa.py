"""Largest kappa the two-stage construction certifies, against the n/(2n-1) baseline."""

import argparse
from fractions import Fraction as F

from demandaware.core import fmt, random_doubly_stochastic
from demandaware.oracle import throughput
from demandaware.synthesis import oblivious_baseline, two_stage_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("n,trial,two_stage_kappa,strict_on_two_stage,oblivious_strict,baseline")
    for n in args.n:
        for t in range(args.trials):
            M = random_doubly_stochastic(n, n + 1, args.seed * 1000 + 10 * n + t)
            res = two_stage_search(M, seed=args.seed, bits=16)
            lp = throughput(res.topology, M).value if n <= 4 else None
            obl = throughput(oblivious_baseline(n), M).value if n <= 4 else None
            print(n, t, fmt(res.kappa), fmt(lp) if lp is not None else "", fmt(obl) if obl is not None else "",
                  fmt(F(n, 2 * n - 1)), sep=",")


if __name__ == "__main__":
    main()
