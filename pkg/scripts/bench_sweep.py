"""Seeded benchmark of every synthesizer; appends CSV rows to results/bench.csv."""

import argparse
import sys
from pathlib import Path

from demandaware.cli import dispatch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/bench.csv")
    args = ap.parse_args()
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    argv = [
        "--seed", str(args.seed), "bench",
        "--n", *map(str, args.n),
        "--trials", str(args.trials),
        "--family", "uniform", "weak-direct-upper",
        "--jobs", str(args.jobs),
        "--out", args.out,
    ]
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
