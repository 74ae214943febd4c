"""How often do generated MVR traces with correct returns violate the MVR formula?

Sweeps seeds over a few generator shapes and prints, per shape, how many traces
fail validate_returns and how many violate the formula, with the first
violation found.

    python3 scripts/mvr_generator_study.py --seeds 500
"""

import argparse
from collections import Counter

from eptl.datatypes import MVR_FORMULA, GeneratorConfig, generate, validate_returns
from eptl.evaluator import check_execution
from eptl.parser import parse


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--merge-prob", type=float, default=0.3)
    args = ap.parse_args()
    f = parse(MVR_FORMULA)
    print(f"formula: {f}")
    print("replicas  ops  traces  bad-returns  violations  first violation")
    for replicas in (2, 3, 4):
        for ops in (4, 8, 12):
            counts = Counter()
            first = ""
            for seed in range(args.seeds):
                cfg = GeneratorConfig(replicas, ops, seed, "mvr", args.merge_prob)
                A = generate(cfg)
                counts["bad"] += bool(validate_returns(A, "mvr"))
                v = check_execution(A, f)
                if not v.satisfied:
                    counts["viol"] += 1
                    if not first:
                        x = v.failures[0]
                        first = f"seed {seed}: start {x.start}, a={x.interpretation['a']}, at {x.event}"
            print(f"{replicas:8}  {ops:3}  {args.seeds:6}  {counts['bad']:11}  {counts['viol']:10}  {first}")


if __name__ == "__main__":
    main()
