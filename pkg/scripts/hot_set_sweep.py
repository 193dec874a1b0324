"""Hit rate of every policy on a cyclic single-set workload as the number of
distinct blocks grows past the conventional associativity.

    python scripts/hot_set_sweep.py --passes 10 --max-distinct 48
"""

import argparse

from racsim import POLICIES, SimConfig, run_policy
from racsim.metrics import to_csv
from racsim.traceio import gen_single_set


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--set", type=int, default=7)
    ap.add_argument("--passes", type=int, default=10)
    ap.add_argument("--max-distinct", type=int, default=48)
    ap.add_argument("--step", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write the full reports here")
    args = ap.parse_args()

    config = SimConfig(seed=args.seed)
    reports = []
    print(f"{'distinct':>8}  " + "  ".join(f"{p:>8}" for p in POLICIES))
    for distinct in range(args.step, args.max_distinct + 1, args.step):
        trace = list(gen_single_set(config, args.set, distinct, args.passes))
        row = [run_policy(p, config, trace, trace=f"single_set(d={distinct})") for p in POLICIES]
        reports += row
        print(f"{distinct:>8}  " + "  ".join(f"{r.hit_rate:8.2%}" for r in row))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(to_csv(reports))


if __name__ == "__main__":
    main()
