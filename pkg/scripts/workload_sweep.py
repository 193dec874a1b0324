"""Compare policies on uniform and Zipf workloads over a range of tag-directory
widths (tag-to-data ratios).

A reduced geometry keeps the run short; the relative ordering is what matters.

    python scripts/workload_sweep.py --sets 256 --length 200000
"""

import argparse

from racsim import POLICIES, SimConfig, run_policy
from racsim.metrics import to_csv
from racsim.traceio import gen_uniform, gen_zipf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sets", type=int, default=256)
    ap.add_argument("--data-ways", type=int, default=16)
    ap.add_argument("--tag-ways", type=int, nargs="+", default=[16, 24, 32, 48])
    ap.add_argument("--length", type=int, default=100_000)
    ap.add_argument("--footprint", type=float, default=2.0, help="distinct blocks as a multiple of capacity")
    ap.add_argument("--zipf-s", type=float, default=0.9)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--csv")
    args = ap.parse_args()

    n_blocks = int(args.sets * args.data_ways * args.footprint)
    workloads = {
        "uniform": gen_uniform(n_blocks, args.length, args.seed),
        f"zipf{args.zipf_s}": gen_zipf(n_blocks, args.zipf_s, args.length, args.seed),
    }
    reports = []
    print(f"{'workload':<10} {'tag_ways':>8}  " + "  ".join(f"{p:>8}" for p in POLICIES))
    for name, stream in workloads.items():
        trace = stream.accesses
        for tag_ways in args.tag_ways:
            config = SimConfig(num_sets=args.sets, tag_ways=tag_ways, data_ways=args.data_ways, seed=args.seed)
            row = [run_policy(p, config, trace, trace=f"{name}/tw{tag_ways}") for p in POLICIES]
            reports += row
            print(f"{name:<10} {tag_ways:>8}  " + "  ".join(f"{r.hit_rate:8.2%}" for r in row))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(to_csv(reports))


if __name__ == "__main__":
    main()
