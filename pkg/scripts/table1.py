"""Bounds vs. exhaustively enumerated simplex totals for one-hidden-layer 3-n-1 nets.

    python3 scripts/table1.py --seeds 10
"""

import argparse

from polyprof.bounds import bounds_report, format_table
from polyprof.geometry import BoundingBox
from polyprof.network import InitConfig, build_initialized
from polyprof.profiler import profile_network
from polyprof.regions import EnumerationConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--widths", default="7,8,9,10")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--bias", type=float, default=0.01)
    args = ap.parse_args()

    reports, enumerated = [], {}
    for n in map(int, args.widths.split(",")):
        arch = (3, n, 1)
        totals = []
        for seed in range(args.seeds):
            net = build_initialized(arch, InitConfig("xavier-uniform", args.bias, seed))
            prof = profile_network(net, EnumerationConfig("exhaustive", box=BoundingBox(3, 1.0)))
            totals.append(prof.total_simplices)
        enumerated[arch] = max(totals)  # the seed max, as in the published table
        reports.append(bounds_report(arch))
        print(f"3-{n}-1 totals over seeds: {totals}")
    print()
    print(format_table(reports, enumerated))


if __name__ == "__main__":
    main()
