"""Fraction of simple regions at initialization, per architecture / method / seed.

Writes one CSV row per run and, with --hist-dir, the per-run histogram SVGs.

    python3 scripts/simplicity_study.py --out simplicity.csv
"""

import argparse
import csv
import sys
from pathlib import Path

from polyprof.geometry import BoundingBox
from polyprof.network import INIT_METHODS, InitConfig, build_initialized
from polyprof.profiler import profile_network, simplex_histogram, summarize
from polyprof.regions import EnumerationConfig
from polyprof.svg import histogram_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--archs", default="3-40-20-1,3-80-40-1")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--samples", type=int, default=8000)
    ap.add_argument("--bias", type=float, default=0.01)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="-")
    ap.add_argument("--hist-dir")
    args = ap.parse_args()

    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out)
    w.writerow(["arch", "method", "seed", "regions", "omega", "simple_fraction", "avg_faces"])
    for text in args.archs.split(","):
        arch = tuple(int(x) for x in text.split("-"))
        for method in INIT_METHODS:
            for seed in range(args.seeds):
                net = build_initialized(arch, InitConfig(method, args.bias, seed))
                cfg = EnumerationConfig("sample", args.samples, seed, BoundingBox(arch[0], 1.0))
                prof = profile_network(net, cfg, threads=args.threads)
                s = summarize(prof)
                w.writerow([text, method, seed, prof.n_regions, s.omega, f"{s.simple_fraction:.4f}", f"{s.avg_faces:.4f}"])
                out.flush()
                if args.hist_dir:
                    d = Path(args.hist_dir)
                    d.mkdir(parents=True, exist_ok=True)
                    bins = simplex_histogram(prof, 5).bins
                    (d / f"{text}_{method}_{seed}.svg").write_text(histogram_svg(bins, f"{text} {method} seed {seed}"))
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
