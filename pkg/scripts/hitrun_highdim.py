"""Hit-and-Run face detection on regions of a random MNIST-sized MLP.

Reports |found| against K = N + 2d for a few regions; exact facets are out of
reach at d = 784, so |found| is only a lower bound on the face count.
"""

import argparse

import numpy as np

from polyprof.geometry import BoundingBox
from polyprof.hitrun import estimate_region_faces
from polyprof.network import InitConfig, build_initialized, parse_arch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--arch", default="784-100-100-10")
    ap.add_argument("--method", default="kaiming")
    ap.add_argument("--regions", type=int, default=3)
    ap.add_argument("--checkpoint", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    arch = parse_arch(args.arch)
    net = build_initialized(arch, InitConfig(args.method, 0.01, args.seed))
    box = BoundingBox(arch[0], 1.0)
    r = np.random.default_rng(args.seed)
    for i in range(args.regions):
        x = r.uniform(-1, 1, arch[0])
        res = estimate_region_faces(net, x, box, args.checkpoint, args.seed + i)
        print(f"region {i}: found={res.n_found} of K={res.n_rows} iterations={res.iterations}")


if __name__ == "__main__":
    main()
