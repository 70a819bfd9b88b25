"""Empirical mean face counts next to the asymptotic per-region bounds."""

import argparse

import numpy as np

from polyprof.bounds import avg_face_bound
from polyprof.geometry import BoundingBox
from polyprof.network import InitConfig, Layer, NetworkSpec, build_initialized
from polyprof.profiler import profile_network, summarize
from polyprof.regions import EnumerationConfig


def one_layer(n, d, seed):
    r = np.random.default_rng(seed)
    return NetworkSpec(d, (Layer(r.normal(size=(n, d)), r.normal(size=n)), Layer(np.ones((1, n)), np.zeros(1), "linear")))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    s = args.seed

    cases = [
        ("one-layer d=2 n=200 B=1e3", one_layer(200, 2, s), 2, 1e3, avg_face_bound("one_layer", 2)),
        ("2-20-20-1", build_initialized((2, 20, 20, 1), InitConfig(seed=s)), 2, 1.0, avg_face_bound("multilayer_d2")),
        ("zero-bias 3-40-40-1", build_initialized((3, 40, 40, 1), InitConfig(bias_value=0.0, seed=s)), 3, 1.0,
         avg_face_bound("zero_bias", 3)),
    ]
    for name, net, d, B, bound in cases:
        prof = profile_network(net, EnumerationConfig("traverse", box=BoundingBox(d, B)))
        print(f"{name:28s} regions={prof.n_regions:6d} avg_faces={summarize(prof).avg_faces:.4f} bound={bound}")


if __name__ == "__main__":
    main()
