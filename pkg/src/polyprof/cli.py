"""``polyprof`` command line: init, profile, bounds, hitrun, cross-section, histogram.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from polyprof import bounds as bnd
from polyprof.errors import InvalidInput, NumericalFailure, ParseError
from polyprof.geometry import BoundingBox
from polyprof.hitrun import DEFAULT_CHECKPOINT, DEFAULT_MAX_ITERATIONS, estimate_region_faces
from polyprof.network import (
    INIT_METHODS,
    InitConfig,
    build_initialized,
    first_layer_rank,
    load_network,
    parse_arch,
    save_network,
)
from polyprof.profiler import (
    histogram_from_profile_dict,
    profile_network,
    profile_to_dict,
    simplex_histogram,
    summarize,
)
from polyprof.regions import DEFAULT_CAP, MODES, EnumerationConfig, cross_section_regions
from polyprof.svg import histogram_svg, region_map_svg

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InvalidInput(f"cannot write {path}: {exc}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _read_point(path) -> np.ndarray:
    """A point file holds a JSON list, or an object with a ``point`` list."""
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("point")
    try:
        p = np.asarray(data, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path} does not hold a numeric vector") from exc
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ParseError(f"{path} does not hold a finite vector")
    return p


def cmd_init(args) -> int:
    arch = parse_arch(args.arch)
    net = build_initialized(arch, InitConfig(args.method, args.bias, args.seed))
    try:
        save_network(net, args.out)
    except OSError as exc:
        raise InvalidInput(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {args.out} arch={'-'.join(map(str, arch))} method={args.method} seed={args.seed}")
    return EXIT_OK


def cmd_profile(args) -> int:
    net = load_network(args.net)
    box = BoundingBox(net.input_dim, args.box)
    cfg = EnumerationConfig(args.mode, args.samples, args.seed, box, args.cap)
    prof = profile_network(net, cfg, include_box_faces=not args.no_box_faces, threads=args.threads)
    doc = profile_to_dict(prof, net_path=args.net, arch=net.arch, box=args.box, mode=args.mode, seed=args.seed)
    if args.out:
        _write(args.out, _dump(doc))
    if args.hist or args.svg:
        hist = simplex_histogram(prof, args.bin_width)
        if args.hist:
            _write(args.hist, hist.to_csv())
        if args.svg:
            _write(args.svg, histogram_svg(hist.bins))
    s = summarize(prof)
    kind = "" if prof.complete else " (lower bound)"
    print(f"regions={prof.n_regions}{kind} omega={s.omega} simple_fraction={s.simple_fraction:.4f} "
          f"avg_faces={s.avg_faces:.4f}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    reports = []
    for text in args.arch:
        arch = parse_arch(text)
        if len(arch) < 3:
            raise InvalidInput(f"architecture {text!r} needs input, hidden and output widths")
        reports.append(bnd.bounds_report(arch, rank=args.rank, zero_bias=args.zero_bias))
    enumerated = {}
    for path in args.profile or []:
        doc = _read_json(path)
        try:
            arch = parse_arch(doc["arch"])
            total = int(doc["total_simplices"])
        except (KeyError, TypeError, ValueError, InvalidInput) as exc:
            raise ParseError(f"{path} is not a profile document") from exc
        enumerated[arch] = total
    if args.json:
        print(_dump([r.to_dict() for r in reports]), end="")
    else:
        print(bnd.format_table(reports, enumerated))
    return EXIT_OK


def cmd_hitrun(args) -> int:
    net = load_network(args.net)
    box = BoundingBox(net.input_dim, args.box)
    if args.point:
        x = _read_point(args.point)
    else:
        x = np.zeros(net.input_dim)
    if x.shape[0] != net.input_dim:
        raise InvalidInput(f"point has {x.shape[0]} coordinates, network expects {net.input_dim}")
    res = estimate_region_faces(
        net, x, box, args.checkpoint, args.seed, directions=args.directions, max_iterations=args.max_iterations
    )
    doc = {
        "net": args.net,
        "box": args.box,
        "seed": args.seed,
        "checkpoint": args.checkpoint,
        "directions": args.directions,
        "found": sorted(res.found),
        "n_found": res.n_found,
        "K": res.n_rows,
        "iterations": res.iterations,
        "first_layer_rank": first_layer_rank(net),
    }
    if args.out:
        _write(args.out, _dump(doc))
    print(f"found={res.n_found} of K={res.n_rows} iterations={res.iterations}")
    return EXIT_OK


def cmd_cross_section(args) -> int:
    net = load_network(args.net)
    p1, p2 = _read_point(args.p1), _read_point(args.p2)
    if p1.shape != p2.shape or p1.shape[0] != net.input_dim:
        raise InvalidInput("p1 and p2 must both match the network input dimension")
    section = cross_section_regions(net, p1, p2, args.extent, args.seed)
    doc = section.to_dict()
    if args.out:
        _write(args.out, _dump(doc))
    if args.svg:
        _write(args.svg, region_map_svg(doc))
    edges = [r.n_edges for r in section.regions]
    print(f"polygons={len(edges)} avg_edges={np.mean(edges):.4f}")
    return EXIT_OK


def cmd_histogram(args) -> int:
    doc = _read_json(args.profile)
    hist = histogram_from_profile_dict(doc, args.bin_width)
    if args.out:
        _write(args.out, hist.to_csv())
    else:
        print(hist.to_csv(), end="")
    if args.svg:
        _write(args.svg, histogram_svg(hist.bins))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyprof", description="Profile the linear regions of ReLU networks.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("init", help="write a freshly initialized network")
    q.add_argument("--arch", required=True, help="dash-separated widths, e.g. 3-40-20-1")
    q.add_argument("--method", default="xavier-uniform", choices=INIT_METHODS)
    q.add_argument("--bias", type=float, default=0.01)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_init)

    q = sub.add_parser("profile", help="profile every region of a network in a box")
    q.add_argument("--net", required=True)
    q.add_argument("--box", type=float, default=1.0, help="box half-width B")
    q.add_argument("--mode", default="sample", choices=MODES)
    q.add_argument("--samples", type=int, default=8000)
    q.add_argument("--cap", type=int, default=DEFAULT_CAP, help="neuron cap for exhaustive mode")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--no-box-faces", action="store_true", help="exclude box facets from face counts")
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--out")
    q.add_argument("--hist", help="histogram CSV path")
    q.add_argument("--svg", help="histogram SVG path")
    q.add_argument("--bin-width", type=int, default=5)
    q.set_defaults(func=cmd_profile)

    q = sub.add_parser("bounds", help="closed-form bounds for one or more architectures")
    q.add_argument("--arch", required=True, action="append")
    q.add_argument("--rank", type=int, help="first-layer rank for the low-rank face bounds")
    q.add_argument("--zero-bias", action="store_true")
    q.add_argument("--profile", action="append", help="profile JSON whose total fills the Enumerated row")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_bounds)

    q = sub.add_parser("hitrun", help="Hit-and-Run face detection for the region containing a point")
    q.add_argument("--net", required=True)
    q.add_argument("--point", help="JSON vector; defaults to the origin")
    q.add_argument("--box", type=float, default=1.0)
    q.add_argument("--checkpoint", type=int, default=DEFAULT_CHECKPOINT)
    q.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    q.add_argument("--directions", default="coordinate", choices=("coordinate", "sphere"))
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_hitrun)

    q = sub.add_parser("cross-section", help="regions on the plane through two input points")
    q.add_argument("--net", required=True)
    q.add_argument("--p1", required=True)
    q.add_argument("--p2", required=True)
    q.add_argument("--extent", type=float, default=1.0)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.add_argument("--svg")
    q.set_defaults(func=cmd_cross_section)

    q = sub.add_parser("histogram", help="simplex histogram from a saved profile")
    q.add_argument("--profile", required=True)
    q.add_argument("--bin-width", type=int, default=5)
    q.add_argument("--out")
    q.add_argument("--svg")
    q.set_defaults(func=cmd_histogram)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits 2 on usage errors
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"polyprof: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"polyprof: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"polyprof: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
