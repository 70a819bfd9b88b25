"""Per-region shape statistics and their network-level aggregation."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from polyprof.errors import Degenerate, EmptyProfile, Infeasible, InvalidInput
from polyprof.geometry import (
    BoundingBox,
    chebyshev_center,
    delaunay_triangulate,
    enumerate_vertices,
    nonredundant_indices,
    volume_of,
)
from polyprof.network import ActivationPattern, NetworkSpec, region_halfspaces
from polyprof.regions import EnumerationConfig, enumerate_regions, traverse_regions


@dataclass(frozen=True)
class RegionProfile:
    pattern: ActivationPattern
    n_vertices: int
    n_faces: int
    n_simplices: int
    volume: float
    include_box_faces: bool = True

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.hex(),
            "vertices": self.n_vertices,
            "faces": self.n_faces,
            "simplices": self.n_simplices,
            "volume": self.volume,
        }


@dataclass(frozen=True)
class NetworkProfile:
    regions: tuple[RegionProfile, ...]
    input_dim: int
    include_box_faces: bool = True
    complete: bool = True
    skipped: int = 0  # sampled patterns whose region turned out lower-dimensional

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @property
    def omega(self) -> int:
        """Largest simplex count of any region in this run."""
        return max((r.n_simplices for r in self.regions), default=0)

    @property
    def total_simplices(self) -> int:
        return sum(r.n_simplices for r in self.regions)

    @property
    def total_faces(self) -> int:
        return sum(r.n_faces for r in self.regions)

    @property
    def total_volume(self) -> float:
        return float(sum(r.volume for r in self.regions))


@dataclass(frozen=True)
class Histogram:
    bin_width: int
    bins: tuple[tuple[int, int, int], ...] = field(default_factory=tuple)

    @property
    def total(self) -> int:
        return sum(c for _, _, c in self.bins)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count"])
        w.writerows(self.bins)
        return buf.getvalue()


@dataclass(frozen=True)
class Summary:
    simple_fraction: float
    avg_faces: float
    omega: int


def _profile_from_geometry(pattern, h, center, facets, verts, n_hidden, include_box_faces) -> RegionProfile:
    tri = delaunay_triangulate(verts)
    faces = facets if include_box_faces else facets[facets < n_hidden]
    return RegionProfile(
        pattern=pattern,
        n_vertices=len(verts),
        n_faces=int(len(faces)),
        n_simplices=len(tri),
        volume=volume_of(tri),
        include_box_faces=include_box_faces,
    )


def profile_region(
    net: NetworkSpec, pattern: ActivationPattern, box: BoundingBox, include_box_faces: bool = True
) -> RegionProfile:
    """Vertices, faces, Delaunay simplices and volume of one region."""
    h = region_halfspaces(net, pattern, box)
    try:
        center, r = chebyshev_center(h)
    except Infeasible as exc:
        raise Degenerate(f"region {pattern} is empty") from exc
    if r <= h.tol:
        raise Degenerate(f"region {pattern} is not full-dimensional")
    facets = nonredundant_indices(h, interior=center)
    verts = enumerate_vertices(h, interior=center, facets=facets)
    return _profile_from_geometry(pattern, h, center, facets, verts, net.n_hidden, include_box_faces)


def _profile_chunk(net, patterns, box, include_box_faces):
    out, skipped = [], 0
    for pat in patterns:
        try:
            out.append(profile_region(net, pat, box, include_box_faces))
        except Degenerate:
            skipped += 1
    return out, skipped


def resolve_threads(threads: int | None) -> int:
    env = os.environ.get("POLYPROF_THREADS")
    if env:
        try:
            threads = int(env)
        except ValueError as exc:
            raise InvalidInput(f"POLYPROF_THREADS={env!r} is not an integer") from exc
    return max(1, int(threads or 1))


def profile_network(
    net: NetworkSpec, enum_cfg: EnumerationConfig, include_box_faces: bool = True, threads: int | None = 1
) -> NetworkProfile:
    """Find the regions, profile each once, and return them sorted by pattern."""
    box = enum_cfg.box
    n_hidden = net.n_hidden
    if enum_cfg.mode == "traverse":
        _, geometry = traverse_regions(net, enum_cfg, keep_geometry=True)
        regions = [
            _profile_from_geometry(pat, h, c, f, v, n_hidden, include_box_faces)
            for pat, (h, c, _, f, v) in geometry.items()
        ]
        skipped = 0
    else:
        patterns = sorted(enumerate_regions(net, enum_cfg))
        workers = resolve_threads(threads)
        if workers == 1 or len(patterns) < 2 * workers:
            regions, skipped = _profile_chunk(net, patterns, box, include_box_faces)
        else:
            chunks = [patterns[i::workers] for i in range(workers)]
            regions, skipped = [], 0
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part, sk in pool.map(_profile_chunk, [net] * workers, chunks, [box] * workers,
                                         [include_box_faces] * workers):
                    regions.extend(part)
                    skipped += sk
    regions.sort(key=lambda r: r.pattern)
    return NetworkProfile(tuple(regions), net.input_dim, include_box_faces, enum_cfg.complete, skipped)


def simplex_histogram(profile: NetworkProfile, bin_width: int = 5) -> Histogram:
    """Counts of regions per simplex-count bin [1..w], [w+1..2w], ..."""
    if bin_width < 1:
        raise InvalidInput("bin width must be >= 1")
    counts = [r.n_simplices for r in profile.regions]
    if not counts:
        return Histogram(bin_width, ())
    n_bins = (max(counts) - 1) // bin_width + 1
    tally = np.bincount([(c - 1) // bin_width for c in counts], minlength=n_bins)
    bins = tuple((i * bin_width + 1, (i + 1) * bin_width, int(tally[i])) for i in range(n_bins))
    return Histogram(bin_width, bins)


def simple_threshold(omega: int) -> int:
    return omega // 3


def summarize(profile: NetworkProfile) -> Summary:
    """Fraction of regions with at most floor(omega/3) simplices, and the mean face count."""
    if profile.n_regions == 0:
        raise EmptyProfile("profile has no regions")
    omega = profile.omega
    thr = simple_threshold(omega)
    simple = sum(1 for r in profile.regions if r.n_simplices <= thr)
    avg_faces = profile.total_faces / profile.n_regions
    return Summary(simple / profile.n_regions, avg_faces, omega)


def profile_to_dict(profile: NetworkProfile, *, net_path=None, arch=None, box=None, mode=None, seed=None) -> dict:
    out = {
        "net": None if net_path is None else str(net_path),
        "arch": None if arch is None else "-".join(map(str, arch)),
        "box": box,
        "mode": mode,
        "seed": seed,
        "include_box_faces": profile.include_box_faces,
        "region_count": profile.n_regions,
        "region_count_kind": "exact" if profile.complete else "lower_bound",
        "regions": [r.to_dict() for r in profile.regions],
        "omega": profile.omega,
        "total_simplices": profile.total_simplices,
        "total_faces": profile.total_faces,
        "total_volume": profile.total_volume,
    }
    if profile.n_regions:
        s = summarize(profile)
        out["simple_fraction"] = s.simple_fraction
        out["avg_faces"] = s.avg_faces
    else:
        out["simple_fraction"] = None
        out["avg_faces"] = None
    return out


def histogram_from_profile_dict(data: dict, bin_width: int) -> Histogram:
    """Rebuild the simplex histogram from a serialized profile alone."""
    try:
        counts = [int(r["simplices"]) for r in data["regions"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed profile document: {exc}") from exc
    fake = NetworkProfile(
        tuple(RegionProfile(ActivationPattern(b"", (0,)), 0, 0, c, 0.0) for c in counts), 0
    )
    return simplex_histogram(fake, bin_width)
