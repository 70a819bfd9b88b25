"""Discovering the activation patterns (linear regions) of a network in a box."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from polyprof.errors import Degenerate, DegeneratePoints, Infeasible, InvalidInput, TooLarge, Unbounded
from polyprof.geometry import (
    EPS,
    BoundingBox,
    HalfspaceSystem,
    chebyshev_center,
    enumerate_vertices,
    nonredundant_indices,
    polygon_order,
)
from polyprof.network import (
    ActivationPattern,
    Layer,
    NetworkSpec,
    _snap_zero_rows,
    forward_with_pattern,
    patterns_of,
    region_halfspaces,
)

MODES = ("sample", "exhaustive", "traverse")
DEFAULT_CAP = 24
CHUNK = 4096


@dataclass(frozen=True)
class EnumerationConfig:
    """How to find regions.

    ``sample`` draws ``n_samples`` uniform points; ``exhaustive`` searches all
    2^N patterns with prefix pruning (only while N <= ``cap``); ``traverse``
    walks facet-to-facet from the region at the box center and is complete
    for any N.
    """

    mode: str = "sample"
    n_samples: int = 8000
    seed: int = 0
    box: BoundingBox = field(default_factory=lambda: BoundingBox(3, 1.0))
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInput(f"unknown enumeration mode {self.mode!r}")
        if self.mode == "sample" and self.n_samples < 1:
            raise InvalidInput("n_samples must be >= 1")

    @property
    def complete(self) -> bool:
        return self.mode != "sample"


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def sample_points(box: BoundingBox, n: int, seed: int) -> np.ndarray:
    """``n`` uniform points; chunk c always comes from stream (seed, c), so a
    larger ``n`` extends a smaller one and any worker split gives the same points."""
    out = []
    for c, start in enumerate(range(0, n, CHUNK)):
        out.append(box.sample(_chunk_rng(seed, c), min(CHUNK, n - start)))
    return np.vstack(out) if out else np.zeros((0, box.dim))


def _unique_patterns(net: NetworkSpec, bits: np.ndarray) -> set[ActivationPattern]:
    offs = net.layer_offsets
    return {ActivationPattern(row.tobytes(), offs) for row in np.unique(bits, axis=0)}


def sample_regions(net: NetworkSpec, cfg: EnumerationConfig) -> set[ActivationPattern]:
    """Distinct patterns hit by uniform samples: a lower bound on the region set."""
    if cfg.box.dim != net.input_dim:
        raise InvalidInput("box dimension differs from network input")
    found: set[ActivationPattern] = set()
    for c, start in enumerate(range(0, cfg.n_samples, CHUNK)):
        X = cfg.box.sample(_chunk_rng(cfg.seed, c), min(CHUNK, cfg.n_samples - start))
        found |= _unique_patterns(net, patterns_of(net, X))
    return found


def _radius(A: list, b: list, box_h: HalfspaceSystem) -> tuple[np.ndarray | None, float]:
    h = HalfspaceSystem(np.vstack(A), np.asarray(b)).stack(box_h) if A else box_h
    try:
        return chebyshev_center(h)
    except Infeasible:
        return None, 0.0


def exhaustive_regions(net: NetworkSpec, cfg: EnumerationConfig) -> set[ActivationPattern]:
    """Every pattern whose region is full-dimensional inside the box.

    Depth-first over neurons in layer order.  A neuron's row depends only on
    the bits of earlier layers, so an infeasible prefix prunes its whole
    subtree.  Each node carries an interior witness; the child on the
    witness's side of the new hyperplane inherits it without an LP.
    """
    N = net.n_hidden
    if N > cfg.cap:
        raise TooLarge(f"{N} hidden neurons exceed the exhaustive cap {cfg.cap}")
    box = cfg.box
    if box.dim != net.input_dim:
        raise InvalidInput("box dimension differs from network input")
    box_h = box.halfspaces()
    margin = 1e-7 * max(1.0, box.half_width)
    offs = net.layer_offsets
    hidden = net.hidden
    found: set[ActivationPattern] = set()
    witness0, _ = chebyshev_center(box_h)

    def layer_rows(l, M, c):
        W = _snap_zero_rows(hidden[l].weight @ M)
        return W, hidden[l].weight @ c + hidden[l].bias

    def descend(l, j, W, bvec, M, c, A, b, bits, x):
        if j == W.shape[0]:
            mask = np.asarray(bits[offs[l] :], dtype=float)
            M2, c2 = W * mask[:, None], bvec * mask
            if l + 1 == len(hidden):
                found.add(ActivationPattern(bytes(bits), offs))
                return
            W2, b2 = layer_rows(l + 1, M2, c2)
            descend(l + 1, 0, W2, b2, M2, c2, A, b, bits, x)
            return
        w, beta = W[j], bvec[j]
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            # constant pre-activation: the tie rule fixes the bit
            descend(l, j + 1, W, bvec, M, c, A + [w], b + [-beta if beta > 0 else beta], bits + [int(beta > 0)], x)
            return
        z = float(w @ x + beta)
        for bit in (1, 0):
            sgn = 1.0 if bit else -1.0
            row, off = -sgn * w, -sgn * beta
            A2, b2 = A + [row], b + [off]
            if sgn * z / norm > margin:
                descend(l, j + 1, W, bvec, M, c, A2, b2, bits + [bit], x)
                continue
            x2, r = _radius(A2, b2, box_h)
            if x2 is not None and r > EPS:
                descend(l, j + 1, W, bvec, M, c, A2, b2, bits + [bit], x2)

    M0 = np.eye(net.input_dim)
    c0 = np.zeros(net.input_dim)
    W0, b0 = layer_rows(0, M0, c0)
    descend(0, 0, W0, b0, M0, c0, [], [], [], witness0)
    return found


def _facet_points(h: HalfspaceSystem, facets: np.ndarray, vertices: np.ndarray) -> dict[int, np.ndarray]:
    """Average of the vertices lying on each facet (a relative-interior point)."""
    res = vertices @ h.normals.T + h.offsets
    scale = 1e-7 * max(1.0, float(np.abs(vertices).max()))
    out = {}
    d = h.dim
    for k in facets:
        on = np.abs(res[:, k]) / max(h.row_norms[k], 1e-300) <= scale
        if np.count_nonzero(on) >= d:
            out[int(k)] = vertices[on].mean(axis=0)
    return out


def _region_geometry(net, pattern, box):
    h = region_halfspaces(net, pattern, box)
    center, r = chebyshev_center(h)
    if r <= h.tol:
        raise Degenerate("region is not full-dimensional")
    facets = nonredundant_indices(h, interior=center)
    verts = enumerate_vertices(h, interior=center, facets=facets)
    return h, center, r, facets, verts


def _cross_facet(net, pattern, h, k, p, center, seen=()):
    """Pattern of the region on the far side of facet ``k`` at its point ``p``."""
    normal = h.normals[k] / np.linalg.norm(h.normals[k])
    layer = net.neuron_layer(k)
    keep = net.layer_offsets[layer + 1]
    want = pattern.array[:keep].copy()
    want[k] ^= 1
    delta = 1e-4 * max(1e-3, float(np.linalg.norm(p - center)))
    scale = max(1.0, float(np.abs(p).max()))
    for _ in range(40):
        q = p + delta * normal
        _, pat, _ = forward_with_pattern(net, q)
        if np.array_equal(pat.array[:keep], want):
            if pat in seen:
                return pat
            h2 = region_halfspaces(net, pat, BoundingBox(net.input_dim, 1.0))
            res = h2.residuals(p)[: net.n_hidden] / np.maximum(h2.row_norms[: net.n_hidden], 1e-300)
            if np.all(res <= 1e-7 * scale):
                return pat
        delta *= 0.5
        if delta < 1e-14 * scale:
            break
    return None


def traverse_regions(net: NetworkSpec, cfg: EnumerationConfig, *, keep_geometry: bool = False):
    """Breadth-first walk across neuron facets; complete for full-dimensional regions.

    Regions tile the box, so their facet-adjacency graph is connected and a
    walk from any one region reaches all of them.
    """
    box = cfg.box
    if box.dim != net.input_dim:
        raise InvalidInput("box dimension differs from network input")
    rng = _chunk_rng(cfg.seed, 1 << 20)
    start = None
    candidates = [np.zeros(box.dim)] + list(box.sample(rng, 64))
    for x in candidates:
        _, pat, _ = forward_with_pattern(net, x)
        try:
            _, r = chebyshev_center(region_halfspaces(net, pat, box))
        except Infeasible:
            continue
        if r > EPS:
            start = pat
            break
    if start is None:
        raise Degenerate("no full-dimensional start region found")
    seen = {start}
    geometry = {}
    queue = deque([start])
    N = net.n_hidden
    regions = set()
    while queue:
        pat = queue.popleft()
        try:
            h, center, r, facets, verts = _region_geometry(net, pat, box)
        except (Degenerate, Infeasible):
            continue
        regions.add(pat)
        if keep_geometry:
            geometry[pat] = (h, center, r, facets, verts)
        pts = _facet_points(h, facets[facets < N], verts.points)
        for k, p in pts.items():
            nb = _cross_facet(net, pat, h, k, p, center, seen)
            if nb is None or nb in seen:
                continue
            seen.add(nb)
            queue.append(nb)
    if keep_geometry:
        return regions, geometry
    return regions


def enumerate_regions(net: NetworkSpec, cfg: EnumerationConfig) -> set[ActivationPattern]:
    if cfg.mode == "sample":
        return sample_regions(net, cfg)
    if cfg.mode == "exhaustive":
        return exhaustive_regions(net, cfg)
    return traverse_regions(net, cfg)


@dataclass(frozen=True, eq=False)
class PolygonRegion:
    pattern: ActivationPattern
    vertices: np.ndarray  # counter-clockwise, plane coordinates
    n_edges: int
    area: float


@dataclass(frozen=True, eq=False)
class CrossSection:
    origin: np.ndarray
    u: np.ndarray
    w: np.ndarray
    extent: float
    seed: int
    regions: list[PolygonRegion]

    def to_dict(self) -> dict:
        return {
            "origin": self.origin.tolist(),
            "u": self.u.tolist(),
            "w": self.w.tolist(),
            "extent": self.extent,
            "seed": self.seed,
            "regions": [
                {
                    "pattern": reg.pattern.hex(),
                    "edges": reg.n_edges,
                    "area": reg.area,
                    "vertices": reg.vertices.tolist(),
                }
                for reg in self.regions
            ],
        }


def plane_basis(p1, p2, seed: int, tol: float = EPS) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Midpoint origin, unit ``u`` along p2 - p1 and a seeded unit ``w`` orthogonal to it."""
    p1 = np.asarray(p1, dtype=float).reshape(-1)
    p2 = np.asarray(p2, dtype=float).reshape(-1)
    if p1.shape != p2.shape:
        raise InvalidInput("p1 and p2 have different lengths")
    gap = np.linalg.norm(p2 - p1)
    if gap < tol:
        raise DegeneratePoints("p1 and p2 coincide")
    u = (p2 - p1) / gap
    d = u.shape[0]
    if d < 2:
        raise InvalidInput("a cross-section needs input dimension >= 2")
    rng = np.random.default_rng(seed)
    while True:
        g = rng.normal(size=d)
        g -= (g @ u) * u
        n = np.linalg.norm(g)
        if n > 1e-6:
            return (p1 + p2) / 2.0, u, g / n


def restrict_to_plane(net: NetworkSpec, origin, u, w) -> NetworkSpec:
    """The 2-input network ``(s, t) -> net(origin + s u + t w)``."""
    first = net.layers[0]
    basis = np.column_stack([u, w])
    new_first = Layer(first.weight @ basis, first.bias + first.weight @ origin, first.activation)
    return NetworkSpec(2, (new_first,) + net.layers[1:])


def cross_section_regions(net: NetworkSpec, p1, p2, extent: float, seed: int = 0) -> CrossSection:
    origin, u, w = plane_basis(p1, p2, seed)
    if origin.shape[0] != net.input_dim:
        raise InvalidInput("points do not match the network input dimension")
    plane_net = restrict_to_plane(net, origin, u, w)
    box = BoundingBox(2, float(extent))
    _, geometry = traverse_regions(plane_net, EnumerationConfig("traverse", 1, seed, box), keep_geometry=True)
    regions = []
    for pat in sorted(geometry):
        h, _, _, facets, verts = geometry[pat]
        poly = polygon_order(verts.points)
        x, y = poly[:, 0], poly[:, 1]
        area = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        regions.append(PolygonRegion(pat, poly, int(len(facets)), area))
    return CrossSection(origin, u, w, float(extent), seed, regions)
