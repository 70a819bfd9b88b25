"""Convex-polytope primitives over an H-representation {x : A x + b <= 0}.

Every operation here is a pure function of immutable inputs.  Floating point
throughout, with two tolerances: ``EPS`` for constraint activity and
``DEDUP_TOL`` for merging coincident vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from polyprof import _lp
from polyprof.errors import Degenerate, DegenerateHull, Infeasible, InvalidInput, NumericalFailure, Unbounded

EPS = 1e-9
DEDUP_TOL = 1e-7

# Subset enumeration solves C(K, d) small systems; above this many subsets the
# dual-hull route is used instead.
MAX_SUBSETS = 60_000


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HalfspaceSystem:
    """Polyhedron ``{x : normals @ x + offsets <= 0}``.

    Rows with an all-zero normal are allowed: they are constant constraints
    ``b_k <= 0`` that are either vacuous or make the system empty.  Region
    systems of ReLU networks produce them whenever a neuron's composite
    coefficients vanish (e.g. every upstream neuron is inactive).
    """

    normals: np.ndarray
    offsets: np.ndarray
    tol: float = EPS

    def __post_init__(self):
        normals = _frozen(self.normals)
        offsets = _frozen(self.offsets).reshape(-1)
        if normals.ndim != 2:
            raise InvalidInput(f"normals must be a K x d matrix, got shape {normals.shape}")
        if offsets.shape[0] != normals.shape[0]:
            raise InvalidInput(f"{normals.shape[0]} normals but {offsets.shape[0]} offsets")
        if not (np.all(np.isfinite(normals)) and np.all(np.isfinite(offsets))):
            raise InvalidInput("halfspace coefficients must be finite")
        if not self.tol > 0:
            raise InvalidInput("tol must be positive")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def n_rows(self) -> int:
        return self.normals.shape[0]

    def __len__(self) -> int:
        return self.n_rows

    @property
    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.normals, axis=1)

    @property
    def proper_rows(self) -> np.ndarray:
        """Indices of rows with a nonzero normal."""
        return np.flatnonzero(self.row_norms > 0.0)

    def trivially_empty(self) -> bool:
        """True if some zero-normal row reads ``b_k <= 0`` with ``b_k > tol``."""
        zero = self.row_norms == 0.0
        return bool(np.any(self.offsets[zero] > self.tol))

    def residuals(self, x) -> np.ndarray:
        return self.normals @ np.asarray(x, dtype=float) + self.offsets

    def contains(self, x, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        return bool(np.all(self.residuals(x) <= tol))

    def subsystem(self, rows) -> "HalfspaceSystem":
        rows = np.asarray(rows, dtype=int)
        return HalfspaceSystem(self.normals[rows], self.offsets[rows], self.tol)

    def stack(self, other: "HalfspaceSystem") -> "HalfspaceSystem":
        if other.dim != self.dim:
            raise InvalidInput("cannot stack systems of different dimension")
        return HalfspaceSystem(
            np.vstack([self.normals, other.normals]),
            np.concatenate([self.offsets, other.offsets]),
            self.tol,
        )


@dataclass(frozen=True)
class BoundingBox:
    """The hypercube ``[-B, B]^d``."""

    dim: int
    half_width: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInput("box dimension must be >= 1")
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise InvalidInput("box half-width must be positive and finite")

    def halfspaces(self, tol: float = EPS) -> HalfspaceSystem:
        """Rows ``x_i - B <= 0`` for every i, then ``-x_i - B <= 0``."""
        eye = np.eye(self.dim)
        normals = np.vstack([eye, -eye])
        offsets = np.full(2 * self.dim, -float(self.half_width))
        return HalfspaceSystem(normals, offsets, tol)

    @property
    def volume(self) -> float:
        return (2.0 * self.half_width) ** self.dim

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(-self.half_width, self.half_width, size=(n, self.dim))


@dataclass(frozen=True, eq=False)
class VertexSet:
    points: np.ndarray
    dedup_tol: float = DEDUP_TOL

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    vertices: VertexSet
    vertex_refs: np.ndarray
    volumes: np.ndarray = field(default=None)

    def __post_init__(self):
        refs = _frozen(self.vertex_refs, dtype=np.int64)
        object.__setattr__(self, "vertex_refs", refs)
        if self.volumes is None:
            vols = simplex_volumes(self.vertices.points, refs)
        else:
            vols = self.volumes
        object.__setattr__(self, "volumes", _frozen(vols))

    def __len__(self) -> int:
        return self.vertex_refs.shape[0]


def simplex_volumes(points: np.ndarray, refs: np.ndarray) -> np.ndarray:
    """|det(edge matrix)| / d! for every simplex in ``refs``."""
    refs = np.asarray(refs, dtype=np.int64)
    if refs.size == 0:
        return np.zeros(0)
    d = points.shape[1]
    corners = points[refs]
    edges = corners[:, 1:, :] - corners[:, :1, :]
    return np.abs(np.linalg.det(edges)) / math.factorial(d)


def _normalized(h: HalfspaceSystem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit-normal rows of the proper part of ``h`` plus their original indices."""
    idx = h.proper_rows
    norms = h.row_norms[idx]
    return h.normals[idx] / norms[:, None], h.offsets[idx] / norms, idx


def chebyshev_center(h: HalfspaceSystem) -> tuple[np.ndarray, float]:
    """Center and radius of the largest ball inside ``h``.

    Solved as the LP ``max r  s.t.  a_k.x + |a_k| r <= -b_k,  r >= 0``.
    """
    if h.n_rows == 0:
        raise InvalidInput("chebyshev_center needs at least one inequality")
    if h.trivially_empty():
        raise Infeasible("a constant constraint is violated")
    A, b, _ = _normalized(h)
    d = h.dim
    if A.shape[0] == 0:
        raise Unbounded("no proper inequalities")
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((A.shape[0], 1))])
    lower = np.r_[np.full(d, -_lp.INF), 0.0]
    upper = np.full(d + 1, _lp.INF)
    status, sol, _ = _lp.minimize(c, A_ub, -b, lower, upper)
    if status is _lp.LPStatus.INFEASIBLE:
        raise Infeasible("halfspace system is empty")
    if status is _lp.LPStatus.UNBOUNDED:
        raise Unbounded("inscribed balls are unbounded")
    if status is not _lp.LPStatus.OPTIMAL:
        raise NumericalFailure("Chebyshev LP failed")
    return sol[:d] + 0.0, float(max(sol[-1], 0.0))


def is_full_dimensional(h: HalfspaceSystem) -> bool:
    try:
        _, r = chebyshev_center(h)
    except Infeasible:
        return False
    except Unbounded:
        return True
    return r > h.tol


def _interior(h: HalfspaceSystem, interior=None) -> tuple[np.ndarray, float]:
    if interior is not None:
        x = np.asarray(interior, dtype=float)
        A, b, _ = _normalized(h)
        r = float(np.min(-(A @ x + b))) if A.shape[0] else math.inf
        if r > h.tol:
            return x, r
    try:
        x, r = chebyshev_center(h)
    except Infeasible as exc:
        raise Degenerate("system is empty") from exc
    if r <= h.tol:
        raise Degenerate(f"system is not full-dimensional (inradius {r:.3g})")
    return x, r


def _unique_rows(A: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Positions of the first occurrence of each distinct normalized row."""
    rows = np.hstack([A, b[:, None]])
    scale = np.maximum(1.0, np.abs(rows).max(axis=1, keepdims=True))
    keys = np.round(rows / scale / tol).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return np.sort(first)


def _nonredundant_lp(A: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    K, d = A.shape
    keep = []
    lower = np.full(d, -_lp.INF)
    upper = np.full(d, _lp.INF)
    for k in range(K):
        others = np.delete(np.arange(K), k)
        # cap the tested row at 1 so a nonredundant row never makes the LP unbounded
        A_ub = np.vstack([A[others], A[k : k + 1]])
        b_ub = np.concatenate([-b[others], [1.0 - b[k]]])
        status, _, fun = _lp.minimize(-A[k], A_ub, b_ub, lower, upper)
        if status is _lp.LPStatus.UNBOUNDED:
            keep.append(k)
            continue
        if status is not _lp.LPStatus.OPTIMAL:
            raise NumericalFailure(f"redundancy LP failed for row {k}")
        if -fun + b[k] > tol:
            keep.append(k)
    return np.asarray(keep, dtype=int)


def _dual_points(A: np.ndarray, b: np.ndarray, center: np.ndarray) -> np.ndarray:
    slack = -(A @ center + b)
    return A / slack[:, None]


def _nonredundant_hull(A: np.ndarray, b: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Facets of P are the extreme points of its polar ``conv{a_k / s_k}``."""
    dual = _dual_points(A, b, center)
    d = A.shape[1]
    if d == 1:
        col = dual[:, 0]
        out = []
        if np.any(col > 0):
            out.append(int(np.flatnonzero(col == col.max())[0]))
        if np.any(col < 0):
            out.append(int(np.flatnonzero(col == col.min())[0]))
        return np.asarray(sorted(out), dtype=int)
    hull = ConvexHull(dual)
    return np.sort(hull.vertices).astype(int)


def nonredundant_indices(h: HalfspaceSystem, method: str = "auto", *, interior=None) -> np.ndarray:
    """Indices of the inequalities that define facets of ``h``.

    Row k counts iff removing it strictly enlarges the feasible set.  Rows
    that coincide after normalization describe one facet and are reported
    once, under the lowest index.  ``method`` is ``"lp"`` (one LP per row),
    ``"hull"`` (polar duality through Qhull) or ``"auto"``.  ``interior``
    optionally supplies a well-centered interior point, skipping one LP.
    """
    center, _ = _interior(h, interior)
    A, b, idx = _normalized(h)
    uniq = _unique_rows(A, b, h.tol)
    A, b, idx = A[uniq], b[uniq], idx[uniq]
    if method == "auto":
        method = "hull" if h.dim <= 6 and A.shape[0] > h.dim + 1 else "lp"
    if method == "hull":
        try:
            local = _nonredundant_hull(A, b, center)
        except QhullError:
            local = _nonredundant_lp(A, b, h.tol)
    elif method == "lp":
        local = _nonredundant_lp(A, b, h.tol)
    else:
        raise InvalidInput(f"unknown redundancy method {method!r}")
    return np.sort(idx[local])


def dedup_points(points: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Greedy merge of points closer than ``tol`` (scaled by magnitude)."""
    if points.shape[0] == 0:
        return points
    order = np.lexsort(points.T[::-1])
    kept: list[np.ndarray] = []
    for p in points[order]:
        thr = tol * max(1.0, float(np.abs(p).max()))
        if kept:
            arr = np.asarray(kept)
            if np.any(np.abs(arr - p).max(axis=1) <= thr):
                continue
        kept.append(p)
    return np.asarray(kept)


def _vertices_by_subsets(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    K, d = A.shape
    combos = np.asarray(list(combinations(range(K), d)), dtype=np.int64)
    if combos.size == 0:
        return np.zeros((0, d))
    M = A[combos]
    rhs = -b[combos]
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-12
    if not np.any(ok):
        return np.zeros((0, d))
    return np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]


def _vertices_by_dual_hull(A: np.ndarray, b: np.ndarray, center: np.ndarray) -> np.ndarray:
    # each facet n.y + c = 0 of the polar hull maps back to the vertex center + n / (-c)
    dual = _dual_points(A, b, center)
    hull = ConvexHull(dual)
    normals = hull.equations[:, :-1]
    offs = hull.equations[:, -1]
    return center + normals / (-offs)[:, None]


def enumerate_vertices(
    h: HalfspaceSystem, dedup_tol: float = DEDUP_TOL, *, interior=None, facets=None
) -> VertexSet:
    """Extreme points of the bounded, full-dimensional polytope ``h``."""
    center, _ = _interior(h, interior)
    A_all, b_all, _ = _normalized(h)
    if facets is None:
        facets = nonredundant_indices(h, interior=center)
    A = h.normals[facets] / h.row_norms[facets, None]
    b = h.offsets[facets] / h.row_norms[facets]
    d = h.dim
    if A.shape[0] <= d:
        raise Unbounded("fewer than d+1 facets: polytope is unbounded")
    if math.comb(A.shape[0], d) <= MAX_SUBSETS:
        cand = _vertices_by_subsets(A, b)
    else:
        cand = _vertices_by_dual_hull(A, b, center)
    # Per-point scale: one far-off candidate (nearly parallel facets) must not
    # loosen the test for the others.
    scale = np.maximum(1.0, np.abs(cand).max(axis=1)) if cand.size else np.ones(0)
    feasible = np.all(cand @ A_all.T + b_all <= (10 * h.tol * scale)[:, None], axis=1)
    pts = dedup_points(cand[feasible], dedup_tol)
    if pts.shape[0] < d + 1:
        raise Unbounded("too few vertices: polytope is unbounded or degenerate")
    return VertexSet(pts, dedup_tol)


def affine_rank(points: np.ndarray, tol: float = 1e-10) -> int:
    if points.shape[0] <= 1:
        return 0
    diffs = points[1:] - points[0]
    s = np.linalg.svd(diffs, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def delaunay_triangulate(v: VertexSet, perturbation_seed: int = 0) -> SimplicialComplex:
    """Delaunay triangulation with a deterministic index-keyed tie-break.

    Points are lifted to the paraboloid and the lifted height of vertex i is
    nudged by ``eps * u_i`` with ``u`` drawn from a generator seeded by
    ``perturbation_seed``.  Random keys avoid the affine coincidences that
    arithmetic sequences such as ``frac(i * phi)`` produce on square faces.  The lower hull of the
    nudged lift is a regular triangulation that refines the Delaunay
    subdivision, so co-spherical inputs (cubes, regular polygons) always get
    the same simplicial answer.
    """
    pts = v.points
    M, d = pts.shape
    if M < d + 1 or affine_rank(pts) < d:
        raise DegenerateHull(f"{M} points do not span dimension {d}")
    if M == d + 1:
        refs = np.arange(d + 1, dtype=np.int64)[None, :]
        return SimplicialComplex(v, refs)
    center = pts.mean(axis=0)
    q = pts - center
    q = q / np.abs(q).max()
    keys = np.random.default_rng(perturbation_seed).random(M)
    height = np.sum(q * q, axis=1) + 1e-7 * keys
    # A positive affine map of the height keeps the lower hull; stretching it
    # to [0, 1] stops qhull from calling co-spherical lifts flat.
    height = (height - height.min()) / (height.max() - height.min())
    lifted = np.hstack([q, height[:, None]])
    try:
        hull = ConvexHull(lifted)
    except QhullError as exc:
        raise DegenerateHull(str(exc)) from exc
    lower = hull.equations[:, -2] < -1e-12
    refs = np.sort(hull.simplices[lower], axis=1)
    vols = simplex_volumes(pts, refs)
    total = vols.sum()
    keep = vols > 1e-12 * max(total, 1e-300)
    refs, vols = refs[keep], vols[keep]
    order = np.lexsort(refs.T[::-1])
    return SimplicialComplex(v, refs[order], vols[order])


def volume_of(s: SimplicialComplex) -> float:
    return float(np.sum(s.volumes))


def polygon_order(points: np.ndarray) -> np.ndarray:
    """Counter-clockwise ordering of the vertices of a convex polygon."""
    c = points.mean(axis=0)
    ang = np.arctan2(points[:, 1] - c[1], points[:, 0] - c[0])
    return points[np.argsort(ang, kind="stable")]
