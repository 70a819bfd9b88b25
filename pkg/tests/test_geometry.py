import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from conftest import brute_vertices, cube
from polyprof.errors import Degenerate, DegenerateHull, Infeasible, InvalidInput, Unbounded
from polyprof.geometry import (
    BoundingBox,
    HalfspaceSystem,
    VertexSet,
    chebyshev_center,
    delaunay_triangulate,
    enumerate_vertices,
    is_full_dimensional,
    nonredundant_indices,
    polygon_order,
    volume_of,
)

TRIANGLE = HalfspaceSystem([[-1, 0], [0, -1], [1, 1]], [0, 0, -1])


def random_polytope(seed: int, d: int, k: int) -> HalfspaceSystem:
    """Random halfspaces through points near the origin, intersected with a box."""
    r = np.random.default_rng(seed)
    A = r.normal(size=(k, d))
    b = -np.abs(r.normal(size=k)) * 0.5 - 0.05
    return HalfspaceSystem(A, b).stack(BoundingBox(d, 1.0).halfspaces())


def hull_facets(points: np.ndarray) -> np.ndarray:
    """Distinct facet planes of conv(points), as unit (normal, offset) rows."""
    hull = ConvexHull(points)
    eq = np.round(hull.equations, 7)
    return np.unique(eq, axis=0)


# ---- Chebyshev center ----

def test_square_center():
    c, r = chebyshev_center(cube(-1, 1, 2))
    assert np.allclose(c, 0, atol=1e-9) and r == pytest.approx(1.0)


def test_triangle_incircle():
    c, r = chebyshev_center(TRIANGLE)
    expect = (2 - math.sqrt(2)) / 2
    assert r == pytest.approx(expect, abs=1e-9)
    assert np.allclose(c, [expect, expect], atol=1e-8)


def test_empty_slab_is_infeasible():
    with pytest.raises(Infeasible):
        chebyshev_center(HalfspaceSystem([[1.0], [-1.0]], [0.0, 1.0]))


def test_halfplane_is_unbounded():
    with pytest.raises(Unbounded):
        chebyshev_center(HalfspaceSystem([[1.0, 0.0]], [0.0]))


def test_bad_shapes_rejected():
    with pytest.raises(InvalidInput):
        HalfspaceSystem([[1.0, 0.0]], [0.0, 1.0])
    with pytest.raises(InvalidInput):
        HalfspaceSystem([[np.nan, 0.0]], [0.0])


def test_zero_rows():
    h = cube(-1, 1, 2).stack(HalfspaceSystem([[0.0, 0.0]], [-1.0]))
    assert not h.trivially_empty()
    assert is_full_dimensional(h)
    bad = cube(-1, 1, 2).stack(HalfspaceSystem([[0.0, 0.0]], [1.0]))
    assert bad.trivially_empty()
    assert not is_full_dimensional(bad)


def test_full_dimensionality():
    assert is_full_dimensional(cube(-1, 1, 2))
    slab = HalfspaceSystem([[1.0, 0.0], [-1.0, 0.0]], [0.0, 0.0]).stack(BoundingBox(2).halfspaces())
    assert not is_full_dimensional(slab)


# ---- non-redundancy ----

def test_square_with_redundant_row():
    h = cube(-1, 1, 2).stack(HalfspaceSystem([[1.0, 0.0]], [-2.0]))
    for method in ("lp", "hull", "auto"):
        assert nonredundant_indices(h, method).tolist() == [0, 1, 2, 3]


def test_duplicate_rows_keep_lowest_index():
    h = cube(-1, 1, 2).stack(HalfspaceSystem([[2.0, 0.0]], [-2.0]))
    assert nonredundant_indices(h).tolist() == [0, 1, 2, 3]


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_cube_all_rows_are_faces(d):
    assert nonredundant_indices(cube(-1, 1, d)).tolist() == list(range(2 * d))


def test_lower_dimensional_raises():
    slab = HalfspaceSystem([[1.0, 0.0], [-1.0, 0.0]], [0.0, 0.0]).stack(BoundingBox(2).halfspaces())
    with pytest.raises(Degenerate):
        nonredundant_indices(slab)


def test_unknown_method():
    with pytest.raises(InvalidInput):
        nonredundant_indices(cube(0, 1, 2), "simplex")


@given(st.integers(0, 10_000), st.integers(2, 3), st.integers(1, 6))
def test_face_vertex_duality(seed, d, k):
    """Facets from the H-side equal facets rebuilt from the vertices."""
    h = random_polytope(seed, d, k)
    faces = nonredundant_indices(h)
    pts = brute_vertices(h)
    planes = hull_facets(pts)
    assert len(faces) == len(planes)
    assert np.array_equal(np.sort(faces), np.sort(nonredundant_indices(h, "lp")))


# ---- vertices ----

def test_square_and_cube_vertices():
    assert len(enumerate_vertices(cube(0, 1, 2))) == 4
    v = enumerate_vertices(cube(-1, 1, 3))
    assert len(v) == 8
    assert np.allclose(np.abs(v.points), 1.0)


def test_unbounded_vertices():
    with pytest.raises((Unbounded, Degenerate)):
        enumerate_vertices(HalfspaceSystem([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]))


@given(st.integers(0, 10_000), st.integers(2, 3), st.integers(1, 7))
def test_vertices_match_intersection_oracle(seed, d, k):
    h = random_polytope(seed, d, k)
    got = enumerate_vertices(h).points
    want = brute_vertices(h)
    assert len(got) == len(want)
    for p in want:
        assert np.min(np.linalg.norm(got - p, axis=1)) < 1e-7


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(1, 8))
def test_vertex_soundness(seed, d, k):
    h = random_polytope(seed, d, k)
    A = h.normals / h.row_norms[:, None]
    b = h.offsets / h.row_norms
    for p in enumerate_vertices(h).points:
        res = A @ p + b
        assert np.all(res <= 1e-8)
        assert np.sum(np.abs(res) <= 1e-7) >= d


def test_dual_hull_path_matches_subsets():
    # Many facets push past the subset budget and exercise the dual-hull path.
    ang = np.linspace(0, 2 * np.pi, 120, endpoint=False)
    ring = np.column_stack([np.cos(ang), np.sin(ang)])
    polar = np.vstack([np.column_stack([ring * np.cos(t), np.full(120, np.sin(t))]) for t in np.linspace(-1.2, 1.2, 5)])
    h = HalfspaceSystem(polar, -np.ones(len(polar)))
    v = enumerate_vertices(h)
    hull = ConvexHull(v.points)
    assert len(hull.vertices) == len(v)
    assert len(nonredundant_indices(h)) == len(polar)


def test_far_candidate_does_not_loosen_feasibility():
    # y <= 0.5 and y >= -0.5 + 1e-4 x meet near x = 1e4; the corner (1, 0.5)
    # is then cut off by only 5e-5 and must not come back as a vertex.
    A = [[1, 0], [-1, 0], [0, 1], [1e-4, -1], [1, 1]]
    b = [-1, -1, -0.5, -0.5, -1.49995]
    h = HalfspaceSystem(A, b)
    v = enumerate_vertices(h).points
    assert np.all(v @ np.array(A, float).T + b <= 1e-8)
    assert len(v) == len(brute_vertices(h)) == 5


# ---- triangulation ----

def test_square_two_triangles():
    tri = delaunay_triangulate(enumerate_vertices(cube(-1, 1, 2)))
    assert len(tri) == 2
    assert volume_of(tri) == pytest.approx(4.0, abs=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_unit_simplex(d):
    pts = np.vstack([np.zeros(d), np.eye(d)])
    tri = delaunay_triangulate(VertexSet(pts))
    assert len(tri) == 1
    assert volume_of(tri) == pytest.approx(1 / math.factorial(d))


@pytest.mark.parametrize("seed", range(4))
def test_cube_tetrahedra(seed):
    tri = delaunay_triangulate(enumerate_vertices(cube(-1, 1, 3)), perturbation_seed=seed)
    assert len(tri) in (5, 6)
    assert abs(volume_of(tri) - 8.0) < 1e-9


def test_triangulation_deterministic():
    v = enumerate_vertices(random_polytope(7, 3, 6))
    a, b = delaunay_triangulate(v), delaunay_triangulate(v)
    assert np.array_equal(a.vertex_refs, b.vertex_refs)
    assert np.array_equal(a.volumes, b.volumes)


def test_flat_points_rejected():
    with pytest.raises(DegenerateHull):
        delaunay_triangulate(VertexSet([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]))


def _interior_disjoint(tri, rng, n=20) -> bool:
    P = tri.vertices.points
    simplices = [P[r] for r in tri.vertex_refs]
    inv = []
    for S in simplices:
        T = (S[1:] - S[0]).T
        inv.append((S[0], np.linalg.inv(T)))
    for i, S in enumerate(simplices):
        w = rng.dirichlet(np.ones(len(S)), size=n)
        X = w @ S
        for j, (o, Ti) in enumerate(inv):
            if i == j:
                continue
            lam = (X - o) @ Ti.T
            full = np.column_stack([1 - lam.sum(axis=1), lam])
            if np.any(np.all(full > 1e-9, axis=1)):
                return False
    return True


@given(st.integers(0, 10_000), st.integers(2, 3), st.integers(2, 8))
def test_triangulation_validity(seed, d, k):
    h = random_polytope(seed, d, k)
    v = enumerate_vertices(h)
    tri = delaunay_triangulate(v)
    assert np.all(tri.volumes > 0)
    assert volume_of(tri) == pytest.approx(ConvexHull(v.points).volume, rel=1e-9)
    assert _interior_disjoint(tri, np.random.default_rng(seed))


def test_polygon_order_ccw():
    pts = np.array([[1, 1], [-1, -1], [1, -1], [-1, 1]], float)
    poly = polygon_order(pts)
    x, y = poly[:, 0], poly[:, 1]
    assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) == pytest.approx(4.0)


def test_box_rows_and_volume():
    box = BoundingBox(3, 2.0)
    h = box.halfspaces()
    assert h.n_rows == 6
    assert np.allclose(h.offsets, -2.0)
    assert box.volume == 64.0
    with pytest.raises(InvalidInput):
        BoundingBox(0)
    with pytest.raises(InvalidInput):
        BoundingBox(2, -1.0)
