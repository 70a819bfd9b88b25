import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from conftest import one_layer_net, zero_net
from polyprof.bounds import one_layer_simplices_lower, one_layer_simplices_upper
from polyprof.errors import Degenerate, EmptyProfile, InvalidInput
from polyprof.geometry import BoundingBox, enumerate_vertices
from polyprof.network import ActivationPattern, InitConfig, build_initialized, region_halfspaces
from polyprof.profiler import (
    NetworkProfile,
    RegionProfile,
    histogram_from_profile_dict,
    profile_network,
    profile_region,
    profile_to_dict,
    simplex_histogram,
    summarize,
)
from polyprof.regions import EnumerationConfig

BOX3 = BoundingBox(3, 1.0)


def fake_profile(counts, faces=None):
    faces = faces or [4] * len(counts)
    regs = tuple(
        RegionProfile(ActivationPattern.from_array([i & 1, i >> 1 & 1], (0, 2)), 4, f, c, 1.0)
        for i, (c, f) in enumerate(zip(counts, faces))
    )
    return NetworkProfile(regs, 2)


def test_zero_net_is_the_cube():
    net = zero_net(3)
    prof = profile_network(net, EnumerationConfig("exhaustive", box=BOX3))
    assert prof.n_regions == 1
    r = prof.regions[0]
    assert (r.n_vertices, r.n_faces) == (8, 6)
    assert r.volume == pytest.approx(8.0)
    assert prof.total_volume == pytest.approx(8.0)


def test_halved_square():
    net = one_layer_net([[1.0, 0.0]], [0.0])
    prof = profile_network(net, EnumerationConfig("exhaustive", box=BoundingBox(2, 1.0)))
    assert prof.n_regions == 2
    for r in prof.regions:
        assert (r.n_faces, r.n_vertices, r.n_simplices) == (4, 4, 2)
        assert r.volume == pytest.approx(2.0)


def test_box_faces_flag():
    net = one_layer_net([[1.0, 0.0]], [0.0])
    prof = profile_network(net, EnumerationConfig("exhaustive", box=BoundingBox(2, 1.0)), include_box_faces=False)
    assert [r.n_faces for r in prof.regions] == [1, 1]


def test_degenerate_pattern():
    net = one_layer_net([[1.0, 0.0]], [5.0])  # line x = -5 misses the box
    with pytest.raises(Degenerate):
        profile_region(net, ActivationPattern.from_array([0], (0, 1)), BoundingBox(2, 1.0))


@pytest.mark.parametrize("seed", range(3))
def test_faces_match_vrep_oracle(seed):
    net = build_initialized((3, 7, 1), InitConfig("xavier-uniform", 0.01, seed))
    prof = profile_network(net, EnumerationConfig("exhaustive", box=BOX3))
    for r in prof.regions[:15]:
        v = enumerate_vertices(region_halfspaces(net, r.pattern, BOX3)).points
        planes = np.unique(np.round(ConvexHull(v).equations, 7), axis=0)
        assert r.n_faces == len(planes)
        assert r.volume == pytest.approx(ConvexHull(v).volume, rel=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_sandwich_and_conservation(seed):
    net = build_initialized((3, 7, 1), InitConfig("xavier-uniform", 0.01, seed))
    prof = profile_network(net, EnumerationConfig("exhaustive", box=BOX3))
    assert one_layer_simplices_lower(3, 7) <= prof.total_simplices <= one_layer_simplices_upper(3, 7)
    assert prof.total_volume == pytest.approx(8.0, rel=1e-6)
    for r in prof.regions:
        assert r.n_simplices >= 1 and r.n_faces >= 4 and r.n_vertices >= 4 and r.volume > 0


def test_modes_agree():
    net = build_initialized((3, 8, 4, 1), InitConfig("kaiming", 0.01, 1))
    a = profile_network(net, EnumerationConfig("exhaustive", box=BOX3))
    b = profile_network(net, EnumerationConfig("traverse", box=BOX3))
    assert [r.to_dict() for r in a.regions] == [r.to_dict() for r in b.regions]


def test_threads_do_not_change_output(monkeypatch):
    net = build_initialized((3, 10, 5, 1), InitConfig(seed=2))
    cfg = EnumerationConfig("sample", 3000, 0, BOX3)
    one = profile_to_dict(profile_network(net, cfg, threads=1))
    two = profile_to_dict(profile_network(net, cfg, threads=2))
    assert one == two
    monkeypatch.setenv("POLYPROF_THREADS", "3")
    assert profile_to_dict(profile_network(net, cfg, threads=1)) == one


def test_histogram_small():
    h = simplex_histogram(fake_profile([1, 2, 9]), 5)
    assert h.bins == ((1, 5, 2), (6, 10, 1))
    assert h.to_csv() == "bin_lo,bin_hi,count\n1,5,2\n6,10,1\n"
    assert simplex_histogram(NetworkProfile((), 3), 5).bins == ()
    with pytest.raises(InvalidInput):
        simplex_histogram(fake_profile([1]), 0)


@given(st.lists(st.integers(1, 60), min_size=1, max_size=4).map(lambda xs: xs[:4]), st.integers(1, 9))
def test_histogram_partitions(counts, width):
    h = simplex_histogram(fake_profile(counts), width)
    assert h.total == len(counts)
    assert h.bins[0][0] == 1
    for (lo, hi, _), (lo2, _, _) in zip(h.bins, h.bins[1:]):
        assert lo2 == hi + 1


def test_summary_definition():
    s = summarize(fake_profile([1, 2, 9], faces=[4, 5, 6]))
    assert s.omega == 9
    assert s.simple_fraction == pytest.approx(2 / 3)
    assert s.avg_faces == pytest.approx(5.0)
    assert summarize(fake_profile([1])).simple_fraction == 0.0
    with pytest.raises(EmptyProfile):
        summarize(NetworkProfile((), 3))


def test_histogram_from_json_alone():
    net = build_initialized((3, 40, 20, 1), InitConfig(seed=0))
    prof = profile_network(net, EnumerationConfig("sample", 2000, 0, BOX3))
    doc = profile_to_dict(prof)
    assert doc["region_count_kind"] == "lower_bound"
    assert histogram_from_profile_dict(doc, 5) == simplex_histogram(prof, 5)
    assert simplex_histogram(prof, 5).total == prof.n_regions
