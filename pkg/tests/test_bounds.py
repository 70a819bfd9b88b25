import json
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyprof.bounds import (
    avg_face_bound,
    bounds_report,
    central_regions,
    format_table,
    multilayer_asymptotic_upper,
    multilayer_regions_upper,
    multilayer_simplices_bounds,
    one_layer_simplices_lower,
    one_layer_simplices_upper,
    param_count,
    regions_as_simplices_lower,
    zaslavsky_regions,
)
from polyprof.errors import UnknownSetting


def test_zaslavsky():
    assert zaslavsky_regions(3, 2) == 7
    assert zaslavsky_regions(0, 5) == 1
    assert zaslavsky_regions(7, 3) == 64


def test_central():
    assert central_regions(3, 2) == 6
    assert central_regions(4, 3) == 14
    for d in range(1, 6):
        assert central_regions(1, d) == 2


@pytest.mark.parametrize("n,upper,lower", [(7, 482, 77), (8, 686, 116), (9, 942, 166), (10, 1256, 230)])
def test_one_layer_table(n, upper, lower):
    assert one_layer_simplices_upper(3, n) == upper
    assert one_layer_simplices_lower(3, n) == lower


def test_one_layer_trivial():
    assert one_layer_simplices_upper(1, 1) == 4


def test_multilayer_examples():
    assert multilayer_simplices_bounds(3, 7, 1) == (482, 64)
    assert regions_as_simplices_lower(2, (4, 4)) == 44
    assert multilayer_regions_upper(3, (40, 20)) == 10701 * 1351 == 14_457_051
    assert multilayer_regions_upper(3, (9,)) == zaslavsky_regions(9, 3)


def test_multilayer_grid_strict():
    for d in range(1, 5):
        for n in range(1, 21):
            for L in range(1, 5):
                up, lo = multilayer_simplices_bounds(d, n, L)
                assert up > lo


def test_face_recursion_by_hand():
    # Two layers, d = 2, widths (3, 2): F1 = 2*3*(1+2) + 2*2*(1+3) = 34,
    # R1 = 1+3+3 = 7, F2 = 2*2*(1+1)*7 + (1+2)*34 = 158.
    assert multilayer_simplices_bounds(2, 3, 1)[0] == 34
    from polyprof.bounds import multilayer_faces_upper

    assert multilayer_faces_upper(2, (3, 2)) == 158


def test_asymptotic_is_leading_term():
    for d, L in ((2, 2), (3, 2), (2, 3)):
        n = 4000
        exact = multilayer_simplices_bounds(d, n, L)[0]
        lead = multilayer_asymptotic_upper(d, n, L)
        assert float(Fraction(exact) / lead) == pytest.approx(1.0, rel=0.01)
    assert multilayer_asymptotic_upper(3, 7, 1) == Fraction(2 * 7**3, factorial(2))


@given(st.integers(1, 50), st.integers(1, 10_000))
def test_sandwich_exact(d, n):
    lo, up = one_layer_simplices_lower(d, n), one_layer_simplices_upper(d, n)
    assert isinstance(lo, int) and isinstance(up, int)
    assert lo <= up


def test_no_overflow_at_scale():
    up, lo = multilayer_simplices_bounds(50, 10_000, 50)
    assert up > lo > 0
    assert up.bit_length() > 1000


def test_avg_face():
    assert avg_face_bound("one_layer", 3) == 7
    assert avg_face_bound("multilayer_d2") == 4
    assert avg_face_bound("zero_bias", 3) == 8
    assert avg_face_bound("lowrank_multilayer", 5, 2) == 8
    assert avg_face_bound("lowrank_one_layer", d0=2) == 5
    with pytest.raises(UnknownSetting):
        avg_face_bound("skip_connections", 3)


def test_param_count():
    assert param_count((3, 40, 20, 1)) == 1001
    assert param_count((1, 1)) == 2
    # Theta(L n^2): each extra width-n layer adds exactly n^2 + n, and the
    # total over (L-1) n^2 tends to 1.
    for n in range(10, 101, 10):
        for L in (2, 3, 5):
            extra = param_count((3,) + (n,) * (L + 1) + (1,)) - param_count((3,) + (n,) * L + (1,))
            assert extra == n * n + n
    for L in (2, 4, 8):
        ratio = [param_count((3,) + (n,) * L + (1,)) / ((L - 1) * n * n) for n in (10, 30, 100)]
        assert ratio[0] > ratio[1] > ratio[2] > 1
        assert ratio[2] < 1.1


def test_report_and_table():
    reps = [bounds_report((3, n, 1)) for n in (7, 8, 9, 10)]
    table = format_table(reps, {(3, 7, 1): 410})
    lines = table.splitlines()
    assert "482" in lines[2] and "1256" in lines[2]
    assert lines[3].split("|")[1].strip() == "410"
    assert "77" in lines[4] and "230" in lines[4]
    assert "regions_as_simplices_lower" in table
    rep = bounds_report((3, 40, 20, 1), rank=2).to_dict()
    json.dumps(rep)
    assert rep["values"]["avg_faces_lowrank_one_layer"] == 5
    assert rep["values"]["regions_upper"] == 14_457_051


def test_binomial_oracle():
    """Cross-check binomial sums against a float-free Pascal triangle."""
    row = [1]
    for m in range(1, 31):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
        for k in range(0, m + 1):
            assert zaslavsky_regions(m, k) == sum(row[: k + 1])
    assert comb(30, 15) == row[15]
