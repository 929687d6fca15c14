import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from prickliness.generators import gen_element_distinctness_1d, gen_random_1d, gen_theorem1_1d
from prickliness.prickliness1d import (AngularSector, brute_force_1d, compare_angle,
                                       prickliness_1d, sector)
from prickliness.terrain import Terrain1D, VertexClass, is_local_max, pi_v


def test_sector_of_a_peak(peak1d):
    s = sector(peak1d, 1)
    assert s.start == (1, 1) and s.end == (-1, 1)
    assert s.degrees() == pytest.approx((45.0, 135.0))


def test_sector_matches_sampled_local_max(peak1d):
    s = sector(peak1d, 1)
    for k in range(360):
        # rational direction close to k degrees
        w = (round(1000 * math.cos(math.radians(k))), round(1000 * math.sin(math.radians(k))))
        assert s.contains(w) == is_local_max(peak1d, 1, w), k


def test_concave_and_collinear_sectors():
    T = Terrain1D([(0, 1), (1, 0), (2, 1)])
    assert sector(T, 1).empty
    T = Terrain1D([(0, 0), (1, 1), (2, 2)])
    s = sector(T, 1)
    assert s.contains((-1, 1)) and not s.contains((-1, 2))
    assert prickliness_1d(T).value == 0
    with pytest.raises(ValueError):
        sector(T, 0)


def test_compare_angle_orders_the_circle():
    vs = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
    for i in range(len(vs)):
        for j in range(len(vs)):
            assert compare_angle(vs[i], vs[j]) == (i > j) - (i < j)


def test_single_peak(peak1d):
    r = prickliness_1d(peak1d)
    assert r.value == 1 and r.vertices == [1]
    b = brute_force_1d(peak1d)
    assert b.value == 1 and b.witness in ((1, 1), (-1, 1))


def test_no_convex_vertices():
    T = Terrain1D([(0, 3), (1, 1), (2, 0), (3, 0)])
    assert prickliness_1d(T).value == brute_force_1d(T).value == 0


def test_shared_endpoint_counts_both():
    # a flat top: the two sectors [90,135] and [45,90] share only (0,1)
    T = Terrain1D([(0, 0), (1, 1), (2, 1), (3, 0)])
    assert sector(T, 1).end == (-1, 1) and sector(T, 2).start == (1, 1)
    assert prickliness_1d(T).value == 2
    assert brute_force_1d(T).value == 2


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 120), st.integers(0, 10 ** 9))
def test_sweep_equals_brute_force(n, seed):
    T = gen_random_1d(n, seed)
    a, b = prickliness_1d(T), brute_force_1d(T)
    assert a.value == b.value
    if a.value:
        # witness is genuinely covered value times, in the closed upper half-circle
        assert pi_v(T, a.witness) == a.value
        assert a.witness[1] >= 0


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 80), st.integers(0, 10 ** 9))
def test_at_least_the_classical_peaks(n, seed):
    T = gen_random_1d(n, seed)
    v = prickliness_1d(T).value
    assert v >= pi_v(T, (0, 1))
    if T.convex_internal:
        assert v >= 1


def test_zigzag_family():
    T, _ = gen_theorem1_1d(100)
    assert prickliness_1d(T).value == 2 == brute_force_1d(T).value
    ws = range(2, T.n - 1, 2)
    assert all(T.classes[w] is not VertexClass.CONVEX_INTERNAL for w in ws)


def test_element_distinctness_values():
    assert prickliness_1d(gen_element_distinctness_1d([1, 2, 3])).value == 3
    # duplicates: every separator plus all copies of the repeated element
    T = gen_element_distinctness_1d([1, 2, 2])
    assert prickliness_1d(T).value == brute_force_1d(T).value == 4


def test_element_sectors_for_160_25():
    T = gen_element_distinctness_1d([160, 25])
    for v, x in ((1, 160), (5, 25)):
        a, b = sector(T, v).degrees()
        assert (a + b) / 2 == pytest.approx(x * 180 / 161, abs=1e-6)
        assert b - a == pytest.approx(36 / 161, abs=1e-6)
