from fractions import Fraction as F
import random

import pytest
from hypothesis import given, strategies as st

from prickliness.geometry import (BOUNDARY, INSIDE, OUTSIDE, Direction3, GeometryError,
                                  canonicalize, cross, dot, exact_matmul, format_rat,
                                  orient3d, plane_pair_direction, point_in_convex_polygon_2d,
                                  ray_triangle_intersect, sub)

ints = st.integers(-50, 50)
vec3 = st.tuples(ints, ints, ints)


def test_orient3d_examples():
    o, x, y = (0, 0, 0), (1, 0, 0), (0, 1, 0)
    assert orient3d(o, x, y, (0, 0, 1)) == 1
    assert orient3d(o, x, y, (0, 0, -1)) == -1
    assert orient3d(o, x, y, (3, 7, 0)) == 0


@given(vec3, vec3, vec3, vec3)
def test_orient3d_antisymmetric(a, b, c, d):
    s = orient3d(a, b, c, d)
    assert orient3d(b, a, c, d) == -s
    assert orient3d(a, c, b, d) == -s
    assert orient3d(a, b, d, c) == -s


def test_plane_pair_direction_examples():
    assert plane_pair_direction((0, 0, 1), (1, 0, 0)) == Direction3.of(0, 1, 0)
    assert plane_pair_direction((1, 1, 0), (2, 2, 0)) is None
    # hand expansion of the determinant for (1,0,1) x (0,1,1)
    assert plane_pair_direction((1, 0, 1), (0, 1, 1)) == Direction3.of(-1, -1, 1)


@given(vec3, vec3)
def test_plane_pair_direction_orthogonal(n1, n2):
    d = plane_pair_direction(n1, n2)
    if d is not None:
        assert dot(d.vector, n1) == 0 and dot(d.vector, n2) == 0


@given(vec3, st.fractions(min_value=F(1, 100), max_value=100))
def test_canonicalize_idempotent_and_scale_free(v, lam):
    if v == (0, 0, 0):
        return
    d = canonicalize(v)
    assert canonicalize(d.vector) == d
    assert canonicalize(tuple(lam * c for c in v)) == d
    assert max(abs(c) for c in d.vector) == 1


def test_antipodes_are_distinct():
    assert Direction3.of(0, 0, 1) != Direction3.of(0, 0, -1)
    assert -Direction3.of(1, 2, 3) == Direction3.of(-1, -2, -3)
    with pytest.raises(GeometryError):
        Direction3.of(0, 0, 0)


def test_ray_triangle_examples():
    tri = [(-1, -1, 0), (2, -1, 0), (0, 2, 0)]
    hit = ray_triangle_intersect((0, 0, 2), (0, 0, -1), tri)
    assert hit.t == 2 and not hit.on_boundary
    assert ray_triangle_intersect((0, 0, 2), (1, 0, 0), tri) is None
    # straight down onto the edge from (-1,-1) to (2,-1)
    hit = ray_triangle_intersect((0, -1, 5), (0, 0, -1), tri)
    assert hit.t == 5 and hit.on_boundary
    with pytest.raises(GeometryError):
        ray_triangle_intersect((0, 0, 1), (0, 0, -1), [(0, 0, 0), (1, 1, 0), (2, 2, 0)])


def _barycentric_hit(o, d, tri):
    # Cramer's rule on o + t d = a + u (b - a) + v (c - a)
    a, b, c = tri
    e1, e2 = sub(b, a), sub(c, a)
    nd = tuple(-x for x in d)
    det = dot(nd, cross(e1, e2))
    if det == 0:
        return "parallel"
    r = sub(o, a)
    t = F(dot(r, cross(e1, e2)), det)
    u = F(dot(nd, cross(r, e2)), det)
    v = F(dot(nd, cross(e1, r)), det)
    if t >= 0 and u >= 0 and v >= 0 and u + v <= 1:
        return t
    return None


def test_ray_triangle_matches_barycentric_solver():
    rng = random.Random(5)
    checked = 0
    for _ in range(1000):
        tri = [tuple(rng.randint(-6, 6) for _ in range(3)) for _ in range(3)]
        if cross(sub(tri[1], tri[0]), sub(tri[2], tri[0])) == (0, 0, 0):
            continue
        o = tuple(rng.randint(-6, 6) for _ in range(3))
        d = tuple(rng.randint(-3, 3) for _ in range(3))
        if d == (0, 0, 0):
            continue
        ref = _barycentric_hit(o, d, tri)
        if ref == "parallel":
            continue
        hit = ray_triangle_intersect(o, d, tri)
        assert (hit.t if hit else None) == ref
        checked += 1
    assert checked > 800


def test_point_in_convex_polygon():
    sq = [(0, 0), (2, 0), (2, 2), (0, 2)]
    assert point_in_convex_polygon_2d((1, 1), sq) == INSIDE
    assert point_in_convex_polygon_2d((2, 2), sq) == BOUNDARY
    assert point_in_convex_polygon_2d((4, 4), sq) == OUTSIDE
    with pytest.raises(GeometryError):
        point_in_convex_polygon_2d((0, 0), [(0, 0), (2, 2), (2, 0), (0, 2)])
    with pytest.raises(GeometryError):
        point_in_convex_polygon_2d((0, 0), [(0, 0), (1, 1), (2, 2)])


@pytest.mark.parametrize("x,s", [(F(3), "3"), (F(-1, 4), "-0.25"), (F(1, 3), "1/3"),
                                 (F(7, 20), "0.35"), (F(-5, 6), "-5/6"), (F(0), "0")])
def test_format_rat(x, s):
    assert format_rat(x) == s
    assert F(s) == x


def test_exact_matmul_falls_back_to_big_ints():
    big = 10 ** 30
    r = exact_matmul([[big, 1]], [[big], [1]])
    assert int(r[0, 0]) == big * big + 1
    assert exact_matmul([[2, 3]], [[4], [5]])[0, 0] == 23
