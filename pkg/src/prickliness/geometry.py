"""Exact rational geometry kernel.

Scalars are :class:`fractions.Fraction`; points and vectors are plain tuples of
them.  Every predicate here is exact, and every region (triangle, polygon,
cone) is treated as a closed set.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

Rat = Fraction
Vec2 = Tuple[Fraction, Fraction]
Vec3 = Tuple[Fraction, Fraction, Fraction]
Number = Union[int, Fraction, str]

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"


class GeometryError(ValueError):
    """Raised for degenerate or malformed geometric input."""


def rat(x: Number) -> Fraction:
    """Exact conversion; decimal strings and floats keep their exact value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def vec2(x: Number, y: Number) -> Vec2:
    return (rat(x), rat(y))


def vec3(x: Number, y: Number, z: Number) -> Vec3:
    return (rat(x), rat(y), rat(z))


def sub(a, b):
    return tuple(p - q for p, q in zip(a, b))


def add(a, b):
    return tuple(p + q for p, q in zip(a, b))


def scale(a, s):
    return tuple(p * s for p in a)


def dot(a, b):
    return sum(p * q for p, q in zip(a, b))


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def sign(x) -> int:
    return (x > 0) - (x < 0)


def orient2d(a, b, c) -> int:
    """+1 if a, b, c turn counter-clockwise, -1 if clockwise, 0 if collinear."""
    return sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def orient3d(a, b, c, d) -> int:
    """Sign of det(b - a, c - a, d - a)."""
    return sign(dot(cross(sub(b, a), sub(c, a)), sub(d, a)))


# ---------------------------------------------------------------------------
# integer helpers


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def common_denominator(values) -> int:
    return reduce(lcm, (Fraction(v).denominator for v in values), 1)


def primitive(v: Sequence[int]) -> Tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (sign kept)."""
    g = reduce(gcd, (abs(int(c)) for c in v), 0)
    if g == 0:
        return tuple(int(c) for c in v)
    return tuple(int(c) // g for c in v)


def integer_direction(v) -> Tuple[int, ...]:
    """Positive multiple of a rational vector with coprime integer entries."""
    d = common_denominator(v)
    return primitive([int(Fraction(c) * d) for c in v])


def exact_matmul(a, b) -> np.ndarray:
    """Exact integer product ``a @ b``.

    Uses int64 when the entries are small enough that no partial sum can
    overflow, Python integers (object arrays) otherwise.
    """
    a = np.asarray(a, dtype=object) if not isinstance(a, np.ndarray) else a
    b = np.asarray(b, dtype=object) if not isinstance(b, np.ndarray) else b
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[-1]), dtype=np.int64)
    ma = max(abs(int(a.max())), abs(int(a.min())))
    mb = max(abs(int(b.max())), abs(int(b.min())))
    bound = ma * mb * a.shape[-1]
    if bound < 2 ** 62:
        return a.astype(np.int64) @ b.astype(np.int64)
    return a.astype(object) @ b.astype(object)


# ---------------------------------------------------------------------------
# directions


@dataclass(frozen=True)
class Direction3:
    """A nonzero direction, canonicalised so its largest |component| is 1.

    Antipodal directions are different objects; only positive scaling is
    factored out.
    """

    vector: Vec3

    def __post_init__(self):
        v = tuple(rat(c) for c in self.vector)
        m = max(abs(c) for c in v)
        if m == 0:
            raise GeometryError("zero vector has no direction")
        object.__setattr__(self, "vector", tuple(c / m for c in v))

    @classmethod
    def of(cls, x: Number, y: Number, z: Number) -> "Direction3":
        return cls((rat(x), rat(y), rat(z)))

    @property
    def x(self) -> Fraction:
        return self.vector[0]

    @property
    def y(self) -> Fraction:
        return self.vector[1]

    @property
    def z(self) -> Fraction:
        return self.vector[2]

    def integer(self) -> Tuple[int, int, int]:
        return integer_direction(self.vector)

    def __neg__(self) -> "Direction3":
        return Direction3(tuple(-c for c in self.vector))

    def as_floats(self) -> Tuple[float, float, float]:
        return tuple(float(c) for c in self.vector)

    def __str__(self) -> str:
        return "(" + ",".join(format_rat(c) for c in self.vector) + ")"


def canonicalize(v) -> Direction3:
    return Direction3(tuple(rat(c) for c in v))


def plane_pair_direction(n1, n2) -> Optional[Direction3]:
    """Direction of the line shared by two planes through the origin."""
    c = cross(tuple(map(rat, n1)), tuple(map(rat, n2)))
    if c == (0, 0, 0):
        return None
    return Direction3(c)


def format_rat(x: Fraction) -> str:
    """Shortest exact token: an integer, a terminating decimal, or ``p/q``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    scaled = abs(x.numerator) * (10 ** digits // x.denominator)
    s = str(scaled).rjust(digits + 1, "0")
    s = s[:-digits] + "." + s[-digits:]
    s = s.rstrip("0").rstrip(".")
    return ("-" if x < 0 else "") + s


# ---------------------------------------------------------------------------
# ray / triangle


class RayHit(NamedTuple):
    t: Fraction
    on_boundary: bool


def _dominant_drop(n) -> int:
    a = [abs(c) for c in n]
    return a.index(max(a))


def _drop(p, axis):
    return tuple(c for i, c in enumerate(p) if i != axis)


def ray_triangle_intersect(origin, direction, tri) -> Optional[RayHit]:
    """Smallest ``t >= 0`` with ``origin + t*direction`` in the closed triangle."""
    o = tuple(map(rat, origin))
    d = tuple(map(rat, direction))
    a, b, c = (tuple(map(rat, p)) for p in tri)
    if d == (0, 0, 0):
        raise GeometryError("ray direction must be nonzero")
    n = cross(sub(b, a), sub(c, a))
    if n == (0, 0, 0):
        raise GeometryError("degenerate triangle")
    axis = _dominant_drop(n)
    a2, b2, c2 = (_drop(p, axis) for p in (a, b, c))
    if orient2d(a2, b2, c2) < 0:
        b2, c2 = c2, b2
    denom = dot(n, d)
    if denom != 0:
        t = dot(n, sub(a, o)) / denom
        if t < 0:
            return None
        q = _drop(add(o, scale(d, t)), axis)
        signs = (orient2d(a2, b2, q), orient2d(b2, c2, q), orient2d(c2, a2, q))
        if min(signs) < 0:
            return None
        return RayHit(t, 0 in signs)
    if dot(n, sub(o, a)) != 0:
        return None
    # ray lies in the triangle's plane: clip the 2D ray against the edges
    o2, d2 = _drop(o, axis), _drop(d, axis)
    lo, hi = Fraction(0), None
    for p, q in ((a2, b2), (b2, c2), (c2, a2)):
        e = sub(q, p)
        c0 = cross2(e, sub(o2, p))
        c1 = cross2(e, d2)
        if c1 == 0:
            if c0 < 0:
                return None
            continue
        root = -c0 / c1
        if c1 > 0:
            lo = max(lo, root)
        else:
            hi = root if hi is None else min(hi, root)
    if hi is not None and lo > hi:
        return None
    return RayHit(lo, True)


# ---------------------------------------------------------------------------
# polygons


def check_convex_ccw(poly) -> None:
    n = len(poly)
    if n < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    turns = [orient2d(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) for i in range(n)]
    if any(t < 0 for t in turns):
        raise GeometryError("polygon is not convex and counter-clockwise")
    if all(t == 0 for t in turns):
        raise GeometryError("degenerate polygon")
    area2 = sum(cross2(poly[i], poly[(i + 1) % n]) for i in range(n))
    if area2 <= 0:
        raise GeometryError("polygon is not convex and counter-clockwise")


def point_in_convex_polygon_2d(p, poly) -> str:
    """Classify ``p`` against a closed convex CCW polygon."""
    poly = [tuple(map(rat, q)) for q in poly]
    check_convex_ccw(poly)
    p = tuple(map(rat, p))
    n = len(poly)
    on_edge = False
    for i in range(n):
        s = orient2d(poly[i], poly[(i + 1) % n], p)
        if s < 0:
            return OUTSIDE
        if s == 0:
            on_edge = True
    return BOUNDARY if on_edge else INSIDE


def clip_polygon(poly, h):
    """Clip a convex polygon to the closed halfplane ``a*x + b*y + c <= 0``.

    Returns the clipped vertex list (possibly a segment, a point, or empty).
    """
    a, b, c = h
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] + c
        fq = a * q[0] + b * q[1] + c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            r = Fraction(fp) / (fp - fq)
            out.append((p[0] + r * (q[0] - p[0]), p[1] + r * (q[1] - p[1])))
    dedup = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    while len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def polygon_area2(poly) -> Fraction:
    """Twice the signed area (positive for CCW)."""
    n = len(poly)
    return sum((cross2(poly[i], poly[(i + 1) % n]) for i in range(n)), Fraction(0))
