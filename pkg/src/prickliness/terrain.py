"""Terrain models, validation, vertex classification and directional peaks."""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (Direction3, Vec2, Vec3, common_denominator, cross2,
                       dot, exact_matmul, integer_direction, orient2d, rat,
                       sign, sub)


class TerrainError(ValueError):
    """Validation failure; ``kind`` names the defect, ``indices`` the culprits."""

    def __init__(self, kind: str, indices=(), message: str = ""):
        self.kind = kind
        self.indices = tuple(indices)
        super().__init__(message or f"{kind}: {self.indices}")


class VertexClass(enum.Enum):
    CONVEX_INTERNAL = "ConvexInternal"
    CONCAVE_INTERNAL = "ConcaveInternal"
    SADDLE_OR_OTHER = "SaddleOrOther"
    BOUNDARY = "Boundary"


def _dependency_signs(vectors: Sequence[Tuple[int, int, int]]) -> set:
    """Signs of the height of every minimal zero-xy positive combination.

    A vertex whose neighbour offsets are ``vectors`` is convex iff every such
    combination points strictly down, concave iff strictly up.
    """
    signs = set()
    for (a, b) in combinations(vectors, 2):
        if a[0] * b[1] - a[1] * b[0] == 0 and a[0] * b[0] + a[1] * b[1] < 0:
            la = -(a[0] * b[0] + a[1] * b[1])
            lb = a[0] * a[0] + a[1] * a[1]
            signs.add(sign(la * a[2] + lb * b[2]))
    for (a, b, c) in combinations(vectors, 3):
        la = b[0] * c[1] - b[1] * c[0]
        lb = c[0] * a[1] - c[1] * a[0]
        lc = a[0] * b[1] - a[1] * b[0]
        if la > 0 and lb > 0 and lc > 0:
            signs.add(sign(la * a[2] + lb * b[2] + lc * c[2]))
        elif la < 0 and lb < 0 and lc < 0:
            signs.add(-sign(la * a[2] + lb * b[2] + lc * c[2]))
        if len(signs) > 1:
            break
    return signs


def _class_from_signs(signs: set) -> VertexClass:
    if signs == {-1}:
        return VertexClass.CONVEX_INTERNAL
    if signs == {1}:
        return VertexClass.CONCAVE_INTERNAL
    return VertexClass.SADDLE_OR_OTHER


# ---------------------------------------------------------------------------
# 1.5D


class Terrain1D:
    """An x-monotone polyline; vertex ``i`` is ``(x, height)``."""

    def __init__(self, vertices):
        verts = tuple((rat(x), rat(y)) for x, y in vertices)
        if len(verts) < 2:
            raise TerrainError("too-few-vertices", (), "a 1.5D terrain needs at least 2 vertices")
        for i in range(len(verts) - 1):
            if verts[i + 1][0] <= verts[i][0]:
                raise TerrainError("not-x-monotone", (i, i + 1))
        self.vertices: Tuple[Vec2, ...] = verts

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, Terrain1D) and self.vertices == other.vertices

    def __repr__(self):
        return f"Terrain1D(n={len(self)})"

    @property
    def n(self) -> int:
        return len(self.vertices)

    def is_internal(self, i: int) -> bool:
        return 0 < i < len(self.vertices) - 1

    def neighbors(self, i: int) -> List[int]:
        return [j for j in (i - 1, i + 1) if 0 <= j < len(self.vertices)]

    @cached_property
    def int_vertices(self) -> List[Tuple[int, int]]:
        d = common_denominator(c for v in self.vertices for c in v)
        return [(int(x * d), int(y * d)) for x, y in self.vertices]

    @cached_property
    def classes(self) -> Tuple[VertexClass, ...]:
        iv = self.int_vertices
        out = []
        for i in range(len(iv)):
            if not self.is_internal(i):
                out.append(VertexClass.BOUNDARY)
                continue
            v = iv[i]
            a, b = sub(iv[i - 1], v), sub(iv[i + 1], v)
            # left offset a has a[0] < 0, right offset b has b[0] > 0
            out.append(_class_from_signs({sign(b[0] * a[1] - a[0] * b[1])}))
        return tuple(out)

    @cached_property
    def convex_internal(self) -> Tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.classes) if c is VertexClass.CONVEX_INTERNAL)


# ---------------------------------------------------------------------------
# 2.5D


def _tri_bbox(pts):
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


def _interiors_overlap(A, B) -> bool:
    """Exact SAT on two CCW triangles; touching boundaries do not overlap."""
    for P, Q in ((A, B), (B, A)):
        for k in range(3):
            p, q = P[k], P[(k + 1) % 3]
            if all(orient2d(p, q, r) <= 0 for r in Q):
                return False
    return True


class Terrain2D:
    """A validated xy-monotone triangulated surface.

    Construct through :func:`validate_terrain2d` (or the constructor, which
    calls it).  Instances are never mutated after construction.
    """

    def __init__(self, vertices, triangles):
        self.vertices: Tuple[Vec3, ...] = tuple(
            (rat(x), rat(y), rat(z)) for x, y, z in vertices)
        self.triangles: Tuple[Tuple[int, int, int], ...] = tuple(
            tuple(int(i) for i in t) for t in triangles)
        self._validate()

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return (isinstance(other, Terrain2D) and self.vertices == other.vertices
                and self.triangles == other.triangles)

    def __repr__(self):
        return f"Terrain2D(n={len(self.vertices)}, triangles={len(self.triangles)})"

    @property
    def n(self) -> int:
        return len(self.vertices)

    # -- validation ---------------------------------------------------------
    def _validate(self):
        n = len(self.vertices)
        if n < 3 or not self.triangles:
            raise TerrainError("too-few-vertices", (), "need at least 3 vertices and 1 triangle")
        seen: Dict[Tuple[Fraction, Fraction], int] = {}
        for i, v in enumerate(self.vertices):
            key = (v[0], v[1])
            if key in seen:
                raise TerrainError("duplicate-vertex", (seen[key], i))
            seen[key] = i
        iv = self.int_vertices
        used = [False] * n
        for k, t in enumerate(self.triangles):
            if len(t) != 3 or any(not 0 <= i < n for i in t) or len(set(t)) != 3:
                raise TerrainError("bad-triangle", (k,))
            o = orient2d(*(iv[i] for i in t))
            if o == 0:
                raise TerrainError("zero-area", (k,))
            if o < 0:
                raise TerrainError("orientation", (k,))
            for i in t:
                used[i] = True
        if not all(used):
            raise TerrainError("isolated-vertex", (used.index(False),))

        directed: Dict[Tuple[int, int], int] = {}
        for k, (a, b, c) in enumerate(self.triangles):
            for e in ((a, b), (b, c), (c, a)):
                if e in directed:
                    raise TerrainError("overlap", (directed[e], k))
                directed[e] = k
        self._check_overlaps()

        # connectivity over shared edges
        parent = list(range(len(self.triangles)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (a, b), k in directed.items():
            j = directed.get((b, a))
            if j is not None:
                parent[find(k)] = find(j)
        roots = {find(k) for k in range(len(self.triangles))}
        if len(roots) > 1:
            raise TerrainError("disconnected", sorted(roots)[:2])

        # per-vertex fans: successor map a -> b for each triangle (v, a, b)
        succ: List[Dict[int, int]] = [dict() for _ in range(n)]
        for (a, b, c) in self.triangles:
            succ[a][b] = c
            succ[b][c] = a
            succ[c][a] = b
        neighbors = []
        boundary = []
        for v in range(n):
            s = succ[v]
            preds = set(s.values())
            starts = [a for a in s if a not in preds]
            if len(starts) > 1:
                raise TerrainError("non-manifold-vertex", (v,))
            start = starts[0] if starts else min(s)
            order = [start]
            cur = start
            while cur in s:
                cur = s[cur]
                if cur == start:
                    break
                order.append(cur)
            if len(order) != len(set(s) | preds):
                raise TerrainError("non-manifold-vertex", (v,))
            neighbors.append(tuple(order))
            boundary.append(bool(starts))
        self.neighbors: Tuple[Tuple[int, ...], ...] = tuple(neighbors)
        self.boundary: Tuple[bool, ...] = tuple(boundary)

    def _check_overlaps(self):
        iv = self.int_vertices
        tris = [tuple(iv[i][:2] for i in t) for t in self.triangles]
        boxes = [_tri_bbox(t) for t in tris]
        if len(tris) < 2:
            return
        w = np.array([b[2] - b[0] for b in boxes], dtype=float)
        h = np.array([b[3] - b[1] for b in boxes], dtype=float)
        cell = max(float(np.median(np.maximum(w, h))), 1e-300)
        x0 = min(b[0] for b in boxes)
        y0 = min(b[1] for b in boxes)
        buckets = defaultdict(list)
        for k, (bx0, by0, bx1, by1) in enumerate(boxes):
            i0, i1 = int((bx0 - x0) / cell), int((bx1 - x0) / cell)
            j0, j1 = int((by0 - y0) / cell), int((by1 - y0) / cell)
            if (i1 - i0 + 1) * (j1 - j0 + 1) > 4 * len(tris):
                i1 = i0 + 2 * len(tris)  # absurdly long sliver; still bounded
            for i in range(i0, i1 + 1):
                for j in range(j0, j1 + 1):
                    buckets[(i, j)].append(k)
        checked = set()
        for members in buckets.values():
            for a, b in combinations(members, 2):
                if (a, b) in checked:
                    continue
                checked.add((a, b))
                A, B = boxes[a], boxes[b]
                if A[2] <= B[0] or B[2] <= A[0] or A[3] <= B[1] or B[3] <= A[1]:
                    continue
                if _interiors_overlap(tris[a], tris[b]):
                    raise TerrainError("overlap", (a, b))

    # -- derived data ---------------------------------------------------------
    @cached_property
    def scale(self) -> int:
        """Common denominator used to turn all coordinates into integers."""
        return common_denominator(c for v in self.vertices for c in v)

    @cached_property
    def int_vertices(self) -> List[Tuple[int, int, int]]:
        d = self.scale
        return [tuple(int(c * d) for c in v) for v in self.vertices]

    @cached_property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        es = set()
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                es.add((min(u, v), max(u, v)))
        return tuple(sorted(es))

    def is_internal(self, v: int) -> bool:
        return not self.boundary[v]

    def offsets(self, v: int) -> List[Tuple[int, int, int]]:
        """Integer-scaled neighbour offsets ``u - v``."""
        iv = self.int_vertices
        return [sub(iv[u], iv[v]) for u in self.neighbors[v]]

    @cached_property
    def classes(self) -> Tuple[VertexClass, ...]:
        out = []
        for v in range(self.n):
            if self.boundary[v]:
                out.append(VertexClass.BOUNDARY)
            else:
                out.append(_class_from_signs(_dependency_signs(self.offsets(v))))
        return tuple(out)

    @cached_property
    def convex_internal(self) -> Tuple[int, ...]:
        return tuple(v for v, c in enumerate(self.classes) if c is VertexClass.CONVEX_INTERNAL)

    @cached_property
    def _peak_matrix(self):
        """Stacked offsets of the convex internal vertices and group starts."""
        rows, starts = [], []
        for v in self.convex_internal:
            starts.append(len(rows))
            rows.extend(self.offsets(v))
        return np.array(rows, dtype=object).reshape(-1, 3), np.array(starts, dtype=np.intp)

    def surface_height(self, x, y) -> Optional[Fraction]:
        """Height of the surface above ``(x, y)``, or None outside the domain."""
        x, y = rat(x), rat(y)
        V = self.vertices
        for a, b, c in self.triangles:
            A, B, C = V[a], V[b], V[c]
            q = (x, y)
            if min(orient2d(A, B, q), orient2d(B, C, q), orient2d(C, A, q)) < 0:
                continue
            d = cross2(sub(B, A), sub(C, A))
            l1 = cross2(sub(q, A), sub(C, A)) / d
            l2 = cross2(sub(B, A), sub(q, A)) / d
            return A[2] + l1 * (B[2] - A[2]) + l2 * (C[2] - A[2])
        return None


def validate_terrain2d(vertices, triangles) -> Terrain2D:
    """Build a :class:`Terrain2D`, raising :class:`TerrainError` on bad input."""
    return Terrain2D(vertices, triangles)


def classify_vertex(T, v: int) -> VertexClass:
    return T.classes[v]


def _direction_ints(T, d) -> Tuple[int, ...]:
    if isinstance(d, Direction3):
        d = d.vector
    vec = tuple(rat(c) for c in d)
    if all(c == 0 for c in vec):
        raise ValueError("direction must be nonzero")
    expected = 2 if isinstance(T, Terrain1D) else 3
    if len(vec) != expected:
        raise ValueError(f"direction must have {expected} components")
    return integer_direction(vec)


def is_local_max(T, v: int, d) -> bool:
    """True iff no neighbour of ``v`` extends further than ``v`` along ``d``."""
    w = _direction_ints(T, d)
    iv = T.int_vertices
    nbrs = T.neighbors(v) if isinstance(T, Terrain1D) else T.neighbors[v]
    return all(dot(w, sub(iv[u], iv[v])) <= 0 for u in nbrs)


def pi_v(T, d) -> int:
    """Number of internal convex vertices that are local maxima along ``d``."""
    w = _direction_ints(T, d)
    if isinstance(T, Terrain1D):
        return sum(1 for v in T.convex_internal if is_local_max(T, v, w))
    return int(pi_v_many(T, [w])[0])


def pi_v_many(T: Terrain2D, directions) -> np.ndarray:
    """Vectorised ``pi_v`` for a batch of integer direction vectors."""
    G, starts = T._peak_matrix
    D = np.array([tuple(int(c) for c in d) for d in directions], dtype=object).reshape(-1, 3)
    if len(starts) == 0 or len(D) == 0:
        return np.zeros(len(D), dtype=np.int64)
    out = np.empty(len(D), dtype=np.int64)
    chunk = max(1, 4_000_000 // max(1, len(G)))
    for lo in range(0, len(D), chunk):
        S = exact_matmul(D[lo:lo + chunk], G.T) <= 0
        ok = np.logical_and.reduceat(S, starts, axis=1)
        out[lo:lo + chunk] = ok.sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# affine maps


@dataclass(frozen=True)
class AffineMap:
    linear: Tuple[Tuple[Fraction, ...], ...]
    translation: Vec3 = (Fraction(0), Fraction(0), Fraction(0))

    def __post_init__(self):
        L = tuple(tuple(rat(c) for c in row) for row in self.linear)
        if len(L) != 3 or any(len(r) != 3 for r in L):
            raise ValueError("linear part must be 3x3")
        object.__setattr__(self, "linear", L)
        object.__setattr__(self, "translation", tuple(rat(c) for c in self.translation))

    @property
    def determinant(self) -> Fraction:
        (a, b, c), (d, e, f), (g, h, i) = self.linear
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def __call__(self, p) -> Vec3:
        return tuple(dot(row, p) + t for row, t in zip(self.linear, self.translation))

    def height_normal(self) -> Vec3:
        """transpose(linear) . (0,0,1): the direction that becomes vertical."""
        return self.linear[2]

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def rotation_to_vertical(d) -> AffineMap:
    """Exact rotation taking direction ``d`` onto +z.

    Needs ``|d|`` rational (e.g. a point produced by
    :func:`rational_unit_vector`); built from two reflections.
    """
    d = tuple(rat(c) for c in (d.vector if isinstance(d, Direction3) else d))
    norm = _rational_sqrt(dot(d, d))
    if norm is None or norm == 0:
        raise ValueError("direction must have a nonzero rational length")
    u = tuple(c / norm for c in d)
    e = (Fraction(0), Fraction(0), Fraction(1))
    if u == e:
        return AffineMap.identity()
    w = sub(u, e)
    ww = dot(w, w)
    H = [[(1 if i == j else 0) - 2 * w[i] * w[j] / ww for j in range(3)] for i in range(3)]
    H[0] = [-c for c in H[0]]
    return AffineMap(tuple(tuple(r) for r in H))


def rational_unit_vector(a, b) -> Vec3:
    """Inverse stereographic projection of ``(a, b)``: an exact unit vector."""
    a, b = rat(a), rat(b)
    s = 1 + a * a + b * b
    return (2 * a / s, 2 * b / s, (1 - a * a - b * b) / s)


def apply_affine(T: Terrain2D, A: AffineMap):
    """Transformed coordinates and the number ``m(A(T))`` of peaks.

    Only vertices convex in the original terrain are counted.
    """
    if A.determinant == 0:
        raise ValueError("affine map has a singular linear part")
    coords = [A(v) for v in T.vertices]
    m = sum(1 for v in T.convex_internal
            if all(coords[u][2] <= coords[v][2] for u in T.neighbors[v]))
    return coords, m
