"""Peak cones of 2.5D terrains, their cube-face traces and the overlap search."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (Direction3, clip_polygon, cross, dot, exact_matmul, format_rat,
                       integer_direction, primitive)
from .terrain import Terrain2D, pi_v_many

# face -> (origin, e1, e2, lower bound of t); points are origin + s*e1 + t*e2
# with s in [-1, 1].  Side faces stop at z = 0, the bottom face is never used.
FACES: Dict[str, Tuple[Tuple[int, int, int], ...]] = {
    "top": ((0, 0, 1), (1, 0, 0), (0, 1, 0), -1),
    "+x": ((1, 0, 0), (0, 1, 0), (0, 0, 1), 0),
    "-x": ((-1, 0, 0), (0, -1, 0), (0, 0, 1), 0),
    "+y": ((0, 1, 0), (-1, 0, 0), (0, 0, 1), 0),
    "-y": ((0, -1, 0), (1, 0, 0), (0, 0, 1), 0),
}
FACE_ORDER = tuple(FACES)


def face_square(face: str) -> List[Tuple[int, int, int]]:
    tmin = FACES[face][3]
    return [(1, 0, -1), (-1, 0, -1), (0, 1, -1), (0, -1, tmin)]


def face_point_direction(face: str, X, Y, W) -> Tuple[int, int, int]:
    """Integer direction through the homogeneous face point ``(X/W, Y/W)``."""
    o, e1, e2, _ = FACES[face]
    return primitive([W * o[i] + X * e1[i] + Y * e2[i] for i in range(3)])


def direction_to_face_points(d) -> List[Tuple[str, Fraction, Fraction]]:
    """Every (face, s, t) at which direction ``d`` (z >= 0) meets the cube."""
    v = [Fraction(c) for c in (d.vector if isinstance(d, Direction3) else d)]
    m = max(abs(c) for c in v)
    p = [c / m for c in v]
    out = []
    for face, (o, e1, e2, tmin) in FACES.items():
        if dot(o, p) != 1:
            continue
        s, t = dot(e1, p), dot(e2, p)
        if -1 <= s <= 1 and tmin <= t <= 1:
            out.append((face, s, t))
    return out


@dataclass(frozen=True)
class SphericalCone:
    """Closed cone ``{w : w . g <= 0 for every g in normals}``."""

    owner: int
    normals: Tuple[Tuple[int, int, int], ...]

    def contains(self, w) -> bool:
        w = w.integer() if isinstance(w, Direction3) else integer_direction(w)
        return all(dot(w, g) <= 0 for g in self.normals)

    def extreme_rays(self) -> List[Tuple[int, int, int]]:
        rays = set()
        gs = self.normals
        for i in range(len(gs)):
            for j in range(i + 1, len(gs)):
                r = cross(gs[i], gs[j])
                if r == (0, 0, 0):
                    continue
                for cand in (r, tuple(-c for c in r)):
                    if all(dot(cand, g) <= 0 for g in gs):
                        rays.add(primitive(cand))
        return sorted(rays)

    @property
    def empty(self) -> bool:
        """No direction in the closed upper half-space."""
        return not project_to_cube(self)

    @property
    def full(self) -> bool:
        return all(g == (0, 0, 0) for g in self.normals)

    def interior_direction(self) -> Optional[Tuple[int, int, int]]:
        """Sum of the extreme rays, or the pole when the cone is not pointed."""
        rays = self.extreme_rays()
        if rays:
            s = tuple(sum(r[i] for r in rays) for i in range(3))
            if s != (0, 0, 0) and all(dot(s, g) <= 0 for g in self.normals):
                return primitive(s)
            return rays[0]
        return (0, 0, 1) if self.contains((0, 0, 1)) else None


def cone(T: Terrain2D, v: int) -> SphericalCone:
    if T.boundary[v]:
        raise ValueError(f"vertex {v} lies on the terrain boundary; no cone")
    return SphericalCone(v, tuple(T.offsets(v)))


@dataclass(frozen=True)
class FacePolygon:
    """Closed convex trace of a cone on one cube face, in face coordinates."""

    face: str
    vertices: Tuple[Tuple[Fraction, Fraction], ...]
    owner: int = -1
    halfplanes: Tuple[Tuple[int, int, int], ...] = ()

    def constraints(self) -> Tuple[Tuple[int, int, int], ...]:
        return self.halfplanes or _halfplanes_from_vertices(self.vertices)


def _line_through(p, q) -> Tuple[int, int, int]:
    # left of p->q is inside for a CCW polygon; inside means value <= 0
    a, b = p[1] - q[1], q[0] - p[0]
    a, b, c = -a, -b, (a * p[0] + b * p[1])
    return integer_direction((a, b, c)) if (a, b, c) != (0, 0, 0) else (0, 0, 0)


def _halfplanes_from_vertices(verts) -> Tuple[Tuple[int, int, int], ...]:
    verts = [tuple(Fraction(c) for c in v) for v in verts]
    uniq = list(dict.fromkeys(verts))
    if len(uniq) == 1:
        (x, y), = uniq
        return tuple(integer_direction(h) for h in
                     ((1, 0, -x), (-1, 0, x), (0, 1, -y), (0, -1, y)))
    hull_like = len(uniq) >= 3 and any(
        (uniq[1][0] - uniq[0][0]) * (r[1] - uniq[0][1])
        - (uniq[1][1] - uniq[0][1]) * (r[0] - uniq[0][0]) != 0 for r in uniq[2:])
    if hull_like:
        return tuple(_line_through(uniq[i], uniq[(i + 1) % len(uniq)])
                     for i in range(len(uniq)))
    # a segment: both sides of its line plus the two end caps
    p = min(uniq)
    q = max(uniq)
    ln = _line_through(p, q)
    d = (q[0] - p[0], q[1] - p[1])
    cap_p = integer_direction((-d[0], -d[1], d[0] * p[0] + d[1] * p[1]))
    cap_q = integer_direction((d[0], d[1], -(d[0] * q[0] + d[1] * q[1])))
    return (ln, tuple(-c for c in ln), cap_p, cap_q)


def project_to_cube(c: SphericalCone) -> List[FacePolygon]:
    """Traces of the cone on the top face and the upper halves of the sides."""
    out = []
    for face in FACE_ORDER:
        o, e1, e2, tmin = FACES[face]
        hs = [(dot(g, e1), dot(g, e2), dot(g, o)) for g in c.normals]
        poly = [(Fraction(-1), Fraction(tmin)), (Fraction(1), Fraction(tmin)),
                (Fraction(1), Fraction(1)), (Fraction(-1), Fraction(1))]
        for h in hs:
            if h[0] == 0 and h[1] == 0:
                if h[2] > 0:
                    poly = []
                    break
                continue
            poly = clip_polygon(poly, h)
            if not poly:
                break
        if poly:
            halfplanes = tuple(dict.fromkeys(
                [primitive(h) for h in hs if (h[0], h[1]) != (0, 0)] + face_square(face)))
            out.append(FacePolygon(face, tuple(poly), c.owner, halfplanes))
    return out


@dataclass
class OverlapResult:
    depth: int
    face: Optional[str] = None
    point: Optional[Tuple[Fraction, Fraction]] = None
    homogeneous: Optional[Tuple[int, int, int]] = None


def _face_candidates(polys: Sequence[FacePolygon]) -> np.ndarray:
    lines = list(dict.fromkeys(h for p in polys for h in p.constraints()))
    cands = []
    if len(lines) >= 2:
        L = np.array(lines, dtype=object)
        i, j = np.triu_indices(len(lines), k=1)
        A, B = L[i], L[j]
        X = A[:, 1] * B[:, 2] - A[:, 2] * B[:, 1]
        Y = A[:, 2] * B[:, 0] - A[:, 0] * B[:, 2]
        W = A[:, 0] * B[:, 1] - A[:, 1] * B[:, 0]
        keep = W != 0
        sgn = np.where(W[keep] > 0, 1, -1)
        H = np.stack([X[keep] * sgn, Y[keep] * sgn, W[keep] * sgn], axis=1)
        cands.append(H)
    extra = []
    for p in polys:
        pts = list(p.vertices)
        k = len(pts)
        cx = sum(q[0] for q in pts) / k
        cy = sum(q[1] for q in pts) / k
        for q in pts + [(cx, cy)]:
            extra.append(integer_direction((q[0], q[1], Fraction(1))))
    if extra:
        cands.append(np.array(extra, dtype=object))
    if not cands:
        return np.zeros((0, 3), dtype=object)
    return np.concatenate(cands, axis=0)


def max_overlap(polys: Sequence[FacePolygon]) -> OverlapResult:
    """Deepest point of a family of closed convex polygons, face by face.

    Candidate points are all intersections of two constraint lines, all
    polygon vertices and one interior point per polygon; this set contains a
    maximiser of the depth for closed convex regions.
    """
    best = OverlapResult(0)
    by_face: Dict[str, List[FacePolygon]] = {}
    for p in polys:
        by_face.setdefault(p.face, []).append(p)
    for face in sorted(by_face, key=lambda f: FACE_ORDER.index(f) if f in FACES else 99):
        group = by_face[face]
        C = _face_candidates(group)
        if len(C) == 0:
            continue
        if face in FACES:
            sq = np.array(face_square(face), dtype=object)
            inside = (exact_matmul(C, sq.T) <= 0).all(axis=1)
            C = C[inside]
        rows, starts = [], []
        for p in group:
            starts.append(len(rows))
            rows.extend(p.constraints())
        R = np.array(rows, dtype=object)
        starts = np.array(starts, dtype=np.intp)
        depth = np.zeros(len(C), dtype=np.int64)
        chunk = max(1, 4_000_000 // len(R))
        for lo in range(0, len(C), chunk):
            S = exact_matmul(C[lo:lo + chunk], R.T) <= 0
            depth[lo:lo + chunk] = np.logical_and.reduceat(S, starts, axis=1).sum(axis=1)
        if len(depth) == 0:
            continue
        k = int(np.argmax(depth))
        if depth[k] > best.depth:
            X, Y, W = (int(c) for c in C[k])
            best = OverlapResult(int(depth[k]), face, (Fraction(X, W), Fraction(Y, W)),
                                 primitive((X, Y, W)))
    return best


@dataclass
class Prickliness2DResult:
    value: int
    witness: Direction3
    vertices: List[int] = field(default_factory=list)
    tied: bool = False


def _members(T: Terrain2D, w) -> Tuple[List[int], bool]:
    members, tied = [], False
    for v in T.convex_internal:
        dots = [dot(w, g) for g in T.offsets(v)]
        if all(x <= 0 for x in dots):
            members.append(v)
            tied = tied or any(x == 0 for x in dots)
    return members, tied


def _result(T: Terrain2D, w) -> Prickliness2DResult:
    members, tied = _members(T, w)
    return Prickliness2DResult(len(members), Direction3(w), members, tied)


def convex_cones(T: Terrain2D) -> List[SphericalCone]:
    return [cone(T, v) for v in T.convex_internal]


def prickliness_2d(T: Terrain2D) -> Prickliness2DResult:
    """Prickliness via cone traces on the cube and per-face maximum overlap."""
    polys = [p for c in convex_cones(T) for p in project_to_cube(c)]
    if not polys:
        return _result(T, (0, 0, 1))
    ov = max_overlap(polys)
    w = face_point_direction(ov.face, *ov.homogeneous)
    if int(pi_v_many(T, [(0, 0, 1)])[0]) == ov.depth:
        w = (0, 0, 1)  # prefer the vertical on ties
    res = _result(T, w)
    if res.value != ov.depth:
        raise AssertionError(f"overlap depth {ov.depth} disagrees with peak count {res.value}")
    return res


def brute_force_candidates(T: Terrain2D) -> List[Tuple[int, int, int]]:
    cones = convex_cones(T)
    planes = sorted({primitive(g) for c in cones for g in c.normals})
    cands = {(0, 0, 1)}
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            r = cross(planes[i], planes[j])
            if r == (0, 0, 0):
                continue
            for cand in (r, tuple(-c for c in r)):
                if cand[2] >= 0:
                    cands.add(primitive(cand))
    for c in cones:
        d = c.interior_direction()
        if d is not None and d[2] >= 0:
            cands.add(d)
    return sorted(cands)


def brute_force_2d(T: Terrain2D) -> Prickliness2DResult:
    """Evaluate the peak count at every vertex of the great-circle arrangement."""
    cands = brute_force_candidates(T)
    cands.remove((0, 0, 1))
    cands.insert(0, (0, 0, 1))  # argmax keeps the first, so ties go to the vertical
    counts = pi_v_many(T, cands)
    k = int(np.argmax(counts))
    return _result(T, cands[k])


# ---------------------------------------------------------------------------
# heatmaps


@dataclass
class DirectionGrid:
    """Peak counts for directions tilted east/north by given angles."""

    resolution: int
    max_offset: float
    offsets: List[float]
    tangents: List[Fraction]
    values: List[List[int]]  # values[north_index][east_index]

    def value_at(self, east_index: int, north_index: int) -> int:
        return self.values[north_index][east_index]

    def direction(self, east_index: int, north_index: int) -> Direction3:
        return Direction3((self.tangents[east_index], self.tangents[north_index], Fraction(1)))

    def max_value(self) -> int:
        return max(max(row) for row in self.values)

    def to_csv(self) -> str:
        lines = ["east_deg,north_deg,value"]
        for j, b in enumerate(self.offsets):
            for i, a in enumerate(self.offsets):
                lines.append(f"{a:.6f},{b:.6f},{self.values[j][i]}")
        return "\n".join(lines) + "\n"

    def to_pgm(self) -> str:
        """Plain PGM, north up; grey level scaled so the maximum is 255."""
        vmax = self.max_value()
        R = self.resolution
        out = ["P2",
               f"# max={vmax} resolution={R} max_offset_deg={self.max_offset:g} "
               f"tan_denominator<=1000000",
               f"{R} {R}", "255"]
        for j in reversed(range(R)):
            row = self.values[j]
            out.append(" ".join(str(0 if vmax == 0 else (255 * v) // vmax) for v in row))
        return "\n".join(out) + "\n"


def heatmap(T: Terrain2D, resolution: int = 8, max_offset: float = 20.0) -> DirectionGrid:
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if not 0 < max_offset < 90:
        raise ValueError("max_offset must be in (0, 90) degrees")
    offs = [-max_offset + 2 * max_offset * i / (resolution - 1) for i in range(resolution)]
    tans = [Fraction(math.tan(math.radians(a))).limit_denominator(10 ** 6) for a in offs]
    dirs = [integer_direction((tans[i], tans[j], Fraction(1)))
            for j in range(resolution) for i in range(resolution)]
    counts = pi_v_many(T, dirs)
    values = [[int(counts[j * resolution + i]) for i in range(resolution)]
              for j in range(resolution)]
    return DirectionGrid(resolution, max_offset, offs, tans, values)


def format_direction(d: Direction3) -> str:
    return "(" + ",".join(format_rat(c) for c in d.vector) + ")"
