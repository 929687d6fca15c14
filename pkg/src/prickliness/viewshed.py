"""Exact visibility, 1.5D viewsheds and viewshed-vertex counts for 2.5D terrains."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (add, clip_polygon, cross, cross2, dot, orient2d, polygon_area2,
                       rat, scale, sub)
from .terrain import Terrain1D, Terrain2D


class VisibilityError(ValueError):
    """A query point lies strictly below the terrain surface."""


@dataclass(frozen=True)
class Viewpoint:
    """A point on (or ``offset`` above) the surface; ``vertex`` is set when it sits on one."""

    position: tuple
    vertex: Optional[int] = None

    @classmethod
    def at_vertex(cls, T, i: int, offset=0) -> "Viewpoint":
        v = T.vertices[i]
        if offset:
            v = v[:-1] + (v[-1] + rat(offset),)
            return cls(v, None)
        return cls(v, i)

    @classmethod
    def on_surface(cls, T: Terrain2D, x, y, offset=0) -> "Viewpoint":
        h = T.surface_height(x, y)
        if h is None:
            raise ValueError("viewpoint lies outside the terrain domain")
        pos = (rat(x), rat(y), h + rat(offset))
        if offset == 0:
            for i, v in enumerate(T.vertices):
                if v == pos:
                    return cls(pos, i)
        return cls(pos, None)


def _pos(p) -> tuple:
    if isinstance(p, Viewpoint):
        p = p.position
    return tuple(rat(c) for c in p)


# ---------------------------------------------------------------------------
# 2.5D scene with float prefilters


class Scene:
    def __init__(self, T: Terrain2D):
        self.T = T
        V = T.vertices
        self.V = V
        self.tris = T.triangles
        self.Vf = np.array([[float(c) for c in v] for v in V])
        tri = np.array(T.triangles, dtype=np.intp).reshape(-1, 3)
        P = self.Vf[tri]  # (F, 3 corners, 3)
        self.Pf = P
        self.lo = P[:, :, :2].min(axis=1)
        self.hi = P[:, :, :2].max(axis=1)
        self.zmax = P[:, :, 2].max(axis=1)
        span = float(np.abs(self.Vf).max()) if len(V) else 1.0
        self.tol = 1e-9 * max(span, 1.0)
        # plane normals with positive z
        self.normals = []
        for a, b, c in T.triangles:
            n = cross(sub(V[b], V[a]), sub(V[c], V[a]))
            self.normals.append(n)

    # triangles whose projected bbox meets the bbox of a 2D segment
    def _bbox_hits(self, p2, q2) -> np.ndarray:
        lo = np.minimum(p2, q2) - self.tol
        hi = np.maximum(p2, q2) + self.tol
        m = np.all(self.hi >= lo, axis=1) & np.all(self.lo <= hi, axis=1)
        return np.nonzero(m)[0]

    def _line_hits(self, p2, q2, cand) -> np.ndarray:
        """Refine candidates to triangles straddling the projected line."""
        d = np.asarray(q2) - np.asarray(p2)
        P = self.Pf[cand, :, :2] - np.asarray(p2)
        s = d[0] * P[:, :, 1] - d[1] * P[:, :, 0]
        tol = self.tol * (abs(d).sum() + 1.0)
        keep = (s.max(axis=1) >= -tol) & (s.min(axis=1) <= tol)
        return cand[keep]

    def segment_range(self, f, P, D) -> Optional[Tuple[Fraction, Fraction]]:
        """Parameters s in R with P + s*D (projected) inside triangle f (closed)."""
        a, b, c = (self.V[i] for i in self.tris[f])
        lo, hi = None, None
        for u, w in ((a, b), (b, c), (c, a)):
            e = (w[0] - u[0], w[1] - u[1])
            c0 = cross2(e, (P[0] - u[0], P[1] - u[1]))
            c1 = cross2(e, D)
            if c1 == 0:
                if c0 < 0:
                    return None
                continue
            root = Fraction(-c0) / c1
            if c1 > 0:
                lo = root if lo is None else max(lo, root)
            else:
                hi = root if hi is None else min(hi, root)
        if lo is not None and hi is not None and lo > hi:
            return None
        return lo, hi

    def height_offset(self, f, X) -> Fraction:
        """Sign-carrying offset of 3D point X from the plane of triangle f (positive above)."""
        a = self.V[self.tris[f][0]]
        return dot(self.normals[f], sub(X, a))

    def check_on_or_above(self, X) -> None:
        h = self.T.surface_height(X[0], X[1])
        if h is None:
            raise ValueError("point lies outside the terrain domain")
        if X[2] < h:
            raise VisibilityError(f"point {tuple(map(str, X))} is below the surface")

    def segment_blocked(self, p, q) -> bool:
        """True iff some point of segment pq lies strictly below the surface."""
        D3 = sub(q, p)
        D = (D3[0], D3[1])
        if D == (0, 0):
            return False
        pf = np.array([float(p[0]), float(p[1])])
        qf = np.array([float(q[0]), float(q[1])])
        cand = self._line_hits(pf, qf, self._bbox_hits(pf, qf))
        # quick float rejection: triangle entirely below both endpoints
        zmin = min(float(p[2]), float(q[2]))
        for f in cand:
            if self.zmax[f] < zmin - self.tol:
                continue
            r = self.segment_range(int(f), p, D)
            if r is None:
                continue
            lo = Fraction(0) if r[0] is None else max(Fraction(0), r[0])
            hi = Fraction(1) if r[1] is None else min(Fraction(1), r[1])
            if lo > hi:
                continue
            for s in (lo, hi):
                if self.height_offset(int(f), add(p, scale(D3, s))) < 0:
                    return True
        return False

    def landing(self, p, q) -> Optional[Tuple[Fraction, int]]:
        """First parameter s > 1 at which ray p->q goes strictly below the surface.

        Returns (s, triangle) or None when the ray leaves the domain above the
        surface or dives below immediately after q.
        """
        D3 = sub(q, p)
        D = (D3[0], D3[1])
        if D == (0, 0):
            return None
        pf = np.array([float(q[0]), float(q[1])])
        df = np.array([float(D[0]), float(D[1])])
        ext = float(np.abs(self.hi).max() + np.abs(self.lo).max() + 1.0)
        far = pf + df / (np.abs(df).max()) * ext * 4
        cand = self._bbox_hits(pf, far)
        cand = self._line_hits(pf, far, cand)
        hits = []
        for f in cand:
            r = self.segment_range(int(f), p, D)
            if r is None:
                continue
            lo = Fraction(1) if r[0] is None else max(Fraction(1), r[0])
            hi = r[1]
            if hi is not None and lo > hi:
                continue
            hits.append((lo, hi, int(f)))
        hits.sort(key=lambda h: h[0])
        best = None
        for lo, hi, f in hits:
            if best is not None and lo >= best[0]:
                break
            h0 = self.height_offset(f, add(p, scale(D3, lo)))
            if h0 < 0:
                s = lo
            else:
                if hi is None:
                    # the ray is unbounded only outside a bounded triangle
                    continue
                h1 = self.height_offset(f, add(p, scale(D3, hi)))
                if h1 >= 0:
                    continue
                s = lo + (hi - lo) * Fraction(h0) / (h0 - h1)
            if best is None or s < best[0]:
                best = (s, f)
        if best is None or best[0] == 1:
            return None
        return best


def visible(T: Terrain2D, p, q, scene: Optional[Scene] = None) -> bool:
    """True iff no point of segment pq lies strictly below the surface."""
    sc = scene or Scene(T)
    p, q = _pos(p), _pos(q)
    sc.check_on_or_above(p)
    sc.check_on_or_above(q)
    return not sc.segment_blocked(p, q)


# ---------------------------------------------------------------------------
# occlusion along an edge


def _occluded_intervals(sc: Scene, p, a, b) -> List[Tuple[Fraction, Fraction]]:
    """Open parameter intervals of edge ab (t in [0, 1]) hidden from p."""
    A = sub(a, p)
    B = sub(b, p)
    fan_n = cross(A, B)
    if fan_n == (0, 0, 0):
        return []
    if fan_n[2] < 0:
        fan_n = tuple(-c for c in fan_n)
    # float prefilter: some triangle corner strictly above the fan plane
    pf = np.array([float(c) for c in p])
    nf = np.array([float(c) for c in fan_n])
    off = (sc.Pf - pf) @ nf
    tol = sc.tol * float(np.abs(nf).sum())
    if fan_n[2] != 0:
        above = off.max(axis=1) > -tol
    else:
        above = np.ones(len(off), dtype=bool)
    # projected overlap with the fan triangle (separating axis test)
    fan = np.array([pf[:2], [float(a[0]), float(a[1])], [float(b[0]), float(b[1])]])
    flo, fhi = fan.min(axis=0) - sc.tol, fan.max(axis=0) + sc.tol
    box = np.all(sc.hi >= flo, axis=1) & np.all(sc.lo <= fhi, axis=1)
    cand = np.nonzero(above & box)[0]
    if len(cand) and fan_n[2] != 0:
        P = sc.Pf[cand, :, :2]
        sep = np.zeros(len(cand), dtype=bool)
        for i in range(3):
            e = fan[(i + 1) % 3] - fan[i]
            nrm = np.array([-e[1], e[0]])
            if cross2(e, fan[(i + 2) % 3] - fan[i]) < 0:
                nrm = -nrm
            s = (P - fan[i]) @ nrm
            sep |= s.max(axis=1) < -sc.tol * (abs(nrm).sum() + 1)
        cand = cand[~sep]
    out = []
    for f in cand:
        f = int(f)
        u = [sc.V[i] for i in sc.tris[f]]
        hs = [(-1, 0, 0), (0, -1, 0), (1, 1, -1)]
        for k in range(3):
            e = (u[(k + 1) % 3][0] - u[k][0], u[(k + 1) % 3][1] - u[k][1])
            c0 = cross2(e, (p[0] - u[k][0], p[1] - u[k][1]))
            hs.append((-cross2(e, A), -cross2(e, B), -c0))
        n = sc.normals[f]
        hs.append((dot(n, A), dot(n, B), dot(n, sub(p, u[0]))))
        poly = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
        for h in hs:
            poly = clip_polygon(poly, h)
            if len(poly) < 3:
                break
        if len(poly) < 3 or polygon_area2(poly) <= 0:
            continue
        ts = [mu / (nu + mu) for nu, mu in poly if nu + mu != 0]
        lo, hi = min(ts), max(ts)
        if lo < hi:
            out.append((lo, hi))
    return _merge_open(out)


def _merge_open(iv):
    iv = sorted(iv)
    merged = []
    for lo, hi in iv:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _transitions(iv) -> List[Fraction]:
    pts = []
    for lo, hi in iv:
        if lo > 0:
            pts.append(lo)
        if hi < 1:
            pts.append(hi)
    return pts


def edge_parts(T: Terrain2D, p, e, scene: Optional[Scene] = None) -> int:
    """Number of maximal visible or hidden pieces of edge ``e`` (index or vertex pair)."""
    sc = scene or Scene(T)
    u, w = T.edges[e] if isinstance(e, int) else e
    iv = _occluded_intervals(sc, _pos(p), T.vertices[u], T.vertices[w])
    return len(_transitions(iv)) + 1


# ---------------------------------------------------------------------------
# 2.5D viewshed vertices


@dataclass
class ViewshedStats:
    type1: int
    type2: int
    type3: int
    edge_parts: List[int] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.type1 + self.type2 + self.type3

    CSV_HEADER = "terrain_id,viewpoint_id,type1,type2,type3,total,pi,n"

    def csv_row(self, terrain_id, viewpoint_id, pi, n) -> str:
        return (f"{terrain_id},{viewpoint_id},{self.type1},{self.type2},{self.type3},"
                f"{self.total},{pi},{n}")


def viewshed_vertices_2d(T: Terrain2D, p, scene: Optional[Scene] = None) -> ViewshedStats:
    """Count viewshed vertices of the three kinds by brute force.

    Kind 1: visible terrain vertices.  Kind 2: points inside edges where
    visibility switches.  Kind 3: points inside triangles where a shadow
    boundary cast past a silhouette point lands on the surface.
    """
    sc = scene or Scene(T)
    pv = p if isinstance(p, Viewpoint) else Viewpoint(_pos(p))
    P = _pos(pv)
    sc.check_on_or_above(P)
    V = T.vertices
    vis = [i == pv.vertex or not sc.segment_blocked(P, V[i]) for i in range(len(V))]
    type2_pts = []
    parts = []
    for u, w in T.edges:
        if pv.vertex in (u, w):
            parts.append(1)
            continue
        iv = _occluded_intervals(sc, P, V[u], V[w])
        tr = _transitions(iv)
        parts.append(len(tr) + 1)
        for t in tr:
            type2_pts.append(add(V[u], scale(sub(V[w], V[u]), t)))
    landed = set()
    sources = type2_pts + [V[i] for i in range(len(V)) if vis[i] and i != pv.vertex]
    for q in sources:
        if q == P:
            continue
        hit = sc.landing(P, q)
        if hit is None:
            continue
        s, f = hit
        X = add(P, scale(sub(q, P), s))
        a, b, c = (V[i] for i in T.triangles[f])
        if orient2d(a, b, X) > 0 and orient2d(b, c, X) > 0 and orient2d(c, a, X) > 0:
            landed.add(X)
    return ViewshedStats(sum(vis), len(type2_pts), len(landed), parts)


def select_viewpoints(T: Terrain2D, k: int, min_separation=None) -> List[Viewpoint]:
    """Greedy pick of high, well separated vertices."""
    if k < 1:
        raise ValueError("k must be at least 1")
    V = T.vertices
    if min_separation is None:
        xs = [v[0] for v in V]
        ys = [v[1] for v in V]
        sep2 = ((max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2) / 36
    else:
        sep2 = rat(min_separation) ** 2
    order = sorted(range(len(V)), key=lambda i: (-V[i][2], i))
    chosen: List[int] = []
    for i in order:
        if all((V[i][0] - V[j][0]) ** 2 + (V[i][1] - V[j][1]) ** 2 >= sep2 for j in chosen):
            chosen.append(i)
            if len(chosen) == k:
                break
    return [Viewpoint.at_vertex(T, i) for i in chosen]


# ---------------------------------------------------------------------------
# 1.5D


@dataclass
class VisibleIntervals1D:
    intervals: List[Tuple[Fraction, Fraction]]

    @property
    def count(self) -> int:
        return len(self.intervals)

    @property
    def complexity(self) -> int:
        return 2 * len(self.intervals)


def _height_1d(T: Terrain1D, x) -> Optional[Fraction]:
    V = T.vertices
    for i in range(len(V) - 1):
        if V[i][0] <= x <= V[i + 1][0]:
            a, b = V[i], V[i + 1]
            return a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
    return None


def _sweep(p, chain) -> List[Tuple[Fraction, Fraction]]:
    """Visible pieces of ``chain`` (vertices moving away from p in +x).

    ``chain[0]`` is the first vertex strictly beyond p; the stretch between p
    and it lies on one line through p and is visible.
    """
    out = []
    horizon = None  # max slope from p to any vertex passed so far
    prev = (p[0], p[1])
    for v in chain:
        dx = v[0] - p[0]
        slope_v = (v[1] - p[1]) / dx
        if horizon is None:
            out.append((prev[0], v[0]))
        else:
            # slope along the edge prev->v is monotone; find where it reaches horizon
            slope_prev = (prev[1] - p[1]) / (prev[0] - p[0])
            if slope_prev >= horizon and slope_v >= horizon:
                out.append((prev[0], v[0]))
            elif slope_prev >= horizon or slope_v >= horizon:
                # solve (y(x) - py) = horizon * (x - px) on the edge line
                m = (v[1] - prev[1]) / (v[0] - prev[0])
                x = (prev[1] - p[1] - m * prev[0] + horizon * p[0]) / (horizon - m)
                if slope_prev >= horizon:
                    out.append((prev[0], x))
                else:
                    out.append((x, v[0]))
        horizon = slope_v if horizon is None else max(horizon, slope_v)
        prev = v
    return out


def viewshed_1d(T: Terrain1D, p) -> VisibleIntervals1D:
    """Maximal visible x-intervals (positive length) from a point on the terrain."""
    p = tuple(rat(c) for c in (p.position if isinstance(p, Viewpoint) else p))
    h = _height_1d(T, p[0])
    if h is None:
        raise ValueError("viewpoint outside the terrain")
    if p[1] < h:
        raise VisibilityError("viewpoint below the terrain")
    V = T.vertices
    right = [v for v in V if v[0] > p[0]]
    left = [(-v[0], v[1]) for v in reversed(V) if v[0] < p[0]]
    pieces = _sweep(p, right)
    mirrored = _sweep((-p[0], p[1]), left)
    pieces += [(-b, -a) for a, b in mirrored]
    pieces = sorted((a, b) for a, b in pieces if a < b)
    merged: List[Tuple[Fraction, Fraction]] = []
    for a, b in pieces:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return VisibleIntervals1D(merged)
