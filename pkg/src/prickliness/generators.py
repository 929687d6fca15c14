"""Deterministic terrain families and random terrains."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import cross, dot, orient2d, rat
from .terrain import Terrain1D, Terrain2D, TerrainError
from .viewshed import Viewpoint


def _ccw(V, t):
    a, b, c = t
    o = orient2d(V[a], V[b], V[c])
    if o == 0:
        raise ValueError(f"degenerate triangle {t}")
    return (a, b, c) if o > 0 else (a, c, b)


# ---------------------------------------------------------------------------
# spikes in front of rising back rows


def _spike_construction(k: int, m: int, box: bool, extra_floor: bool = False):
    """Viewer vertex, a comb of k spikes, a low floor behind it and m back rows.

    The viewer sits level with the spike tips, so the spikes cut every back
    row into about 2k visible pieces.  With ``box`` two side columns at an
    intermediate height stop the back rows from being convex.
    """
    H = Fraction(4)
    Y = Fraction(4 * (k + m))
    delta = Fraction(1, 4)
    V: List[tuple] = []
    F: List[tuple] = []

    def add(p):
        V.append(tuple(Fraction(c) for c in p))
        return len(V) - 1

    P = add((k, -Y, H))
    comb = [add((i, 0, H if i % 2 else 0)) for i in range(2 * k + 1)]
    floor = [add((2 * i + 1, delta, 0)) for i in range(k)]
    if extra_floor:
        floor.insert(0, add((Fraction(1, 2), delta, 0)))

    crossing = [H / 4 + (H / 2) * Fraction(j, max(m - 1, 1)) for j in range(m)]
    zs = [H - (H - c) * (Y + j + 1) / Y for j, c in enumerate(crossing)]
    L = [add((0, j + 1, zs[j])) for j in range(m)]
    R = [add((2 * k, j + 1, zs[j])) for j in range(m)]

    tris = []
    for i in range(2 * k):
        tris.append((P, comb[i], comb[i + 1]))
    # spikes: each tip leans on the floor vertex behind it
    spikes = floor[1:] if extra_floor else floor
    for s in range(k):
        tris.append((comb[2 * s], comb[2 * s + 1], spikes[s]))
        tris.append((comb[2 * s + 1], comb[2 * s + 2], spikes[s]))
    for s in range(1, k):
        tris.append((comb[2 * s], spikes[s], spikes[s - 1]))
    if extra_floor:
        tris.append((comb[0], floor[1], floor[0]))
    # floor chain (with the comb ends) fanned to the first back row
    chain = [comb[0]] + floor + [comb[2 * k]]
    half = len(chain) // 2
    for i in range(len(chain) - 1):
        tris.append((chain[i], chain[i + 1], L[0] if i < half else R[0]))
    tris.append((chain[half], R[0], L[0]))
    for j in range(m - 1):
        tris.append((L[j], R[j], R[j + 1]))
        tris.append((L[j], R[j + 1], L[j + 1]))

    if box:
        zb = (max(zs) + H) / 2
        levels = [-Y, Fraction(0)] + [Fraction(j + 1) for j in range(m)]
        left = [add((-1, y, zb)) for y in levels]
        right = [add((2 * k + 1, y, zb)) for y in levels]
        lchain = [P, comb[0]] + L
        rchain = [P, comb[2 * k]] + R
        for col, ch in ((left, lchain), (right, rchain)):
            for j in range(len(levels) - 1):
                tris.append((col[j], ch[j], ch[j + 1]))
                tris.append((col[j], ch[j + 1], col[j + 1]))
    F = [_ccw(V, t) for t in tris]
    return V, F, P


def gen_quadratic(n: int):
    """Terrain with n vertices whose viewshed from the returned viewpoint is quadratic."""
    if n < 16 or n % 4:
        raise ValueError("n must be a multiple of 4 and at least 16")
    k = n // 4
    rest = n - (2 + 3 * k)
    m, extra = divmod(rest, 2)
    V, F, P = _spike_construction(k, m, box=False, extra_floor=bool(extra))
    T = Terrain2D(V, F)
    return T, Viewpoint.at_vertex(T, P)


def gen_theorem4_2d(k: int, m: int):
    """k spikes, m back rows and a box; prickliness stays near k."""
    if k < 2 or m < 2:
        raise ValueError("k and m must be at least 2")
    V, F, P = _spike_construction(k, m, box=True)
    T = Terrain2D(V, F)
    return T, Viewpoint.at_vertex(T, P)


# ---------------------------------------------------------------------------
# 1.5D families


def _round_sig(x: Fraction, digits: int) -> Fraction:
    if x == 0:
        return x
    e = math.floor(math.log10(abs(float(x)))) if abs(float(x)) not in (0.0, math.inf) else 0
    q = Fraction(10) ** (digits - 1 - e)
    return Fraction(round(x * q)) / q


def _unit_deg(deg: float) -> Tuple[Fraction, Fraction]:
    r = math.radians(deg)
    return Fraction(math.cos(r)), Fraction(math.sin(r))


def gen_theorem1_1d(n: int, viewpoint_fraction: Optional[Fraction] = None):
    """n vertices on n/2 fanned rays; prickliness 2 and a linear viewshed.

    The viewpoint sits on the first edge at ``viewpoint_fraction`` (default 1/n)
    of its length away from the fan center.
    """
    if n < 8 or n % 2:
        raise ValueError("n must be even and at least 8")
    rays = n // 2
    step = 2.0 / n
    base = -45.0
    dirs = [_unit_deg(base + i * step) for i in range(rays)]
    p = (Fraction(0), Fraction(0))
    vs = [dirs[0]]
    ws = []
    for i in range(rays - 1):
        w = (2 * vs[i][0], 2 * vs[i][1])
        ws.append(w)
        e = _unit_deg(base + i * step + 5.0 / n)
        r = dirs[i + 1]
        # w + s*e = t*r
        det = e[0] * (-r[1]) - e[1] * (-r[0])
        s = ((-w[0]) * (-r[1]) - (-w[1]) * (-r[0])) / det
        t_ = (e[0] * (-w[1]) - e[1] * (-w[0])) / det
        v = (_round_sig(t_ * r[0], 40), _round_sig(t_ * r[1], 40))
        vs.append(v)
    verts = [p]
    for i in range(rays - 1):
        verts += [vs[i], ws[i]]
    verts.append(vs[-1])
    T = Terrain1D(verts)
    f = Fraction(1, n) if viewpoint_fraction is None else rat(viewpoint_fraction)
    vp = Viewpoint((p[0] + f * vs[0][0], p[1] + f * vs[0][1]))
    return T, vp


def _half_angle_unit(deg: Fraction) -> Tuple[Fraction, Fraction]:
    """Exact rational unit vector at (approximately) ``deg`` degrees."""
    t = Fraction(math.tan(math.radians(float(deg)) / 2)).limit_denominator(10 ** 9)
    d = 1 + t * t
    return (1 - t * t) / d, 2 * t / d


def element_sectors(S: Sequence[int]) -> List[Tuple[Fraction, Fraction]]:
    M = max(S)
    eps = Fraction(18, M + 1)
    return [(Fraction(x * 180, M + 1) - eps, Fraction(x * 180, M + 1) + eps) for x in S]


def gen_element_distinctness_1d(S: Sequence[int]) -> Terrain1D:
    """One peak per element with a prescribed sector, plus tall separators.

    Peak ``i`` sits at (4i, 0) with both neighbours at distance one; the
    separator between two peaks is high enough that both adjacent neighbours
    are concave and its own sector spans all peak sectors.
    """
    S = [int(x) for x in S]
    if not S or min(S) <= 0:
        raise ValueError("S must be a nonempty list of positive integers")
    secs = element_sectors(S)
    lo_dir = _half_angle_unit(min(a for a, _ in secs))
    hi_dir = _half_angle_unit(max(b for _, b in secs))
    peaks = []
    for i, (a, b) in enumerate(secs):
        v = (Fraction(4 * i), Fraction(0))
        r = _half_angle_unit(a - 90)
        l = _half_angle_unit(b + 90)
        peaks.append(((v[0] + l[0], v[1] + l[1]), v, (v[0] + r[0], v[1] + r[1])))
    verts = []
    for i, (wl, v, wr) in enumerate(peaks):
        verts += [wl, v, wr]
        if i + 1 < len(peaks):
            wl2, v2, _ = peaks[i + 1]
            ux = Fraction(4 * i + 2)
            bounds = []
            # both neighbours strictly concave: u above the lines v-wr and v2-wl2
            for a, b in ((v, wr), (v2, wl2)):
                bounds.append(a[1] + (b[1] - a[1]) * (ux - a[0]) / (b[0] - a[0]))
            # u is a local maximum for both extreme directions
            for d in (lo_dir, hi_dir):
                for w in (wr, wl2):
                    bounds.append(w[1] + (w[0] - ux) * d[0] / d[1])
            hmin = max(bounds)
            h = 2 * hmin if hmin > 0 else hmin + 1
            verts.append((ux, h))
    return Terrain1D(verts)


# ---------------------------------------------------------------------------
# cone gadget


@dataclass
class ConeGadget:
    terrain: Terrain2D
    center: int
    corners: Tuple[Tuple[Fraction, Fraction, Fraction], ...]

    def in_rectangle(self, d) -> bool:
        return rectangle_contains(self.corners, d)


def _det3(a, b, c):
    return dot(a, cross(b, c))


def rectangle_contains(corners, d) -> bool:
    """Membership in the conic hull of four corner directions (two simplicial cones)."""
    d = tuple(rat(x) for x in d)
    c1, c2, c3, c4 = corners
    for a, b, c in ((c1, c2, c3), (c1, c3, c4)):
        D = _det3(a, b, c)
        if D == 0:
            continue
        l1 = _det3(d, b, c) / D
        l2 = _det3(a, d, c) / D
        l3 = _det3(a, b, d) / D
        if l1 >= 0 and l2 >= 0 and l3 >= 0:
            return True
    return False


def gen_cone_gadget(corners, ring_radius: int = 8) -> ConeGadget:
    """Center vertex whose peak cone is the conic hull of four CCW corner directions."""
    cs = tuple(tuple(rat(x) for x in c) for c in corners)
    if len(cs) != 4:
        raise ValueError("a rectangle needs four corners")
    if any(c[2] <= 0 for c in cs):
        raise ValueError("every corner must have positive z")
    if _det3(cs[0], cs[1], cs[2]) <= 0:
        raise ValueError("corners must be counter-clockwise seen from above")
    v = (Fraction(0), Fraction(0), Fraction(2))
    greens = []
    for i in range(4):
        a = cross(cs[i], cs[(i + 1) % 4])
        a = tuple(-x for x in a)  # outward: away from the rectangle
        s = 2 * max(abs(x) for x in a)
        greens.append(tuple(v[j] + a[j] / s for j in range(3)))
    greens.sort(key=lambda g: math.atan2(float(g[1]), float(g[0])))
    V = [v] + greens
    ring = []
    for g in greens:
        s = Fraction(ring_radius) / max(abs(g[0]), abs(g[1]))
        ring.append((g[0] * s, g[1] * s, Fraction(0)))
    V += ring
    F = []
    for i in range(4):
        j = (i + 1) % 4
        gi, gj, ri, rj = 1 + i, 1 + j, 5 + i, 5 + j
        F.append(_ccw(V, (0, gi, gj)))
        if orient2d(V[gi], V[ri], V[rj]) > 0 and orient2d(V[gi], V[rj], V[gj]) > 0:
            F += [(gi, ri, rj), (gi, rj, gj)]
        else:
            F += [_ccw(V, (gi, ri, gj)), _ccw(V, (ri, rj, gj))]
    return ConeGadget(Terrain2D(V, F), 0, cs)


def random_rectangle(rng: random.Random, spread: int = 3):
    """Four CCW corners around a random upward direction, all with z > 0."""
    while True:
        c = (rng.randint(-spread, spread), rng.randint(-spread, spread), rng.randint(2, 6))
        u = cross((0, 0, 1), c) if c[:2] != (0, 0) else (1, 0, 0)
        w = cross(c, u)
        a = Fraction(rng.randint(1, 8), 16)
        b = Fraction(rng.randint(1, 8), 16)
        nu = max(abs(x) for x in u)
        nw = max(abs(x) for x in w)
        nc = max(abs(x) for x in c)
        U = tuple(Fraction(x, nu) * nc * a for x in u)
        W = tuple(Fraction(x, nw) * nc * b for x in w)
        corners = [tuple(c[i] + su * U[i] + sw * W[i] for i in range(3))
                   for su, sw in ((1, 1), (-1, 1), (-1, -1), (1, -1))]
        if all(q[2] > 0 for q in corners):
            if _det3(corners[0], corners[1], corners[2]) < 0:
                corners.reverse()
            return tuple(corners)


# ---------------------------------------------------------------------------
# random and grid terrains


def gen_grid(heights, diagonal: str = "ll-ur") -> Terrain2D:
    """Grid terrain; ``heights[row][col]`` sits at (col, row)."""
    rows = [list(r) for r in heights]
    if len(rows) < 2 or any(len(r) != len(rows[0]) for r in rows) or len(rows[0]) < 2:
        raise ValueError("heights must be a rectangular matrix of at least 2x2")
    if diagonal not in ("ll-ur", "ul-lr"):
        raise ValueError("diagonal must be 'll-ur' or 'ul-lr'")
    nr, nc = len(rows), len(rows[0])
    V = [(Fraction(i), Fraction(j), rat(rows[j][i])) for j in range(nr) for i in range(nc)]
    F = []
    for j in range(nr - 1):
        for i in range(nc - 1):
            ll, lr = j * nc + i, j * nc + i + 1
            ul, ur = ll + nc, lr + nc
            if diagonal == "ll-ur":
                F += [(ll, lr, ur), (ll, ur, ul)]
            else:
                F += [(ll, lr, ul), (lr, ur, ul)]
    return Terrain2D(V, F)


def _hills(rng: random.Random, pts, size, roughness) -> List[int]:
    hills = [(rng.uniform(0, size), rng.uniform(0, size), rng.uniform(0.15, 0.4) * size,
              rng.uniform(20, 60)) for _ in range(3)]
    out = []
    for x, y in pts:
        h = sum(a * math.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s))
                for cx, cy, s, a in hills)
        out.append(int(round(h)) + rng.randint(-roughness, roughness) if roughness else
                   int(round(h)))
    return out


def gen_random(n: int, seed: int = 0, roughness: int = 3) -> Terrain2D:
    """Delaunay terrain on n distinct integer sites with hilly integer heights."""
    from scipy.spatial import Delaunay

    if n < 3:
        raise ValueError("n must be at least 3")
    for attempt in range(50):
        rng = random.Random(f"{seed}:{attempt}")
        size = max(8, int(4 * math.sqrt(n)))
        pts = set()
        while len(pts) < n:
            pts.add((rng.randint(0, size), rng.randint(0, size)))
        pts = sorted(pts)
        hs = _hills(rng, pts, size, roughness)
        V = [(Fraction(x), Fraction(y), Fraction(h)) for (x, y), h in zip(pts, hs)]
        try:
            tri = Delaunay(np.array(pts, dtype=float))
        except Exception:
            continue
        F = []
        for s in tri.simplices:
            a, b, c = (int(i) for i in s)
            if orient2d(V[a], V[b], V[c]) == 0:
                continue
            F.append(_ccw(V, (a, b, c)))
        try:
            return Terrain2D(V, F)
        except TerrainError:
            continue
    raise RuntimeError("could not build a valid random terrain")


def gen_random_1d(n: int, seed: int = 0) -> Terrain1D:
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = random.Random(seed)
    xs = sorted(rng.sample(range(4 * n), n))
    return Terrain1D([(x, rng.randint(0, 3 * n)) for x in xs])


# ---------------------------------------------------------------------------
# named families for the command line


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: Tuple[Tuple[str, str], ...] = ()
    seed: int = 0

    @classmethod
    def parse(cls, family: str, items: Sequence[str] = ()) -> "GeneratorSpec":
        params = []
        seed = 0
        for it in items:
            if "=" not in it:
                raise ValueError(f"parameter {it!r} is not key=value")
            k, v = it.split("=", 1)
            if k == "seed":
                seed = int(v)
            else:
                params.append((k, v))
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
        return cls(family, tuple(params), seed)

    def build(self):
        """Terrain (and viewpoint when the family has one)."""
        p = dict(self.params)
        f = self.family
        try:
            if f == "quadratic":
                return gen_quadratic(int(p.get("n", 40)))
            if f == "zigzag":
                return gen_theorem1_1d(int(p.get("n", 20)))
            if f == "mountains":
                return gen_theorem4_2d(int(p.get("k", 4)), int(p.get("m", 10)))
            if f == "element-distinctness":
                return gen_element_distinctness_1d([int(x) for x in p.get("S", "1/2/3").split("/")])
            if f == "cone-gadget":
                return gen_cone_gadget(random_rectangle(random.Random(self.seed))).terrain
            if f == "random":
                return gen_random(int(p.get("n", 50)), self.seed, int(p.get("roughness", 3)))
            if f == "random1d":
                return gen_random_1d(int(p.get("n", 50)), self.seed)
        except KeyError as e:
            raise ValueError(f"missing parameter {e}") from None
        raise ValueError(f"unknown family {f!r}")


FAMILIES = ("quadratic", "zigzag", "mountains", "element-distinctness", "cone-gadget",
            "random", "random1d")
