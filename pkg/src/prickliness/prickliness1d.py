"""Directional peak sectors of 1.5D terrains and the sorting sweep."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import List, Optional, Tuple

import numpy as np

from .geometry import cross2, dot, exact_matmul, sign, sub
from .terrain import Terrain1D, VertexClass


def _half(v) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def compare_angle(a, b) -> int:
    """Exact CCW order of two nonzero 2-vectors, angles taken in [0, 360)."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    return -sign(cross2(a, b))


def angle_degrees(v) -> float:
    return math.degrees(math.atan2(float(v[1]), float(v[0]))) % 360.0


@dataclass(frozen=True)
class AngularSector:
    """Closed arc of directions from ``start`` CCW to ``end`` (integer vectors)."""

    start: Optional[Tuple[int, int]]
    end: Optional[Tuple[int, int]]
    owner: int = -1

    @property
    def empty(self) -> bool:
        return self.start is None

    def contains(self, w) -> bool:
        if self.empty:
            return False
        c = cross2(self.start, self.end)
        if c > 0:
            return cross2(self.start, w) >= 0 and cross2(w, self.end) >= 0
        # zero-width sector: only the single direction itself
        return cross2(self.start, w) == 0 and dot(self.start, w) > 0

    def degrees(self) -> Tuple[float, float]:
        return angle_degrees(self.start), angle_degrees(self.end)


EMPTY = AngularSector(None, None)


def sector(T: Terrain1D, v: int) -> AngularSector:
    """Directions along which internal vertex ``v`` is a local maximum.

    A concave vertex gets the empty sector and a vertex between two collinear
    edges gets the single direction normal to them.
    """
    if not T.is_internal(v):
        raise ValueError("sector is only defined for internal vertices")
    cls = T.classes[v]
    if cls is VertexClass.CONCAVE_INTERNAL:
        return AngularSector(None, None, v)
    iv = T.int_vertices
    a = sub(iv[v - 1], iv[v])
    b = sub(iv[v + 1], iv[v])
    # boundary normals of the two half-circles, both with positive y
    start = (-b[1], b[0])
    end = (a[1], -a[0])
    return AngularSector(start, end, v)


@dataclass
class Prickliness1DResult:
    value: int
    witness: Optional[Tuple[int, int]]
    vertices: List[int] = field(default_factory=list)

    @property
    def witness_degrees(self) -> Optional[float]:
        return None if self.witness is None else angle_degrees(self.witness)


def convex_sectors(T: Terrain1D) -> List[AngularSector]:
    return [sector(T, v) for v in T.convex_internal]


def prickliness_1d(T: Terrain1D) -> Prickliness1DResult:
    """Maximum overlap of the closed sectors, by one sorted sweep."""
    sectors = convex_sectors(T)
    if not sectors:
        return Prickliness1DResult(0, None, [])
    # kind 0 = start, 1 = end: at equal angles starts come first
    events = []
    for k, s in enumerate(sectors):
        events.append((s.start, 0, k))
        events.append((s.end, 1, k))

    def cmp(e, f):
        c = compare_angle(e[0], f[0])
        return c if c else e[1] - f[1]

    events.sort(key=cmp_to_key(cmp))
    depth = best = 0
    best_at = None
    for vec, kind, _ in events:
        if kind == 0:
            depth += 1
            if depth > best:
                best, best_at = depth, vec
        else:
            depth -= 1
    members = [s.owner for s in sectors if s.contains(best_at)]
    return Prickliness1DResult(best, best_at, members)


def brute_force_1d(T: Terrain1D) -> Prickliness1DResult:
    """Depth at every sector endpoint by direct containment tests."""
    sectors = convex_sectors(T)
    if not sectors:
        return Prickliness1DResult(0, None, [])
    S = np.array([s.start for s in sectors], dtype=object)
    E = np.array([s.end for s in sectors], dtype=object)
    W = np.concatenate([S, E])
    # cross(start_j, w_i) >= 0 and cross(w_i, end_j) >= 0
    A = np.stack([-S[:, 1], S[:, 0]])
    B = np.stack([E[:, 1], -E[:, 0]])
    inside = (exact_matmul(W, A) >= 0) & (exact_matmul(W, B) >= 0)
    depth = inside.sum(axis=1)
    i = int(np.argmax(depth))
    w = tuple(int(c) for c in W[i])
    members = [sectors[j].owner for j in np.nonzero(inside[i])[0]]
    return Prickliness1DResult(int(depth[i]), w, members)
