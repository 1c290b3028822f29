"""Geodesic model spaces: free-group tree, hyperbolic half-plane, Euclidean
space, and products.

Every space exposes the same small surface: ``distance``, ``geodesic``,
``project``, deterministic ``ball_points`` sampling, and JSON round-tripping
of points.  Segments are arclength-parametrized; ``point_at(0)`` is the
start, ``point_at(length)`` the end, and parameter differences equal
distances (exactly on the tree and Euclidean space, within tolerance on the
half-plane).

Projections onto segments are single-valued here: the tree and all CAT(0)
model spaces have unique nearest points, and every downstream check is
stated with enough slack that the choice of representative cannot create
false violations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable

import numpy as np

from .errors import InputError, NumericError
from .words import (
    Word,
    check_reduced,
    common_prefix_length,
    multiply,
    word_distance,
)
from . import words as W

GOLDEN_INV = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-9, max_iter: int = 200) -> float:
    """Bracketed golden-section minimum of a convex function on [lo, hi].

    Derivative-free and robust near flat minima; the iteration cap protects
    against pathological callables.
    """
    if hi < lo:
        raise InputError("empty bracket")
    if hi - lo <= tol:
        return 0.5 * (lo + hi)
    a, b = lo, hi
    c = b - GOLDEN_INV * (b - a)
    d = a + GOLDEN_INV * (b - a)
    fc, fd = f(c), f(d)
    if math.isnan(fc) or math.isnan(fd):
        raise NumericError("objective returned NaN")
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN_INV * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN_INV * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class ProjectionResult:
    """Nearest point of a segment: the point, its distance to the query,
    and its arclength position on the segment."""
    point: Any
    distance: float
    parameter: float


# ---------------------------------------------------------------------------
# Tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreePoint:
    """A point of the Cayley tree of a free group.

    ``anchor`` is a vertex (reduced word).  Vertices have ``letter is
    None``.  An interior edge point sits at distance ``t`` in (0, 1) from
    ``anchor`` along the edge toward ``anchor + (letter,)``; the canonical
    form anchors at the shorter endpoint of the edge.
    """
    anchor: Word
    letter: int | None = None
    t: float = 0.0

    @property
    def is_vertex(self) -> bool:
        return self.letter is None

    def edge(self) -> tuple[Word, Word]:
        """(parent, child) endpoints of the carrying edge."""
        return self.anchor, self.anchor + (self.letter,)

    def __repr__(self):  # pragma: no cover - debugging aid
        if self.is_vertex:
            return f"TreePoint({W.to_string(self.anchor) or 'e'})"
        return (f"TreePoint({W.to_string(self.anchor) or 'e'}"
                f"--{W.to_string((self.letter,))}@{self.t})")


def tree_point(anchor: Word, letter: int | None = None, t: float = 0.0) -> TreePoint:
    """Canonicalizing constructor for tree points."""
    anchor = check_reduced(anchor)
    if letter is None or t == 0.0:
        return TreePoint(anchor, None, 0.0)
    if not (0.0 <= t <= 1.0):
        raise InputError(f"edge offset {t} outside [0, 1]")
    if anchor and letter == -anchor[-1]:
        # re-anchor at the shorter endpoint of the edge
        return tree_point(anchor[:-1], anchor[-1], 1.0 - t)
    if t == 1.0:
        return TreePoint(anchor + (letter,), None, 0.0)
    return TreePoint(anchor, letter, t)


def vertex(word_or_str) -> TreePoint:
    w = W.from_string(word_or_str) if isinstance(word_or_str, str) else tuple(word_or_str)
    return tree_point(w)


def _exit_options(p: TreePoint) -> list[tuple[Word, float]]:
    """Vertices through which a geodesic can leave p, with the edge cost."""
    if p.is_vertex:
        return [(p.anchor, 0.0)]
    parent, child = p.edge()
    return [(parent, p.t), (child, 1.0 - p.t)]


def _vertex_chain(u: Word, v: Word) -> list[Word]:
    """Vertices of the unique tree path from u to v, inclusive."""
    k = common_prefix_length(u, v)
    down = [u[:i] for i in range(len(u), k, -1)]
    up = [v[:i] for i in range(k, len(v) + 1)]
    return down + up


class TreeSegment:
    """Oriented geodesic of the tree, possibly with fractional ends."""

    def __init__(self, space: "TreeSpace", a: TreePoint, b: TreePoint):
        self.space = space
        self.start = a
        self.end = b
        if (not a.is_vertex and not b.is_vertex
                and a.anchor == b.anchor and a.letter == b.letter):
            # both interior to the same edge
            self._same_edge = True
            self.chain: tuple[Word, ...] = ()
            self.lead = 0.0
            self.tail = 0.0
            self.length = abs(a.t - b.t)
            return
        self._same_edge = False
        best = None
        for ea, ca in _exit_options(a):
            for eb, cb in _exit_options(b):
                total = ca + word_distance(ea, eb) + cb
                if best is None or total < best[0]:
                    best = (total, ea, ca, eb, cb)
        total, ea, ca, eb, cb = best
        self.chain = tuple(_vertex_chain(ea, eb))
        self.lead = ca
        self.tail = cb
        self.length = float(total)

    def point_at(self, s: float) -> TreePoint:
        eps = 1e-12
        if s < -eps or s > self.length + eps:
            raise InputError(f"parameter {s} outside [0, {self.length}]")
        s = min(max(s, 0.0), self.length)
        if self._same_edge:
            a = self.start
            t = a.t + (s if self.end.t >= a.t else -s)
            return tree_point(a.anchor, a.letter, t)
        if s <= self.lead + eps and self.lead > 0:
            # within the partial starting edge
            parent, _child = self.start.edge()
            rem = self.lead - s   # distance from the first chain vertex
            if rem < eps:
                return tree_point(self.chain[0])
            if self.chain[0] == parent:
                return tree_point(parent, self.start.letter, rem)
            return tree_point(parent, self.start.letter, 1.0 - rem)
        u = s - self.lead
        k = len(self.chain) - 1
        if u <= k + eps:
            i = int(math.floor(u + eps))
            i = min(i, k)
            frac = u - i
            if frac < eps:
                return tree_point(self.chain[i])
            lo, hi = self.chain[i], self.chain[i + 1]
            if len(hi) > len(lo):
                return tree_point(lo, hi[-1], frac)
            return tree_point(hi, lo[-1], 1.0 - frac)
        v = u - k   # into the partial ending edge
        parent, _child = self.end.edge()
        if v < eps:
            return tree_point(self.chain[-1])
        if self.chain[-1] == parent:
            return tree_point(parent, self.end.letter, v)
        return tree_point(parent, self.end.letter, 1.0 - v)

    def reversed(self) -> "TreeSegment":
        return TreeSegment(self.space, self.end, self.start)


class TreeSpace:
    """Cayley tree of the free group of the given rank, word metric.

    Vertices are reduced words; edge interiors realize the geodesic-space
    contract while the word algebra stays exact.
    """

    kind = "tree"

    def __init__(self, rank: int = 2, dd_constant: float = 1.0, tol: float = 1e-9):
        if rank < 1:
            raise InputError("rank must be >= 1")
        if dd_constant < 0:
            raise InputError("dd constant must be >= 0")
        self.rank = rank
        self.dd_constant = dd_constant
        self.tol = tol

    # -- points ------------------------------------------------------------
    def validate_point(self, p: TreePoint) -> TreePoint:
        if not isinstance(p, TreePoint):
            raise InputError(f"not a tree point: {p!r}")
        check_reduced(p.anchor)
        if p.letter is not None:
            if not (1 <= abs(p.letter) <= self.rank):
                raise InputError(f"letter {p.letter} outside rank {self.rank}")
            if not (0.0 < p.t < 1.0):
                raise InputError("interior point offset must lie in (0, 1)")
            if p.anchor and p.letter == -p.anchor[-1]:
                raise InputError("edge letter cancels the anchor")
        for x in p.anchor:
            if not (1 <= abs(x) <= self.rank):
                raise InputError(f"word letter {x} outside rank {self.rank}")
        return p

    def basepoint(self) -> TreePoint:
        return tree_point(W.IDENTITY)

    def distance(self, x: TreePoint, y: TreePoint) -> float:
        if x.is_vertex and y.is_vertex:
            return float(word_distance(x.anchor, y.anchor))
        if (not x.is_vertex and not y.is_vertex
                and x.anchor == y.anchor and x.letter == y.letter):
            return abs(x.t - y.t)
        return min(cx + word_distance(ex, ey) + cy
                   for ex, cx in _exit_options(x)
                   for ey, cy in _exit_options(y))

    def geodesic(self, a: TreePoint, b: TreePoint) -> TreeSegment:
        return TreeSegment(self, self.validate_point(a), self.validate_point(b))

    def project(self, x: TreePoint, seg: TreeSegment) -> ProjectionResult:
        da = self.distance(x, seg.start)
        db = self.distance(x, seg.end)
        t = 0.5 * (da - db + seg.length)
        t = min(max(t, 0.0), seg.length)
        point = seg.point_at(t)
        return ProjectionResult(point, self.distance(x, point), t)

    def segment_distance(self, s1: TreeSegment, s2: TreeSegment) -> float:
        # d(., s2) is convex with unit slopes along s1 off the minimum set,
        # so the endpoint values pin the minimum exactly.
        fa = self.project(s1.start, s2).distance
        fb = self.project(s1.end, s2).distance
        return max(0.0, 0.5 * (fa + fb - s1.length))

    # -- sampling ----------------------------------------------------------
    def vertices_within(self, p: TreePoint, radius: float) -> list[TreePoint]:
        """All tree vertices within the given radius of p (exhaustive)."""
        out: dict[Word, None] = {}
        for anchor_word, cost in _exit_options(p):
            rem = int(math.floor(radius - cost + 1e-9))
            if rem < 0:
                continue
            for u in W.ball(self.rank, rem):
                out.setdefault(multiply(anchor_word, u))
        return [tree_point(w) for w in sorted(out, key=lambda w: (len(w), w))]

    def ball_points(self, center: TreePoint, radius: float,
                    samples: int = 0) -> list[TreePoint]:
        """Ball sampling is exhaustive over vertices; the tree needs nothing
        finer because projections are determined at vertices."""
        pts = self.vertices_within(center, radius)
        if center.is_vertex:
            return pts
        return [center] + pts

    def pairwise_distances(self, points: list[TreePoint]) -> np.ndarray:
        if all(p.is_vertex for p in points):
            return _packed_word_distances([p.anchor for p in points])
        n = len(points)
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = self.distance(points[i], points[j])
        return out

    # -- serialization -----------------------------------------------------
    def point_key(self, p: TreePoint):
        if p.is_vertex:
            return p.anchor
        return (p.anchor, p.letter, round(p.t, 12))

    def point_to_json(self, p: TreePoint):
        if p.is_vertex:
            return {"v": W.to_string(p.anchor)}
        return {"v": W.to_string(p.anchor), "edge": W.to_string((p.letter,)),
                "t": p.t}

    def point_from_json(self, data) -> TreePoint:
        anchor = W.from_string(data["v"])
        if "edge" not in data:
            return tree_point(anchor)
        (letter,) = W.from_string(data["edge"])
        return tree_point(anchor, letter, data["t"])

    def describe(self) -> dict:
        return {"kind": self.kind, "rank": self.rank,
                "dd_constant": self.dd_constant, "tolerance": self.tol}


def _packed_word_distances(ws: list[Word]) -> np.ndarray:
    """All pairwise word-metric distances via packed letter arrays."""
    n = len(ws)
    if n == 0:
        return np.zeros((0, 0))
    maxlen = max((len(w) for w in ws), default=0) or 1
    arr = np.zeros((n, maxlen), dtype=np.int16)
    lens = np.empty(n, dtype=np.int64)
    for i, w in enumerate(ws):
        lens[i] = len(w)
        if w:
            arr[i, :len(w)] = w
    out = np.empty((n, n), dtype=np.float64)
    chunk = max(1, min(n, 8_000_000 // (n * maxlen + 1)))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        eq = (arr[lo:hi, None, :] == arr[None, :, :]) & (arr[lo:hi, None, :] != 0)
        lcp = np.cumprod(eq, axis=2, dtype=np.int64).sum(axis=2)
        out[lo:hi] = lens[lo:hi, None] + lens[None, :] - 2 * lcp
    return out


# ---------------------------------------------------------------------------
# Hyperbolic half-plane
# ---------------------------------------------------------------------------

def _hp_distance(z: complex, w: complex) -> float:
    # 2 asinh(|z - w| / (2 sqrt(Im z Im w))): stable form of the classical
    # arccosh(1 + |z-w|^2 / (2 Im z Im w)).
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


class HalfPlaneSegment:
    """Geodesic of the upper half-plane: a vertical ray piece or an arc of a
    semicircle centered on the real axis, parametrized by arclength."""

    def __init__(self, space: "HalfPlaneSpace", a: complex, b: complex):
        self.space = space
        self.start = a
        self.end = b
        scale = max(1.0, abs(a), abs(b))
        if abs(a.real - b.real) <= 1e-12 * scale:
            self._vertical = True
            self._x = 0.5 * (a.real + b.real)
            u0, u1 = math.log(a.imag), math.log(b.imag)
        else:
            self._vertical = False
            c = (abs(a) ** 2 - abs(b) ** 2) / (2.0 * (a.real - b.real))
            self._c = c
            self._r = abs(a - c)
            u0 = self._u(a)
            u1 = self._u(b)
        self._u0 = u0
        self._sign = 1.0 if u1 >= u0 else -1.0
        self.length = abs(u1 - u0)

    def _u(self, z: complex) -> float:
        theta = math.atan2(z.imag, z.real - self._c)
        return math.log(math.tan(0.5 * theta))

    def point_at(self, s: float) -> complex:
        if s < -1e-9 or s > self.length + 1e-9:
            raise InputError(f"parameter {s} outside [0, {self.length}]")
        s = min(max(s, 0.0), self.length)
        u = self._u0 + self._sign * s
        if self._vertical:
            return complex(self._x, math.exp(u))
        theta = 2.0 * math.atan(math.exp(u))
        return self._c + self._r * cmath.exp(1j * theta)

    def reversed(self) -> "HalfPlaneSegment":
        return HalfPlaneSegment(self.space, self.end, self.start)


class HalfPlaneSpace:
    """Upper half-plane with the hyperbolic metric; points are complex with
    positive imaginary part."""

    kind = "half-plane"

    def __init__(self, dd_constant: float = 1.0, tol: float = 1e-9):
        if dd_constant < 0:
            raise InputError("dd constant must be >= 0")
        self.dd_constant = dd_constant
        self.tol = tol

    def validate_point(self, z) -> complex:
        z = complex(z)
        if not (z.imag > 0.0) or not math.isfinite(z.imag) or not math.isfinite(z.real):
            raise InputError(f"not in the upper half-plane: {z!r}")
        return z

    def basepoint(self) -> complex:
        return 1j

    def distance(self, x, y) -> float:
        return _hp_distance(complex(x), complex(y))

    def geodesic(self, a, b) -> HalfPlaneSegment:
        return HalfPlaneSegment(self, self.validate_point(a), self.validate_point(b))

    def project(self, x, seg: HalfPlaneSegment) -> ProjectionResult:
        return _convex_project(self, x, seg)

    def segment_distance(self, s1, s2) -> float:
        return _convex_segment_distance(self, s1, s2)

    def ball_points(self, center, radius: float, samples: int = 64) -> list[complex]:
        """Deterministic sample of the closed hyperbolic ball.

        The hyperbolic ball is the Euclidean disk centered at
        (x, y cosh r) with radius y sinh r; we take a sunflower spread in
        that disk, a boundary ring, and the extreme points on the vertical
        geodesic through the center.
        """
        center = self.validate_point(center)
        x, y = center.real, center.imag
        ce = complex(x, y * math.cosh(radius))
        re = y * math.sinh(radius)
        pts = [center, complex(x, y * math.exp(radius)),
               complex(x, y * math.exp(-radius))]
        ring = max(8, samples // 4)
        for k in range(ring):
            ang = 2.0 * math.pi * (k + 0.5) / ring
            pts.append(ce + re * cmath.exp(1j * ang))
        interior = max(0, samples - len(pts))
        for j in range(1, interior + 1):
            rho = re * math.sqrt(j / (interior + 1))
            ang = j * GOLDEN_ANGLE
            pts.append(ce + rho * cmath.exp(1j * ang))
        return pts

    def pairwise_distances(self, points) -> np.ndarray:
        zs = np.asarray([complex(p) for p in points])
        dz = np.abs(zs[:, None] - zs[None, :])
        ys = zs.imag
        return 2.0 * np.arcsinh(dz / (2.0 * np.sqrt(ys[:, None] * ys[None, :])))

    def point_key(self, p):
        return (round(p.real, 9), round(p.imag, 9))

    def point_to_json(self, p):
        return [p.real, p.imag]

    def point_from_json(self, data):
        return complex(data[0], data[1])

    def describe(self) -> dict:
        return {"kind": self.kind, "dd_constant": self.dd_constant,
                "tolerance": self.tol}


# ---------------------------------------------------------------------------
# Euclidean space (plane or line)
# ---------------------------------------------------------------------------

class EuclideanSegment:
    def __init__(self, space: "EuclideanSpace", a: tuple, b: tuple):
        self.space = space
        self.start = a
        self.end = b
        self.length = math.dist(a, b)

    def point_at(self, s: float) -> tuple:
        if s < -1e-9 or s > self.length + 1e-9:
            raise InputError(f"parameter {s} outside [0, {self.length}]")
        if self.length == 0.0:
            return self.start
        t = min(max(s / self.length, 0.0), 1.0)
        return tuple(a + t * (b - a) for a, b in zip(self.start, self.end))

    def reversed(self) -> "EuclideanSegment":
        return EuclideanSegment(self.space, self.end, self.start)


class EuclideanSpace:
    """Flat R^dim; the negative control where nothing contracts."""

    kind = "euclidean"

    def __init__(self, dim: int = 2, dd_constant: float = 0.0, tol: float = 1e-9):
        if dim < 1:
            raise InputError("dim must be >= 1")
        if dd_constant < 0:
            raise InputError("dd constant must be >= 0")
        self.dim = dim
        self.dd_constant = dd_constant
        self.tol = tol

    def validate_point(self, p) -> tuple:
        p = tuple(float(c) for c in (p if isinstance(p, Iterable) else (p,)))
        if len(p) != self.dim:
            raise InputError(f"point {p!r} has dim {len(p)}, expected {self.dim}")
        if not all(math.isfinite(c) for c in p):
            raise InputError(f"non-finite coordinate in {p!r}")
        return p

    def basepoint(self) -> tuple:
        return (0.0,) * self.dim

    def distance(self, x, y) -> float:
        return math.dist(x, y)

    def geodesic(self, a, b) -> EuclideanSegment:
        return EuclideanSegment(self, self.validate_point(a), self.validate_point(b))

    def project(self, x, seg: EuclideanSegment) -> ProjectionResult:
        return _convex_project(self, x, seg)

    def segment_distance(self, s1, s2) -> float:
        return _convex_segment_distance(self, s1, s2)

    def ball_points(self, center, radius: float, samples: int = 64) -> list[tuple]:
        center = self.validate_point(center)
        pts = [center]
        if self.dim == 1:
            m = max(2, samples // 2)
            for j in range(1, m + 1):
                off = radius * j / m
                pts.append((center[0] + off,))
                pts.append((center[0] - off,))
            return pts
        # axis-aligned boundary points first: they realize extreme shadows
        for i in range(self.dim):
            for sgn in (1.0, -1.0):
                q = list(center)
                q[i] += sgn * radius
                pts.append(tuple(q))
        interior = max(0, samples - len(pts))
        for j in range(1, interior + 1):
            rho = radius * math.sqrt(j / (interior + 1))
            ang = j * GOLDEN_ANGLE
            q = list(center)
            q[0] += rho * math.cos(ang)
            q[1 % self.dim] += rho * math.sin(ang)
            pts.append(tuple(q))
        return pts

    def pairwise_distances(self, points) -> np.ndarray:
        arr = np.asarray(points, dtype=np.float64).reshape(len(points), -1)
        diff = arr[:, None, :] - arr[None, :, :]
        return np.sqrt((diff * diff).sum(axis=2))

    def point_key(self, p):
        return tuple(round(c, 9) for c in p)

    def point_to_json(self, p):
        return list(p)

    def point_from_json(self, data):
        return tuple(float(c) for c in data)

    def describe(self) -> dict:
        return {"kind": self.kind, "dim": self.dim,
                "dd_constant": self.dd_constant, "tolerance": self.tol}


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------

class ProductSegment:
    """Geodesic of a product: the pair of factor geodesics traversed with
    constant factor speeds."""

    def __init__(self, space: "ProductSpace", a, b):
        self.space = space
        self.start = a
        self.end = b
        self._sl = space.left.geodesic(a[0], b[0])
        self._sr = space.right.geodesic(a[1], b[1])
        self.length = math.hypot(self._sl.length, self._sr.length)

    def point_at(self, s: float):
        if s < -1e-9 or s > self.length + 1e-9:
            raise InputError(f"parameter {s} outside [0, {self.length}]")
        if self.length == 0.0:
            return self.start
        t = min(max(s / self.length, 0.0), 1.0)
        return (self._sl.point_at(t * self._sl.length),
                self._sr.point_at(t * self._sr.length))

    def reversed(self) -> "ProductSegment":
        return ProductSegment(self.space, self.end, self.start)


class ProductSpace:
    """l^2 product of two model spaces; points are pairs."""

    kind = "product"

    def __init__(self, left, right, dd_constant: float = 1.0, tol: float = 1e-9):
        self.left = left
        self.right = right
        self.dd_constant = dd_constant
        self.tol = tol

    def validate_point(self, p):
        if not isinstance(p, tuple) or len(p) != 2:
            raise InputError(f"product point must be a pair: {p!r}")
        return (self.left.validate_point(p[0]), self.right.validate_point(p[1]))

    def basepoint(self):
        return (self.left.basepoint(), self.right.basepoint())

    def distance(self, x, y) -> float:
        return math.hypot(self.left.distance(x[0], y[0]),
                          self.right.distance(x[1], y[1]))

    def geodesic(self, a, b) -> ProductSegment:
        return ProductSegment(self, self.validate_point(a), self.validate_point(b))

    def project(self, x, seg: ProductSegment) -> ProjectionResult:
        # a product geodesic is not a pair of independently parametrized
        # factor geodesics, so minimize the combined convex function directly
        return _convex_project(self, x, seg)

    def segment_distance(self, s1, s2) -> float:
        return _convex_segment_distance(self, s1, s2)

    def ball_points(self, center, radius: float, samples: int = 64) -> list:
        center = self.validate_point(center)
        pts = [center]
        angles = [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2]
        per = max(3, samples // (2 * len(angles)))
        for ang in angles:
            rl = radius * math.cos(ang)
            rr = radius * math.sin(ang)
            lefts = (self.left.ball_points(center[0], rl, per)
                     if rl > 1e-12 else [center[0]])
            rights = (self.right.ball_points(center[1], rr, per)
                      if rr > 1e-12 else [center[1]])
            take = max(len(lefts), len(rights))
            for i in range(take):
                pts.append((lefts[i % len(lefts)], rights[i % len(rights)]))
        return pts

    def pairwise_distances(self, points) -> np.ndarray:
        dl = self.left.pairwise_distances([p[0] for p in points])
        dr = self.right.pairwise_distances([p[1] for p in points])
        return np.sqrt(dl * dl + dr * dr)

    def point_key(self, p):
        return (self.left.point_key(p[0]), self.right.point_key(p[1]))

    def point_to_json(self, p):
        return [self.left.point_to_json(p[0]), self.right.point_to_json(p[1])]

    def point_from_json(self, data):
        return (self.left.point_from_json(data[0]),
                self.right.point_from_json(data[1]))

    def describe(self) -> dict:
        return {"kind": self.kind, "left": self.left.describe(),
                "right": self.right.describe(),
                "dd_constant": self.dd_constant, "tolerance": self.tol}


# ---------------------------------------------------------------------------
# Shared numeric projection and the axiom checkers
# ---------------------------------------------------------------------------

def _convex_project(space, x, seg) -> ProjectionResult:
    """Bracketed minimization of the convex arclength-to-distance function."""
    x = space.validate_point(x)
    if seg.length == 0.0:
        return ProjectionResult(seg.start, space.distance(x, seg.start), 0.0)
    t = golden_section(lambda s: space.distance(x, seg.point_at(s)),
                       0.0, seg.length, tol=1e-9)
    point = seg.point_at(t)
    d = space.distance(x, point)
    if math.isnan(d):
        raise NumericError("projection produced NaN")
    return ProjectionResult(point, d, t)


def _convex_segment_distance(space, s1, s2) -> float:
    if s1.length == 0.0:
        return space.project(s1.start, s2).distance
    t = golden_section(lambda s: space.project(s1.point_at(s), s2).distance,
                       0.0, s1.length, tol=1e-7)
    return space.project(s1.point_at(t), s2).distance


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    data: dict


def check_dd(space, sampler, C: float, tolerance: float | None = None) -> list[AxiomViolation]:
    """Projections coarsely decrease distances: for sampled (segment, x, x')
    the projections p, p' must satisfy |p - p'| < |x - x'| + C (+ tolerance).
    Returns the violations, each carrying its witness triple."""
    eps = space.tol if tolerance is None else tolerance
    out = []
    for seg, x, x2 in sampler:
        p = space.project(x, seg)
        p2 = space.project(x2, seg)
        lhs = space.distance(p.point, p2.point)
        rhs = space.distance(x, x2) + C
        if lhs >= rhs + eps:
            out.append(AxiomViolation("dd", {
                "segment": [space.point_to_json(seg.start), space.point_to_json(seg.end)],
                "x": space.point_to_json(x), "x2": space.point_to_json(x2),
                "projection_gap": lhs, "allowed": rhs}))
    return out


def check_ft(space, sampler, C: float, tolerance: float | None = None,
             step: float = 0.5) -> list[AxiomViolation]:
    """Fellow traveling: for sampled (a, b, a', b') with endpoint displacement
    D, every sampled point of [a', b'] must lie within C + D (+ tolerance)
    of [a, b]."""
    eps = space.tol if tolerance is None else tolerance
    out = []
    for a, b, a2, b2 in sampler:
        D = max(space.distance(a, a2), space.distance(b, b2))
        base = space.geodesic(a, b)
        moved = space.geodesic(a2, b2)
        for s in _arclength_samples(moved.length, step):
            pt = moved.point_at(s)
            d = space.project(pt, base).distance
            if d >= C + D + eps:
                out.append(AxiomViolation("ft", {
                    "a": space.point_to_json(a), "b": space.point_to_json(b),
                    "a2": space.point_to_json(a2), "b2": space.point_to_json(b2),
                    "point": space.point_to_json(pt),
                    "deviation": d, "allowed": C + D}))
                break
    return out


def _arclength_samples(length: float, step: float) -> list[float]:
    if length == 0.0:
        return [0.0]
    n = max(1, int(math.ceil(length / step)))
    return [length * i / n for i in range(n + 1)]


def space_from_json(data: dict):
    kind = data.get("kind")
    if kind == "tree":
        return TreeSpace(rank=data.get("rank", 2),
                         dd_constant=data.get("dd_constant", 1.0),
                         tol=data.get("tolerance", 1e-9))
    if kind == "half-plane":
        return HalfPlaneSpace(dd_constant=data.get("dd_constant", 1.0),
                              tol=data.get("tolerance", 1e-9))
    if kind == "euclidean":
        return EuclideanSpace(dim=data.get("dim", 2),
                              dd_constant=data.get("dd_constant", 0.0),
                              tol=data.get("tolerance", 1e-9))
    if kind == "product":
        return ProductSpace(space_from_json(data["left"]),
                            space_from_json(data["right"]),
                            dd_constant=data.get("dd_constant", 1.0),
                            tol=data.get("tolerance", 1e-9))
    raise InputError(f"unknown space kind {kind!r}")
