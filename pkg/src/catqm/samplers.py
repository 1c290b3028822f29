"""Deterministic configuration generators for the axiom and lemma suites.

All randomness flows from a single integer seed through hashed child seeds,
so every suite is reproducible and every violation can be regenerated.
Tree suites are exhaustive where the configuration family is finite; the
exhaustive families fix the first point at the identity vertex, which loses
nothing because every check is invariant under the group action.
"""

from __future__ import annotations

import hashlib
import math
import random
from typing import Iterator

from .spaces import TreePoint, tree_point, vertex
from .words import Word, IDENTITY, multiply as word_multiply
from . import words as W


def child_seed(seed: int, purpose: str) -> int:
    digest = hashlib.sha256(f"{seed}/{purpose}".encode()).hexdigest()
    return int(digest[:16], 16)


def rng_for(seed: int, purpose: str) -> random.Random:
    return random.Random(child_seed(seed, purpose))


# ---------------------------------------------------------------------------
# Random points per space kind
# ---------------------------------------------------------------------------

def random_point(space, rng: random.Random):
    kind = space.kind
    if kind == "tree":
        length = rng.randrange(0, 6)
        letters = []
        while len(letters) < length:
            x = rng.choice([k for k in range(1, space.rank + 1)]
                           + [-k for k in range(1, space.rank + 1)])
            if letters and letters[-1] == -x:
                continue
            letters.append(x)
        return tree_point(tuple(letters))
    if kind == "half-plane":
        return complex(rng.uniform(-3.0, 3.0), math.exp(rng.uniform(-1.5, 1.5)))
    if kind == "euclidean":
        return tuple(rng.uniform(-10.0, 10.0) for _ in range(space.dim))
    if kind == "product":
        return (random_point(space.left, rng), random_point(space.right, rng))
    raise ValueError(kind)


def perturbed_point(space, rng: random.Random, p, radius: float):
    pts = space.ball_points(p, radius, 16)
    return pts[rng.randrange(len(pts))]


# ---------------------------------------------------------------------------
# Axiom (projection / fellow traveling) samplers
# ---------------------------------------------------------------------------

def dd_triples_random(space, seed: int, count: int) -> Iterator:
    rng = rng_for(seed, "dd")
    made = 0
    while made < count:
        a, b = random_point(space, rng), random_point(space, rng)
        if space.distance(a, b) < 0.25:
            continue
        seg = space.geodesic(a, b)
        yield seg, random_point(space, rng), random_point(space, rng)
        made += 1


def dd_triples_tree_exhaustive(space, seg_radius: int, point_radius: int) -> Iterator:
    """Every (segment from the identity, x, x') configuration; the identity
    anchoring is the invariance reduction."""
    e = vertex("")
    pts = [tree_point(w) for w in W.ball(space.rank, point_radius)]
    for v in W.ball(space.rank, seg_radius):
        seg = space.geodesic(e, tree_point(v))
        for x in pts:
            for x2 in pts:
                yield seg, x, x2


def ft_quads_random(space, seed: int, count: int, D: float = 1.0) -> Iterator:
    rng = rng_for(seed, "ft")
    made = 0
    while made < count:
        a, b = random_point(space, rng), random_point(space, rng)
        if space.distance(a, b) < 0.25:
            continue
        a2 = perturbed_point(space, rng, a, D * rng.uniform(0.2, 1.0))
        b2 = perturbed_point(space, rng, b, D * rng.uniform(0.2, 1.0))
        yield a, b, a2, b2
        made += 1


def ft_quads_tree_exhaustive(space, seg_radius: int, D: int = 1) -> Iterator:
    e = vertex("")
    moves = [tree_point(w) for w in W.ball(space.rank, D)]
    for v in W.ball(space.rank, seg_radius):
        b = tree_point(v)
        for a2 in moves:
            for u in W.ball(space.rank, D):
                b2 = tree_point(word_multiply(v, u))
                yield e, b, a2, b2


# ---------------------------------------------------------------------------
# Lemma-suite configuration families
# ---------------------------------------------------------------------------

def tree_triples_exhaustive(space, radius: int) -> Iterator[tuple]:
    """(a, b, c) families for the triangle lemmas, a fixed at the identity."""
    e = vertex("")
    ws = W.ball(space.rank, radius)
    for bw in ws:
        if not bw:
            continue
        b = tree_point(bw)
        for cw in ws:
            yield e, b, tree_point(cw)


def tree_dichotomy_configs(space, radius: int) -> Iterator[tuple]:
    """(segment [e, v], x, y) with x shadowed behind e and y behind v, the
    projection-to-endpoint hypotheses baked into the enumeration."""
    for vw in W.ball(space.rank, radius):
        if not vw:
            continue
        v = tree_point(vw)
        seg = space.geodesic(vertex(""), v)
        behind_e = [tree_point(x) for x in W.ball(space.rank, radius)
                    if not x or x[0] != vw[0]]
        tails = [t for t in W.ball(space.rank, radius - len(vw))
                 if not t or t[0] != -vw[-1]]
        behind_v = [tree_point(word_multiply(vw, t)) for t in tails]
        for x in behind_e:
            for y in behind_v:
                yield seg, x, y


def tree_variation_configs(space, radius: int) -> Iterator[tuple]:
    """(contracting segment, far segment) pairs; hypothesis filtering stays
    in the checker so skipped configurations are visible."""
    ws = W.ball(space.rank, radius)
    e = vertex("")
    for bw in ws:
        if len(bw) < 2:
            continue
        seg_ab = space.geodesic(e, tree_point(bw))
        for pw in ws:
            if not pw or pw[0] == bw[0]:
                continue
            for qw in ws:
                if len(qw) <= len(pw) or qw[:len(pw)] != pw:
                    continue
                yield seg_ab, space.geodesic(tree_point(pw), tree_point(qw))


def halfplane_thin_configs(space, seed: int, count: int) -> Iterator[tuple]:
    """(a, b, c) with b the projection of c onto a random geodesic through
    a, built so the hypothesis holds by construction."""
    rng = rng_for(seed, "thin")
    made = 0
    while made < count:
        a = random_point(space, rng)
        b0 = random_point(space, rng)
        c = random_point(space, rng)
        if space.distance(a, b0) < 0.5:
            continue
        seg = space.geodesic(a, b0)
        proj = space.project(c, seg)
        if proj.parameter < 0.25 or proj.distance < 0.25:
            continue
        yield a, proj.point, c
        made += 1


def halfplane_variation_configs(space, seed: int, count: int) -> Iterator[tuple]:
    """Segments receding from a base geodesic: [a, b] runs along the
    geodesic from the projection foot through a random outside point."""
    rng = rng_for(seed, "variation")
    made = 0
    while made < count:
        p, q = random_point(space, rng), random_point(space, rng)
        if space.distance(p, q) < 1.0:
            continue
        seg_pq = space.geodesic(p, q)
        m = random_point(space, rng)
        pr = space.project(m, seg_pq)
        if pr.distance < 1.5:
            continue
        ray = space.geodesic(pr.point, m)
        t1 = rng.uniform(1.0, max(1.0, ray.length - 0.5))
        t2 = rng.uniform(t1, ray.length)
        if t2 - t1 < 0.25:
            continue
        yield space.geodesic(ray.point_at(t1), ray.point_at(t2)), seg_pq
        made += 1


def defect_pairs_exhaustive(rank: int, radius: int) -> Iterator[tuple[Word, Word]]:
    ws = W.ball(rank, radius)
    for g in ws:
        for h in ws:
            yield g, h


def random_words(rank: int, seed: int, count: int, max_len: int) -> list[Word]:
    rng = rng_for(seed, "words")
    out = []
    while len(out) < count:
        length = rng.randrange(1, max_len + 1)
        letters: list[int] = []
        while len(letters) < length:
            x = rng.choice([k for k in range(1, rank + 1)]
                           + [-k for k in range(1, rank + 1)])
            if letters and letters[-1] == -x:
                continue
            letters.append(x)
        w = tuple(letters)
        if w not in out:
            out.append(w)
    return out
