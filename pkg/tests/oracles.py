"""Independent oracles for the test suite.

These deliberately avoid the package's candidate-graph machinery: the
modified-length oracle runs plain Dijkstra over actual tree vertices with
unit tree edges plus one directed shortcut edge per translate inside the
search region, and the projection oracle is brute-force minimization over
enumerated candidates.
"""

from __future__ import annotations

import heapq
import math

from catqm import words as W
from catqm.words import multiply, inverse, word_distance


def tree_vertex_path(a: tuple, b: tuple) -> list[tuple]:
    k = W.common_prefix_length(a, b)
    down = [a[:i] for i in range(len(a), k, -1)]
    up = [b[:i] for i in range(k, len(b) + 1)]
    return down + up


def tree_lambda_oracle(sigma: tuple, a: tuple, b: tuple, rank: int = 2,
                       slack: int = 1) -> tuple[float, int]:
    """Exhaustive shortest modified length between tree vertices.

    Region soundness: a path through a point at distance delta from the
    geodesic has total length at least d + 2 delta (tree identity), and a
    path using e full shortcuts of length L has modified length at least
    max(e (L - 1), d + 2 delta - e).  Equating shows any path leaving the
    radius d / (2 (L - 1)) neighborhood already costs at least d, which the
    plain geodesic achieves, so searching inside that radius plus slack is
    exact.

    Returns (modified length, number of shortcuts used by one optimum).
    """
    L = len(sigma)
    if L < 2:
        raise ValueError("oracle needs shortcut length >= 2")
    d = word_distance(a, b)
    if d == 0:
        return 0.0, 0
    radius = int(math.floor(d / (2.0 * (L - 1)))) + slack
    region = set()
    for v in tree_vertex_path(a, b):
        for u in W.ball(rank, radius, cap=max(radius, 12)):
            region.add(multiply(v, u))

    letters = [x for k in range(1, rank + 1) for x in (k, -k)]
    shortcut_cost = float(L - 1)

    def neighbors(v):
        for x in letters:
            w = multiply(v, (x,))
            if w in region:
                yield w, 1.0, 0
        end = multiply(v, sigma)
        if end in region:
            yield end, shortcut_cost, 1

    dist = {a: (0.0, 0)}
    heap = [(0.0, 0, a)]
    while heap:
        cost, used, v = heapq.heappop(heap)
        if v == b:
            return cost, used
        if dist.get(v, (math.inf, 0))[0] < cost:
            continue
        for w, step, is_shortcut in neighbors(v):
            cand = cost + step
            if cand < dist.get(w, (math.inf, 0))[0]:
                dist[w] = (cand, used + is_shortcut)
                heapq.heappush(heap, (cand, used + is_shortcut, w))
    raise RuntimeError("target not reached inside the region")


def tree_phi_oracle(sigma: tuple, g: tuple, rank: int = 2) -> float:
    back, _ = tree_lambda_oracle(sigma, g, W.IDENTITY, rank)
    fwd, _ = tree_lambda_oracle(sigma, W.IDENTITY, g, rank)
    return back - fwd


def bfs_projection_oracle(space, x, seg, step: float = 0.5):
    """Brute-force nearest point of a segment by dense parameter scan."""
    best = (math.inf, None, None)
    n = max(1, int(math.ceil(seg.length / step)))
    for i in range(n + 1):
        s = seg.length * i / n
        p = seg.point_at(s)
        d = space.distance(x, p)
        if d < best[0]:
            best = (d, p, s)
    return best


def count_occurrences_overlapping(pattern: str, text: str) -> int:
    return sum(1 for i in range(len(text)) if text.startswith(pattern, i))
