"""Shortcut systems and the quasimorphisms they induce.

A system fixes an oriented contracting base segment sigma = [x0, w x0] of
length L and lets the whole group translate it.  A piecewise geodesic path
is admissible when no two consecutive pieces are plain geodesics; traversing
a translate of sigma (in its orientation only) costs L - 1 instead of L.
The modified length lambda(a, b) is the infimum of these costs, and

    phi(g) = lambda(g x0, x0) - lambda(x0, g x0)

is the induced potential on the group.  Enumerating every translate is
impossible, so lambda is computed over a budgeted, deterministic candidate
set: for tree models the candidate policy is exactly equivariant (translates
whose endpoints lie near the geodesic are enumerated directly), elsewhere a
group ball is filtered by a margin around the geodesic.

The candidate graph has the two query points and all candidate endpoints as
nodes, complete free edges weighted by distance, and one directed shortcut
edge per candidate weighted L - 1.  Its shortest path equals the infimum of
modified lengths of admissible paths through the candidate set: admissible
paths corner exactly at candidate endpoints, and any graph path merges into
an admissible path of the same or smaller modified length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sparse_dijkstra

from .actions import GroupModel, Isometry, act
from .contraction import CertBudget, ConstantLedger, certify_contracting
from .errors import BudgetError, ConfigError, InputError
from .spaces import TreePoint, _arclength_samples, tree_point
from .words import Word, IDENTITY, inverse as word_inverse, multiply as word_multiply
from . import words as W


@dataclass(frozen=True)
class Translate:
    """One oriented candidate expressway g.sigma."""
    g: Word
    start: Any
    end: Any


class ExpresswaySystem:
    """An oriented base segment, its group translates, and query budgets."""

    def __init__(self, space, group: GroupModel, sigma_word, basepoint=None,
                 ledger: ConstantLedger | None = None, margin: float = 2.0,
                 enum_radius: int = 5, candidate_cap: int = 20000):
        self.space = space
        self.group = group
        if isinstance(sigma_word, str):
            sigma_word = W.from_string(sigma_word)
        self.sigma_word = W.check_reduced(sigma_word)
        if not self.sigma_word:
            raise ConfigError("base word must be nontrivial")
        self.basepoint = space.validate_point(
            basepoint if basepoint is not None else space.basepoint())
        self.ledger = ledger or ConstantLedger(C=space.dd_constant or 1.0, B=1.0)
        self.margin = margin
        self.enum_radius = enum_radius
        self.candidate_cap = candidate_cap
        self._sigma_iso = group.from_word(self.sigma_word)
        self.sigma_end = act(space, self._sigma_iso, self.basepoint)
        self.sigma_segment = space.geodesic(self.basepoint, self.sigma_end)
        self.L = self.sigma_segment.length
        if self.L < 1.0:
            raise ConfigError(
                f"base segment length {self.L} < 1 gives negative shortcut weights")
        # the confinement theorem wants L above the ledger threshold; desk
        # scale configurations rarely satisfy it, so it is reported, not
        # enforced
        self.meets_length_hypothesis = self.L > self.ledger.D
        self.defect_bound: float | None = None
        self._translate_cache: dict = {}

    # -- structural helpers -------------------------------------------------
    def is_exact_tree(self) -> bool:
        return (self.space.kind == "tree" and self.group.kind == "free"
                and isinstance(self.basepoint, TreePoint)
                and self.basepoint.is_vertex)

    def sigma_edge_word(self) -> Word:
        """Letter sequence of sigma read from the basepoint (tree models)."""
        x0 = self.basepoint.anchor
        return word_multiply(word_inverse(x0),
                             word_multiply(self.sigma_word, x0))

    def certify_base(self, budget: CertBudget | None = None):
        return certify_contracting(self.space, self.sigma_segment,
                                   self.ledger.B, budget)

    def describe(self) -> dict:
        return {
            "sigma": W.to_string(self.sigma_word),
            "basepoint": self.space.point_to_json(self.basepoint),
            "length": self.L,
            "margin": self.margin,
            "enum_radius": self.enum_radius,
            "candidate_cap": self.candidate_cap,
            "meets_length_hypothesis": self.meets_length_hypothesis,
        }


# ---------------------------------------------------------------------------
# Candidate enumeration
# ---------------------------------------------------------------------------

def enumerate_relevant_expressways(sys: ExpresswaySystem, a, b) -> list[Translate]:
    """Deterministic list of translates whose endpoints both lie within the
    effective margin of [a, b].

    The sound margin is D + L (paths that help must stay D-confined, plus
    one segment length of slack); the configured margin caps it at desk
    scale.  Tree models enumerate the neighborhood of the geodesic directly,
    which makes the candidate set exactly equivariant; other models filter a
    group ball, so equivariance there is only approximate near the ball
    boundary.  Exceeding the candidate cap raises a budget error carrying
    the truncated list.
    """
    margin = min(sys.margin, sys.ledger.D + sys.L)
    seg = sys.space.geodesic(a, b)
    if sys.is_exact_tree():
        out = _tree_candidates(sys, seg, margin)
    else:
        out = _ball_candidates(sys, seg, margin)
    if len(out) > sys.candidate_cap:
        raise BudgetError(
            f"{len(out)} candidate translates exceed cap {sys.candidate_cap}",
            partial=out[:sys.candidate_cap])
    return out


def _tree_candidates(sys: ExpresswaySystem, seg, margin: float) -> list[Translate]:
    space = sys.space
    x0inv = word_inverse(sys.basepoint.anchor)
    chain = seg.chain if seg.chain else sum(
        (list(p.edge()) for p in (seg.start,)), [])
    radius = int(math.ceil(margin)) + 1
    shell = W.ball(space.rank, radius)
    sigma_edge = sys.sigma_edge_word()
    tol = getattr(space, "tol", 1e-9)
    seen: set = set()
    picked = []
    for v in chain:
        for u in shell:
            start_w = word_multiply(v, u)
            if start_w in seen:
                continue
            seen.add(start_w)
            start = tree_point(start_w)
            ps = space.project(start, seg)
            if ps.distance > margin + tol:
                continue
            end_w = word_multiply(start_w, sigma_edge)
            end = tree_point(end_w)
            if space.project(end, seg).distance > margin + tol:
                continue
            g = word_multiply(start_w, x0inv)
            picked.append((ps.parameter, start_w, Translate(g, start, end)))
    picked.sort(key=lambda item: (item[0], item[1]))
    return [t for _, _, t in picked]


def _ball_candidates(sys: ExpresswaySystem, seg, margin: float) -> list[Translate]:
    space = sys.space
    tol = getattr(space, "tol", 1e-9)
    out = []
    for iso in sys.group.ball(sys.enum_radius):
        cached = sys._translate_cache.get(iso.word)
        if cached is None:
            start = act(space, iso, sys.basepoint)
            end = act(space, sys.group.multiply(iso, sys._sigma_iso), sys.basepoint)
            cached = (start, end)
            sys._translate_cache[iso.word] = cached
        start, end = cached
        if space.project(start, seg).distance > margin + tol:
            continue
        if space.project(end, seg).distance > margin + tol:
            continue
        out.append(Translate(iso.word, start, end))
    return out


# ---------------------------------------------------------------------------
# Modified length
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathStep:
    point: Any
    edge: str | None          # None for the first node, else "free"/"expressway"
    translate: Word | None = None


@dataclass(frozen=True)
class ModifiedLengthResult:
    value: float
    expressways: int
    path: tuple
    candidates: int

    def to_json(self, space) -> dict:
        return {
            "kind": "lambda-witness",
            "value": self.value,
            "expressways": self.expressways,
            "candidates": self.candidates,
            "path": [{"point": space.point_to_json(s.point), "edge": s.edge,
                      "translate": None if s.translate is None else W.to_string(s.translate)}
                     for s in self.path],
        }


def modified_length(sys: ExpresswaySystem, a, b) -> ModifiedLengthResult:
    """Exact shortest path over the candidate graph for the query (a, b).

    The value never exceeds the plain distance (the direct free edge is in
    the graph) and equals the infimum of modified lengths of admissible
    paths through the enumerated candidate set.
    """
    space = sys.space
    a = space.validate_point(a)
    b = space.validate_point(b)
    if space.point_key(a) == space.point_key(b):
        return ModifiedLengthResult(0.0, 0, (PathStep(a, None),), 0)
    translates = enumerate_relevant_expressways(sys, a, b)

    points = [a, b]
    index = {space.point_key(a): 0, space.point_key(b): 1}

    def node_of(p):
        key = space.point_key(p)
        if key not in index:
            index[key] = len(points)
            points.append(p)
        return index[key]

    shortcut: dict[tuple[int, int], Word] = {}
    for t in translates:
        i, j = node_of(t.start), node_of(t.end)
        if i != j:
            shortcut.setdefault((i, j), t.g)

    weights = np.asarray(sys.space.pairwise_distances(points), dtype=np.float64)
    cost = sys.L - 1.0
    for (i, j) in shortcut:
        if cost < weights[i, j]:
            weights[i, j] = cost
    np.fill_diagonal(weights, 0.0)

    dist, pred = _sparse_dijkstra(csr_matrix(weights), directed=True,
                                  indices=0, return_predecessors=True)
    value = float(dist[1])
    node_path = [1]
    while node_path[-1] != 0:
        node_path.append(int(pred[node_path[-1]]))
    node_path.reverse()

    steps = [PathStep(points[node_path[0]], None)]
    n_exp = 0
    for u, v in zip(node_path, node_path[1:]):
        g = shortcut.get((u, v))
        if g is not None and abs(weights[u, v] - cost) <= 1e-12:
            steps.append(PathStep(points[v], "expressway", g))
            n_exp += 1
        else:
            steps.append(PathStep(points[v], "free"))
    return ModifiedLengthResult(value, n_exp, tuple(steps), len(translates))


def phi_sigma(sys: ExpresswaySystem, g) -> float:
    """lambda(g x0, x0) - lambda(x0, g x0)."""
    iso = g if isinstance(g, Isometry) else sys.group.from_word(g)
    gx0 = act(sys.space, iso, sys.basepoint)
    return (modified_length(sys, gx0, sys.basepoint).value
            - modified_length(sys, sys.basepoint, gx0).value)


# ---------------------------------------------------------------------------
# Exact tree evaluation
# ---------------------------------------------------------------------------
#
# In a tree only translates lying forward along the geodesic can lower the
# modified length: a shortcut hanging off the geodesic at combined endpoint
# depth k costs 2k extra travel against its saving of 1.  Disjoint forward
# occurrences each save exactly 1 and overlapping ones pay their overlap
# back, so
#
#     lambda(a, b) = d(a, b) - (max disjoint forward occurrences of the
#                                base letter sequence in the geodesic word)
#
# and the greedy left-to-right count (str.count) realizes the maximum for
# fixed-length patterns.  The test suite cross-validates this against the
# candidate graph and an exhaustive regional shortest-path oracle.

def tree_lambda_exact(sys: ExpresswaySystem, u: Word, v: Word) -> float:
    """Exact modified length between tree vertices u.x0 and v.x0 expressed
    through group elements; u = identity queries from the basepoint."""
    if not sys.is_exact_tree():
        raise InputError("exact evaluation needs a free group on its tree")
    x0 = sys.basepoint.anchor
    a = word_multiply(u, x0)
    b = word_multiply(v, x0)
    geo = W.to_string(word_multiply(word_inverse(a), b))
    pattern = W.to_string(sys.sigma_edge_word())
    return float(len(geo) - geo.count(pattern))


def tree_phi_exact(sys: ExpresswaySystem, g: Word) -> float:
    """Exact phi on tree models: forward minus backward greedy-disjoint
    occurrence counts of the base letter sequence in the geodesic word."""
    if not sys.is_exact_tree():
        raise InputError("exact evaluation needs a free group on its tree")
    x0 = sys.basepoint.anchor
    u = word_multiply(word_inverse(x0), word_multiply(g, x0))
    s = W.to_string(u)
    pattern = W.to_string(sys.sigma_edge_word())
    anti = W.to_string(word_inverse(sys.sigma_edge_word()))
    return float(s.count(pattern) - s.count(anti))


def phi_evaluator(sys: ExpresswaySystem, exact: bool | None = None
                  ) -> Callable[[Word], float]:
    """Word-level evaluator for phi; exact closed form on tree models,
    candidate-graph shortest paths elsewhere."""
    use_exact = sys.is_exact_tree() if exact is None else exact
    if use_exact:
        return lambda w: tree_phi_exact(sys, w)
    return lambda w: phi_sigma(sys, w)


# ---------------------------------------------------------------------------
# Property suites and derived quantities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaSamples:
    pairs: tuple = ()                # (a, b)
    endpoint_moves: tuple = ()       # (a, b, a2, b2)
    group_elements: tuple = ()       # words applied to the pairs
    collinear_triples: tuple = ()    # (a, b, c) with b on [a, c]


def check_lambda_properties(sys: ExpresswaySystem, samples: LambdaSamples,
                            tolerance: float | None = None) -> list[dict]:
    """All five interface properties of the modified length on samples:
    bounded by distance, 2-Lipschitz in the endpoints, translation
    invariant, equal to distance when no candidate fits, and coarsely
    additive along geodesics (slack 2 D + 1)."""
    space = sys.space
    eps = (getattr(space, "tol", 1e-9) if tolerance is None else tolerance)
    violations = []

    def note(kind, data):
        violations.append({"property": kind, **data})

    lam = lambda x, y: modified_length(sys, x, y).value

    for a, b in samples.pairs:
        value = lam(a, b)
        d = space.distance(a, b)
        if value > d + eps:
            note("upper_bound", {"lambda": value, "distance": d})
        if not enumerate_relevant_expressways(sys, a, b):
            if abs(value - d) > eps:
                note("distance_when_empty", {"lambda": value, "distance": d})

    for a, b, a2, b2 in samples.endpoint_moves:
        lhs = abs(lam(a, b) - lam(a2, b2))
        rhs = space.distance(a, a2) + space.distance(b, b2)
        if lhs > rhs + eps:
            note("lipschitz", {"gap": lhs, "allowed": rhs})

    for g in samples.group_elements:
        iso = sys.group.from_word(g)
        for a, b in samples.pairs:
            ga, gb = act(space, iso, a), act(space, iso, b)
            v1, v2 = lam(a, b), lam(ga, gb)
            if abs(v1 - v2) > eps:
                note("invariance", {"g": W.to_string(g), "lambda": v1,
                                    "translated": v2})

    slack = 2.0 * sys.ledger.D + 1.0
    for a, b, c in samples.collinear_triples:
        lac = lam(a, c)
        split = lam(a, b) + lam(b, c)
        if lac > split + eps:
            note("subadditive", {"lambda_ac": lac, "split": split})
        if lac <= split - slack - eps:
            note("coarse_additive", {"lambda_ac": lac, "split": split,
                                     "slack": slack})
    return violations


@dataclass(frozen=True)
class DefectReport:
    value: float
    pair: tuple | None
    pairs_checked: int


def defect_estimate(sys: ExpresswaySystem, pairs: Iterable[tuple[Word, Word]],
                    evaluator: Callable[[Word], float] | None = None) -> DefectReport:
    """max |phi(g g') - phi(g) - phi(g')| over the sampled pairs; a lower
    bound for the true defect that never decreases as the sample grows."""
    phi = evaluator or phi_evaluator(sys)
    cache: dict[Word, float] = {}

    def ev(w: Word) -> float:
        if w not in cache:
            cache[w] = phi(w)
        return cache[w]

    best = 0.0
    arg = None
    count = 0
    for g, h in pairs:
        count += 1
        d = abs(ev(word_multiply(g, h)) - ev(g) - ev(h))
        if d > best:
            best, arg = d, (g, h)
    sys.defect_bound = max(sys.defect_bound or 0.0, best)
    return DefectReport(best, arg, count)


def homogenize(sys: ExpresswaySystem, g, n_max: int,
               defect_bound: float | None = None,
               evaluator: Callable[[Word], float] | None = None
               ) -> tuple[float, float | None]:
    """phi(g^n)/n together with the error radius defect/n around the
    homogeneous representative."""
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    if isinstance(g, Isometry):
        g = g.word
    elif isinstance(g, str):
        g = W.from_string(g)
    phi = evaluator or phi_evaluator(sys)
    value = phi(W.power(g, n_max)) / n_max
    bound = defect_bound if defect_bound is not None else sys.defect_bound
    return value, (None if bound is None else bound / n_max)


def independence_matrix(systems: list[ExpresswaySystem], testers: list,
                        n_max: int = 16, pivot_tol: float = 1e-6
                        ) -> tuple[np.ndarray, int]:
    """Homogenized evaluation matrix M[i][j] = phi_i(tester_j) and its rank
    at the pivot tolerance."""
    if len(testers) < len(systems):
        raise InputError("need at least as many testers as systems")
    testers = [W.from_string(t) if isinstance(t, str) else
               (t.word if isinstance(t, Isometry) else t) for t in testers]
    M = np.array([[homogenize(s, t, n_max)[0] for t in testers]
                  for s in systems])
    rank = int(np.linalg.matrix_rank(M, tol=pivot_tol))
    return M, rank


def check_witness_confinement(sys: ExpresswaySystem, result: ModifiedLengthResult,
                              a, b, step: float = 0.5) -> tuple[bool, float]:
    """Every point of the witness path must stay inside the ledger's
    confinement neighborhood of [a, b]; returns (ok, max deviation)."""
    space = sys.space
    seg = space.geodesic(a, b)
    bound = sys.ledger.D
    worst = 0.0
    prev = None
    for stepdata in result.path:
        if prev is not None:
            piece = space.geodesic(prev, stepdata.point)
            for s in _arclength_samples(piece.length, step):
                dev = space.project(piece.point_at(s), seg).distance
                worst = max(worst, dev)
        prev = stepdata.point
    return worst <= bound + getattr(space, "tol", 1e-9), worst
