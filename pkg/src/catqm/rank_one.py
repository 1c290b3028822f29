"""Rank-1 behavior of isometries: orbit/geodesic comparison, independence
profiles, chains of contracting segments, and ping-pong exponents.

An isometry behaves rank-1 at scale B (up to budget) when, for every tested
power n, some geodesic from the basepoint to the n-th orbit point is
B-Hausdorff equivalent to the orbit prefix and contracting at scale B.
Flat directions refute this: a Euclidean translation axis admits balls whose
projections are as wide as desired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .actions import GroupModel, Isometry, act, orbit_points
from .contraction import (
    CertBudget,
    ConstantLedger,
    ContractionCertificate,
    certify_contracting,
)
from .errors import BudgetError, InputError
from .spaces import _arclength_samples
from . import words as W


@dataclass(frozen=True)
class PowerEvidence:
    n: int
    orbit_to_geodesic: float     # max over orbit points of d(x_k, [x0, x_n])
    geodesic_to_orbit: float     # max over samples of d(point, orbit set)
    certificate: ContractionCertificate


@dataclass(frozen=True)
class RankOneCertificate:
    word: W.Word
    B: float
    n_max: int
    growth_floor: float          # eps with |x0 - x_n| >= n * eps for tested n
    evidence: tuple

    @property
    def certified(self) -> bool:
        return True


@dataclass(frozen=True)
class RankOneRefutation:
    word: W.Word
    B: float
    n: int
    reason: str                  # "hausdorff" or "contraction"
    witness: dict

    @property
    def certified(self) -> bool:
        return False


def rank_one_test(space, group: GroupModel, g, x0, B: float, n_max: int,
                  budget: CertBudget | None = None):
    """Budgeted rank-1 check for every power up to n_max.

    Geodesics are sampled at step B/2: since distance functions are
    1-Lipschitz, a true Hausdorff violation beyond B cannot hide between
    samples that close.
    """
    iso = g if isinstance(g, Isometry) else group.from_word(g)
    if not iso.word:
        raise InputError("isometry must be nontrivial")
    x0 = space.validate_point(x0)
    tol = getattr(space, "tol", 1e-9)
    orbit = orbit_points(space, iso, x0, n_max)
    evidence = []
    floor = math.inf
    for n in range(1, n_max + 1):
        seg = space.geodesic(x0, orbit[n])
        worst_orbit = 0.0
        for k in range(n + 1):
            d = space.project(orbit[k], seg).distance
            worst_orbit = max(worst_orbit, d)
            if d > B + tol:
                return RankOneRefutation(iso.word, B, n, "hausdorff", {
                    "orbit_index": k,
                    "deviation": d,
                    "point": space.point_to_json(orbit[k])})
        worst_geo = 0.0
        for s in _arclength_samples(seg.length, B / 2.0):
            pt = seg.point_at(s)
            d = min(space.distance(pt, q) for q in orbit[:n + 1])
            worst_geo = max(worst_geo, d)
            if d > B + tol:
                return RankOneRefutation(iso.word, B, n, "hausdorff", {
                    "parameter": s,
                    "deviation": d,
                    "point": space.point_to_json(pt)})
        cert = certify_contracting(space, seg, B, budget)
        if cert.refuted:
            return RankOneRefutation(iso.word, B, n, "contraction", cert.to_json(space))
        evidence.append(PowerEvidence(n, worst_orbit, worst_geo, cert))
        floor = min(floor, space.distance(x0, orbit[n]) / n)
    if floor <= tol:
        return RankOneRefutation(iso.word, B, n_max, "growth", {"floor": floor})
    return RankOneCertificate(iso.word, B, n_max, floor, tuple(evidence))


@dataclass(frozen=True)
class IndependenceProfile:
    values: tuple                 # values[R] = min distance at grid radius R
    grid_max: int
    threshold: float
    tail_increasing: bool
    passed: bool


def independence_test(space, group: GroupModel, g, h, x0, grid_max: int,
                      threshold: float) -> IndependenceProfile:
    """Properness profile of (m, n) -> |g^m x0 - h^n x0|.

    values[R] minimizes over max(|m|, |n|) = R.  Evidence of independence is
    a strictly increasing tail that clears the threshold by grid_max; the
    profile never claims properness beyond the grid.
    """
    gi = g if isinstance(g, Isometry) else group.from_word(g)
    hi = h if isinstance(h, Isometry) else group.from_word(h)
    xs = {m: x0 for m in (0,)}
    ys = {0: x0}
    fwd, bwd = gi, group.inverse(gi)
    cur_f = cur_b = x0
    for m in range(1, grid_max + 1):
        cur_f = act(space, fwd, cur_f)
        cur_b = act(space, bwd, cur_b)
        xs[m], xs[-m] = cur_f, cur_b
    fwd, bwd = hi, group.inverse(hi)
    cur_f = cur_b = x0
    for n in range(1, grid_max + 1):
        cur_f = act(space, fwd, cur_f)
        cur_b = act(space, bwd, cur_b)
        ys[n], ys[-n] = cur_f, cur_b
    values = [0.0]
    for R in range(1, grid_max + 1):
        best = math.inf
        for m in range(-R, R + 1):
            for n in range(-R, R + 1):
                if max(abs(m), abs(n)) == R:
                    best = min(best, space.distance(xs[m], ys[n]))
        values.append(best)
    tail = all(values[i] < values[i + 1] for i in range(max(1, grid_max // 2), grid_max))
    passed = tail and values[-1] > threshold
    return IndependenceProfile(tuple(values), grid_max, threshold, tail, passed)


@dataclass(frozen=True)
class ChainOutcome:
    skipped: bool
    reason: str | None
    neighborhood_bound: float | None
    certificate: ContractionCertificate | None


def chain_check(space, points: list, B: float, ledger: ConstantLedger,
                budget: CertBudget | None = None, step: float = 0.5) -> ChainOutcome:
    """Chains of contracting segments with large gaps between next-nearest
    pieces produce a contracting geodesic that shadows the chain.

    Each consecutive segment must certify at scale B and the gap hypothesis
    d([x_i, x_i+1], [x_i+2, x_i+3]) > chain constant must hold; otherwise
    the configuration is skipped, not counted as a violation.
    """
    if len(points) < 2:
        raise InputError("need at least two chain points")
    segs = [space.geodesic(points[i], points[i + 1]) for i in range(len(points) - 1)]
    for seg in segs:
        if certify_contracting(space, seg, B, budget).refuted:
            return ChainOutcome(True, "piece fails contraction", None, None)
    bound = ledger.chain()
    for i in range(len(segs) - 2):
        if space.segment_distance(segs[i], segs[i + 2]) <= bound:
            return ChainOutcome(True, "gap hypothesis unmet", None, None)
    whole = space.geodesic(points[0], points[-1])
    worst = 0.0
    for s in _arclength_samples(whole.length, step):
        pt = whole.point_at(s)
        d = min(space.project(pt, seg).distance for seg in segs)
        worst = max(worst, d)
    cert = certify_contracting(space, whole, bound, budget)
    return ChainOutcome(False, None, worst, cert)


@dataclass(frozen=True)
class SchottkyResult:
    N: int
    E: float
    word_len_max: int
    displacements: dict          # word string -> (length, displacement)


def schottky_exponent(space, group: GroupModel, g, h, E: float,
                      word_len_max: int, x0, n_cap: int = 16) -> SchottkyResult:
    """Smallest even N <= n_cap so that every nontrivial reduced word in
    g^N, h^N of length <= word_len_max displaces the basepoint by at least
    its length times E.  Exhausting the cap raises a budget error carrying
    the displacement tables per tried N."""
    if E <= 0:
        raise InputError("E must be > 0")
    gi = g if isinstance(g, Isometry) else group.from_word(g)
    hi = h if isinstance(h, Isometry) else group.from_word(h)
    tol = getattr(space, "tol", 1e-9)
    patterns = [w for w in W.ball(2, word_len_max) if w]
    tried = {}
    for N in range(2, n_cap + 1, 2):
        table = {}
        ok = True
        gN, hN = group.power(gi, N), group.power(hi, N)
        basis = {1: gN, -1: group.inverse(gN), 2: hN, -2: group.inverse(hN)}
        for pattern in patterns:
            iso = group.identity()
            for letter in pattern:
                iso = group.multiply(iso, basis[letter])
            disp = space.distance(x0, act(space, iso, x0))
            table[W.to_string(pattern)] = (len(pattern), disp)
            if disp < len(pattern) * E - tol:
                ok = False
        tried[N] = table
        if ok:
            return SchottkyResult(N, E, word_len_max, table)
    raise BudgetError(f"no even N <= {n_cap} satisfies the displacement bound",
                      partial=tried)


@dataclass(frozen=True)
class HalfFlatRefutation:
    B: float
    refuted: bool
    witness: dict | None


def half_flat_control(space, seg, B_sweep, budget: CertBudget | None = None
                      ) -> list[HalfFlatRefutation]:
    """Negative control: along a flat axis each scale in the sweep must be
    refuted with a replayable witness ball."""
    out = []
    for B in B_sweep:
        probe = CertBudget(
            center_radius=(budget.center_radius if budget else 5.0),
            center_count=(budget.center_count if budget else 24),
            ball_samples=(budget.ball_samples if budget else 64),
            probe_heights=(B / 2.0 + 2.0, B + 2.0),
        )
        cert = certify_contracting(space, seg, B, probe)
        out.append(HalfFlatRefutation(
            B, cert.refuted,
            None if cert.witness is None else cert.to_json(space)["witness"]))
    return out
