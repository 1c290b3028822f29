"""Quasimorphisms as values: subword-counting evaluators on free groups,
their exact homogenizations, and the restriction / group-action / transfer /
orbit-averaging operations on a concrete finite extension.

The shipped extension instance is the rank-2 free group extended by the
order-2 letter swap a <-> b, the smallest case where every operation has
content.  Conjugation by the section element restricts to the letter-swap
automorphism on the base, which makes the extension's hypotheses hold by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import InputError
from .words import (
    Word,
    IDENTITY,
    check_reduced,
    cyclic_reduce,
    inverse as word_inverse,
    multiply as word_multiply,
    power as word_power,
)
from . import words as W


@dataclass(frozen=True)
class Quasimorphism:
    """An evaluator with provenance: name, optional claimed defect bound,
    and whether it claims homogeneity (evaluator(e) = 0 and
    phi(g^n) = n phi(g))."""
    name: str
    evaluator: Callable
    claimed_defect: float | None = None
    homogeneous: bool = False

    def __call__(self, g):
        return self.evaluator(g)


def count_overlapping(text: str, pattern: str) -> int:
    """Occurrences of pattern in text, overlaps allowed."""
    if not pattern:
        raise InputError("empty pattern")
    count = 0
    i = text.find(pattern)
    while i != -1:
        count += 1
        i = text.find(pattern, i + 1)
    return count


def brooks(w, g) -> int:
    """Occurrences of w in the reduced word g minus occurrences of w^-1,
    overlaps allowed."""
    w = _as_word(w)
    g = _as_word(g)
    if not w:
        raise InputError("counting word must be nontrivial")
    s = W.to_string(g)
    return (count_overlapping(s, W.to_string(w))
            - count_overlapping(s, W.to_string(word_inverse(w))))


def brooks_qm(w) -> Quasimorphism:
    w = _as_word(w)
    return Quasimorphism(f"brooks({W.to_string(w)})", lambda g: float(brooks(w, g)))


def homogeneous_brooks_value(w: Word, g: Word) -> float:
    """Exact homogenization of the counting quasimorphism.

    Powers of g eventually repeat the cyclic core, so the per-power limit of
    the count is the number of occurrence start positions inside one period
    of the bi-infinite periodic word.  Conjugation invariance is automatic:
    the value depends only on the core up to rotation.
    """
    w = _as_word(w)
    if not w:
        raise InputError("counting word must be nontrivial")
    core, _ = cyclic_reduce(_as_word(g))
    if not core:
        return 0.0
    reps = max(2, math.ceil((len(core) + len(w)) / len(core)))
    window = W.to_string(core) * reps
    period = len(core)

    def starts_inside_period(pattern: str) -> int:
        count = 0
        i = window.find(pattern)
        while 0 <= i < period:
            count += 1
            i = window.find(pattern, i + 1)
        return count

    return float(starts_inside_period(W.to_string(w))
                 - starts_inside_period(W.to_string(word_inverse(w))))


def homogeneous_brooks_qm(w) -> Quasimorphism:
    w = _as_word(w)
    return Quasimorphism(f"hom-brooks({W.to_string(w)})",
                         lambda g: homogeneous_brooks_value(w, g),
                         homogeneous=True)


def homogenize_qm(phi: Quasimorphism, n_max: int = 64) -> Quasimorphism:
    """Numeric homogenization by power averaging: g -> phi(g^n)/n.  The
    value sits within defect/n_max of the homogeneous representative."""
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    return Quasimorphism(f"{phi.name}/pow{n_max}",
                         lambda g: phi(word_power(_as_word(g), n_max)) / n_max,
                         homogeneous=True)


def word_length_qm() -> Quasimorphism:
    """Word length; a quasimorphism but not homogeneous (conjugation-heavy
    words break it), useful as a negative control."""
    return Quasimorphism("word-length", lambda g: float(len(_as_word(g))))


def _as_word(g) -> Word:
    if isinstance(g, str):
        return W.from_string(g)
    return check_reduced(g)


# ---------------------------------------------------------------------------
# Finite extensions of free groups by letter permutations
# ---------------------------------------------------------------------------

Perm = tuple  # perm[i] = image of generator i+1, 1-based values


def _perm_compose(p: Perm, q: Perm) -> Perm:
    return tuple(p[q[i] - 1] for i in range(len(p)))


def _perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v - 1] = i + 1
    return tuple(out)


def _perm_apply(p: Perm, w: Word) -> Word:
    return tuple((p[x - 1] if x > 0 else -p[-x - 1]) for x in w)


@dataclass(frozen=True)
class GElement:
    """Element of the extension: a base word and a permutation index."""
    word: Word
    sigma: int

    def is_base(self) -> bool:
        return self.sigma == 0


class FiniteExtension:
    """Free group of the given rank extended by a finite group of letter
    permutations, with the tautological section."""

    def __init__(self, rank: int, perms: list[Perm]):
        if not perms or tuple(range(1, rank + 1)) != tuple(perms[0]):
            raise InputError("perms[0] must be the identity permutation")
        self.rank = rank
        self.perms = [tuple(p) for p in perms]
        self.N = len(perms)
        index = {p: i for i, p in enumerate(self.perms)}
        if len(index) != self.N:
            raise InputError("duplicate permutations")
        self._mul = [[index[_perm_compose(p, q)] for q in self.perms]
                     for p in self.perms]
        self._inv = [index[_perm_inverse(p)] for p in self.perms]
        # closure check doubles as the section/automorphism invariant:
        # conjugation by a section element is exactly the letter permutation
        for p in self.perms:
            if _perm_compose(p, _perm_inverse(p)) != self.perms[0]:
                raise InputError("permutation inverse failed")

    # -- group operations ---------------------------------------------------
    def identity(self) -> GElement:
        return GElement(IDENTITY, 0)

    def section(self, sigma: int) -> GElement:
        return GElement(IDENTITY, sigma)

    def embed(self, w) -> GElement:
        return GElement(_as_word(w), 0)

    def apply_auto(self, sigma: int, w: Word) -> Word:
        return _perm_apply(self.perms[sigma], w)

    def multiply(self, a: GElement, b: GElement) -> GElement:
        return GElement(word_multiply(a.word, self.apply_auto(a.sigma, b.word)),
                        self._mul[a.sigma][b.sigma])

    def inverse(self, a: GElement) -> GElement:
        s = self._inv[a.sigma]
        return GElement(self.apply_auto(s, word_inverse(a.word)), s)

    def power(self, a: GElement, n: int) -> GElement:
        if n < 0:
            return self.power(self.inverse(a), -n)
        out = self.identity()
        for _ in range(n):
            out = self.multiply(out, a)
        return out

    def conjugate_by_section(self, sigma: int, h: Word) -> Word:
        """section(sigma)^-1 (h, id) section(sigma), landing in the base."""
        s_inv = self._inv[sigma]
        return self.apply_auto(s_inv, _as_word(h))

    def generators(self) -> list[GElement]:
        gens = []
        for k in range(1, self.rank + 1):
            gens.append(GElement((k,), 0))
            gens.append(GElement((-k,), 0))
        for s in range(1, self.N):
            gens.append(self.section(s))
            inv = self._inv[s]
            if inv != s:
                gens.append(self.section(inv))
        return gens

    def ball(self, radius: int) -> list[GElement]:
        """BFS ball in the generating set (base letters and sections)."""
        gens = self.generators()
        seen = {self.identity(): 0}
        order = [self.identity()]
        frontier = [self.identity()]
        for _ in range(radius):
            nxt = []
            for g in frontier:
                for s in gens:
                    cand = self.multiply(g, s)
                    if cand not in seen:
                        seen[cand] = 0
                        order.append(cand)
                        nxt.append(cand)
            frontier = nxt
        return order

    def describe(self) -> dict:
        return {"rank": self.rank, "index": self.N,
                "perms": [list(p) for p in self.perms]}


def swap_extension() -> FiniteExtension:
    """Rank-2 free group extended by the a <-> b letter swap."""
    return FiniteExtension(2, [(1, 2), (2, 1)])


# ---------------------------------------------------------------------------
# Operations on quasimorphisms over an extension
# ---------------------------------------------------------------------------

def sigma_act(ext: FiniteExtension, sigma: int, phi: Quasimorphism) -> Quasimorphism:
    """Pull back along conjugation by the section of sigma:
    (sigma . phi)(h) = phi(section^-1 h section)."""
    return Quasimorphism(f"sigma{sigma}.{phi.name}",
                         lambda h: phi(ext.conjugate_by_section(sigma, _as_word(h))),
                         homogeneous=phi.homogeneous)


def orbit_average(ext: FiniteExtension, phi: Quasimorphism) -> Quasimorphism:
    """Sum of the whole orbit; invariant under every sigma because acting
    permutes the summands."""
    acted = [sigma_act(ext, s, phi) for s in range(ext.N)]
    return Quasimorphism(f"avg.{phi.name}",
                         lambda h: sum(f(h) for f in acted),
                         homogeneous=phi.homogeneous)


def check_sigma_invariance(ext: FiniteExtension, phi: Quasimorphism,
                           radius: int = 3, tolerance: float = 0.0) -> list[dict]:
    out = []
    for w in W.ball(ext.rank, radius):
        base = phi(w)
        for s in range(1, ext.N):
            moved = phi(ext.conjugate_by_section(s, w))
            if abs(moved - base) > tolerance:
                out.append({"word": W.to_string(w), "sigma": s,
                            "value": base, "moved": moved})
    return out


def transfer_extend(ext: FiniteExtension, phi: Quasimorphism,
                    invariance_radius: int = 3) -> Quasimorphism:
    """Extend an invariant quasimorphism to the whole extension by
    g -> phi(g^N)/N; g^N always lands in the base because the quotient has
    exponent dividing N."""
    bad = check_sigma_invariance(ext, phi, invariance_radius)
    if bad:
        raise InputError(f"not invariant under the extension action: {bad[0]}")
    N = ext.N

    def evaluator(g) -> float:
        if isinstance(g, GElement):
            gg = g
        else:
            gg = ext.embed(g)
        p = ext.power(gg, N)
        if not p.is_base():
            raise InputError("power did not land in the base group")
        return phi(p.word) / N

    return Quasimorphism(f"transfer.{phi.name}", evaluator,
                         homogeneous=phi.homogeneous)


@dataclass(frozen=True)
class RestrictionReport:
    words_checked: int
    max_restriction_gap: float
    defects: dict                # radius -> sampled defect over extension pairs
    growth: float


def restriction_check(ext: FiniteExtension, transferred: Quasimorphism,
                      averaged: Quasimorphism, word_radius: int = 6,
                      pair_radii: tuple = (4, 6)) -> RestrictionReport:
    """The transfer of an orbit average must restrict to the average on the
    base (exactly, for homogeneous inputs), and its sampled defect over
    extension pairs must stay finite and radius-stable."""
    gap = 0.0
    checked = 0
    for w in W.ball(ext.rank, word_radius):
        checked += 1
        gap = max(gap, abs(transferred(ext.embed(w)) - averaged(w)))
    defects = {}
    for radius in pair_radii:
        defects[radius] = extension_defect(ext, transferred, radius)
    radii = sorted(defects)
    growth = defects[radii[-1]] - defects[radii[0]] if len(radii) > 1 else 0.0
    return RestrictionReport(checked, gap, defects, growth)


def extension_defect(ext: FiniteExtension, phi: Quasimorphism, radius: int) -> float:
    """Exhaustive sampled defect of phi over pairs from the extension ball.

    The pair grid is quadratic in the ball, so the inner loop works on
    precomputed twisted right factors and caches values per product.
    """
    elements = ext.ball(radius)
    words_ = [g.word for g in elements]
    sigmas = [g.sigma for g in elements]
    vals = [phi(g) for g in elements]
    cache = {(w, s): v for w, s, v in zip(words_, sigmas, vals)}
    views = [[ext.apply_auto(s, w) for w in words_] for s in range(ext.N)]
    worst = 0.0
    n = len(elements)
    for i in range(n):
        gw, gs, vg = words_[i], sigmas[i], vals[i]
        view = views[gs]
        mulrow = ext._mul[gs]
        for j in range(n):
            key = (word_multiply(gw, view[j]), mulrow[sigmas[j]])
            vp = cache.get(key)
            if vp is None:
                vp = phi(GElement(*key))
                cache[key] = vp
            d = abs(vp - vg - vals[j])
            if d > worst:
                worst = d
    return worst


def homogeneity_suite(phi: Quasimorphism, elements, n_max: int,
                      conjugators=(), tolerance: float = 1e-9) -> list[dict]:
    """Check phi(g^n) = n phi(g) and conjugation invariance on samples."""
    out = []
    for g in elements:
        g = _as_word(g)
        base = phi(g)
        for n in range(2, n_max + 1):
            v = phi(word_power(g, n))
            if abs(v - n * base) > tolerance:
                out.append({"kind": "power", "g": W.to_string(g), "n": n,
                            "value": v, "expected": n * base})
                break
        for h in conjugators:
            h = _as_word(h)
            conj = word_multiply(h, word_multiply(g, word_inverse(h)))
            v = phi(conj)
            if abs(v - base) > tolerance:
                out.append({"kind": "conjugacy", "g": W.to_string(g),
                            "h": W.to_string(h), "value": v, "expected": base})
                break
    return out
