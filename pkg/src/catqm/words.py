"""Reduced words in a finitely generated free group.

A word is a tuple of nonzero ints: ``k`` is the k-th generator (1-based),
``-k`` its inverse.  The empty tuple is the identity.  String form uses
``a, b, c, ...`` for generators and ``A, B, C, ...`` for inverses; this is
the serialization format used in configs and reports.
"""

from __future__ import annotations

from .errors import BudgetError, InputError

Word = tuple  # tuple of nonzero ints, freely reduced

IDENTITY: Word = ()

# Enumeration of free(2) words is capped here; the radius-12 ball already
# holds about a million words.
BALL_RADIUS_CAP = 12


def reduce_word(letters) -> Word:
    """Freely reduce a letter sequence."""
    out = []
    for x in letters:
        if x == 0:
            raise InputError("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1)) and 0 not in w


def check_reduced(w) -> Word:
    if not is_reduced(w):
        raise InputError(f"word is not freely reduced: {w!r}")
    return tuple(w)


def multiply(u: Word, v: Word) -> Word:
    """Product of reduced words, cancelling at the junction only."""
    u = list(u)
    i = 0
    n = len(v)
    while u and i < n and u[-1] == -v[i]:
        u.pop()
        i += 1
    return tuple(u) + tuple(v[i:])


def inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w = conjugator core conjugator^-1``
    and ``core`` cyclically reduced."""
    lo, hi = 0, len(w)
    while hi - lo >= 2 and w[lo] == -w[hi - 1]:
        lo += 1
        hi -= 1
    return tuple(w[lo:hi]), tuple(w[:lo])


def is_cyclically_reduced(w: Word) -> bool:
    return len(w) < 2 or w[0] != -w[-1]


def conjugacy_test(u: Word, v: Word) -> bool:
    """Free-group conjugacy: cyclic cores must be rotations of one another."""
    cu, _ = cyclic_reduce(check_reduced(u))
    cv, _ = cyclic_reduce(check_reduced(v))
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    doubled = cv + cv
    n = len(cu)
    return any(doubled[i:i + n] == cu for i in range(n))


def power(w: Word, n: int) -> Word:
    if n < 0:
        return power(inverse(w), -n)
    out: Word = IDENTITY
    for _ in range(n):
        out = multiply(out, w)
    return out


def ball(rank: int, radius: int, cap: int = BALL_RADIUS_CAP) -> list[Word]:
    """All reduced words of length <= radius, deterministic BFS order.

    Letters are ordered ``1, -1, 2, -2, ...`` so the listing is stable
    across runs.  Words appear by length, lexicographically within each
    length.
    """
    if radius < 0:
        raise InputError("radius must be >= 0")
    if radius > cap:
        raise BudgetError(f"ball radius {radius} exceeds cap {cap}")
    letters = []
    for k in range(1, rank + 1):
        letters.extend((k, -k))
    out: list[Word] = [IDENTITY]
    frontier: list[Word] = [IDENTITY]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            last = w[-1] if w else 0
            for x in letters:
                if x != -last:
                    nxt.append(w + (x,))
        out.extend(nxt)
        frontier = nxt
    return out


def ball_size(rank: int, radius: int) -> int:
    """1 + 2k * ((2k-1)^r - 1) / (2k - 2) for rank k >= 2; 2r+1 for rank 1."""
    if rank == 1:
        return 2 * radius + 1
    q = 2 * rank - 1
    return 1 + 2 * rank * (q**radius - 1) // (q - 1)


def common_prefix_length(u: Word, v: Word) -> int:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


def word_distance(u: Word, v: Word) -> int:
    """Distance in the Cayley tree: |u| + |v| - 2 lcp(u, v)."""
    return len(u) + len(v) - 2 * common_prefix_length(u, v)


_ORD_A = ord("a")


def to_string(w: Word) -> str:
    """Serialize: generator k -> letter, inverse -> uppercase. Identity: ''."""
    chars = []
    for x in w:
        c = chr(_ORD_A + abs(x) - 1)
        chars.append(c if x > 0 else c.upper())
    return "".join(chars)


def from_string(s: str) -> Word:
    """Parse the a/A serialization; 'e' or '' is the identity."""
    if s in ("", "e"):
        return IDENTITY
    letters = []
    for c in s:
        if not c.isalpha():
            raise InputError(f"bad word character {c!r}")
        k = ord(c.lower()) - _ORD_A + 1
        letters.append(k if c.islower() else -k)
    return check_reduced(letters)
