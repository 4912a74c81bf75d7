"""Word algebra for finitely generated free groups.

Words are tuples of (generator, exponent) letters with merged exponents, so
a huge power is a single letter.  All functions assume the letters of their
inputs belong to one free vertex group.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .model import GoghError, VertexWord

Letters = tuple[tuple[int, int], ...]


class TrivialWord(GoghError):
    pass


def reduce_letters(seq) -> Letters:
    out: list[list] = []
    for gen, exp in seq:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            out[-1][1] += exp
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([gen, exp])
    return tuple((g, e) for g, e in out)


def inv_letters(letters: Letters) -> Letters:
    return tuple((g, -e) for g, e in reversed(letters))


def mul_letters(*parts: Letters) -> Letters:
    merged: list[tuple[int, int]] = []
    for p in parts:
        merged.extend(p)
    return reduce_letters(merged)


def pow_letters(letters: Letters, n: int) -> Letters:
    if n < 0:
        return pow_letters(inv_letters(letters), -n)
    if n == 0:
        return ()
    if len(letters) == 1:
        g, e = letters[0]
        return ((g, e * n),)
    return reduce_letters(letters * n)


def free_reduce(word: VertexWord) -> VertexWord:
    """Freely reduce; idempotent and length-nonincreasing.

    >>> free_reduce(VertexWord("v", ((1, 2), (2, -1), (2, 1), (1, -3)))).letters
    ((1, -1),)
    """
    return VertexWord(word.vertex, reduce_letters(word.letters))


def cyclic_reduce(word: VertexWord) -> tuple[VertexWord, VertexWord]:
    """Split a freely reduced word as conjugator * core * conjugator^-1.

    The core is cyclically reduced and in wrap-normal position: its first
    and last letters use distinct generators (so the cyclic run structure
    coincides with the letter list), unless it has at most one letter.
    """
    letters = list(word.letters)
    conj: list[tuple[int, int]] = []
    while len(letters) >= 2 and letters[0][0] == letters[-1][0]:
        g, p = letters[0]
        _, q = letters[-1]
        if p + q == 0:
            conj.append((g, p))
            letters = letters[1:-1]
        else:
            # w = g^p mid g^q  ->  g^-q (g^(p+q) mid) g^q
            conj.append((g, -q))
            letters = [(g, p + q)] + letters[1:-1]
            break
    return (
        VertexWord(word.vertex, reduce_letters(conj)),
        VertexWord(word.vertex, tuple(letters)),
    )


@dataclass(frozen=True)
class RootData:
    """w = conjugator * root^exponent * conjugator^-1, root primitive."""

    root: VertexWord
    conjugator: VertexWord
    exponent: int


@lru_cache(maxsize=4096)
def primitive_root(word: VertexWord) -> RootData:
    """Primitive root of a nontrivial freely reduced word.

    >>> primitive_root(VertexWord("v", ((1, 6),))).exponent
    6
    """
    if word.is_identity:
        raise TrivialWord("the identity has no primitive root")
    conj, core = cyclic_reduce(word)
    letters = core.letters
    n = len(letters)
    if n == 1:
        g, k = letters[0]
        return RootData(VertexWord(word.vertex, ((g, 1),)), conj, k)
    # the run structure of the cyclic word is rotation-invariant, so any
    # proper-power period aligns with whole letters
    for m in range(1, n + 1):
        if n % m:
            continue
        if all(letters[i] == letters[(i + m) % n] for i in range(n)):
            return RootData(VertexWord(word.vertex, letters[:m]), conj, n // m)
    raise AssertionError("unreachable")


def _letter_key(letter: tuple[int, int]):
    g, e = letter
    return (g, 0 if e > 0 else 1, abs(e))


def _seq_key(letters: Letters):
    return tuple(_letter_key(l) for l in letters)


@lru_cache(maxsize=4096)
def canonical_root(word: VertexWord) -> tuple[VertexWord, VertexWord, int]:
    """(canonical root R, conjugator g, signed exponent p) with w = g R^p g^-1.

    R is the lexicographically least rotation of the primitive root or of
    its inverse, ordered by (generator, exponent sign, exponent size), so
    commensurable words share the same R.
    """
    rd = primitive_root(word)
    root = rd.root.letters
    best = None
    for source, flip in ((root, 1), (inv_letters(root), -1)):
        for i in range(len(source)):
            rot = source[i:] + source[:i]
            key = _seq_key(rot)
            if best is None or key < best[0]:
                prefix = source[:i]
                best = (key, rot, flip, prefix)
    _, rot, flip, prefix = best
    # source = prefix * rot * prefix^-1, and root = source^flip
    conj = mul_letters(rd.conjugator.letters, prefix)
    return (
        VertexWord(word.vertex, rot),
        VertexWord(word.vertex, conj),
        rd.exponent * flip,
    )


def cyclic_conjugacy(u: VertexWord, v: VertexWord) -> VertexWord | None:
    """A conjugator g with g u g^-1 = v, if the cyclic words match."""
    cu_conj, cu = cyclic_reduce(free_reduce(u))
    cv_conj, cv = cyclic_reduce(free_reduce(v))
    if len(cu.letters) != len(cv.letters):
        return None
    n = len(cu.letters)
    if n == 0:
        return VertexWord(u.vertex, ())
    for i in range(n):
        rot = cu.letters[i:] + cu.letters[:i]
        if rot == cv.letters:
            # u = (a A) rot (a A)^-1 with A the rotated-out prefix, v = b rot b^-1
            inner = mul_letters(cu_conj.letters, cu.letters[:i])
            g = mul_letters(cv_conj.letters, inv_letters(inner))
            return VertexWord(u.vertex, g)
    return None


@dataclass(frozen=True)
class CommensurabilityData:
    """u = conj_u root^p conj_u^-1 and v = conj_v root^(q*sign) conj_v^-1."""

    root: VertexWord
    conj_u: VertexWord
    p: int
    conj_v: VertexWord
    q: int
    sign: int


def commensurability_data(u: VertexWord, v: VertexWord) -> CommensurabilityData | None:
    """Common-root data iff <u> and <v> are commensurable, i.e. share a root.

    The convention keeps p > 0; the relative orientation of v sits in sign.
    """
    if u.is_identity or v.is_identity:
        raise TrivialWord("commensurability needs nontrivial words")
    ru, gu, pu = canonical_root(free_reduce(u))
    rv, gv, pv = canonical_root(free_reduce(v))
    if ru.letters != rv.letters:
        return None
    if pu > 0:
        root, p, rel_v = ru, pu, pv
    else:
        root = VertexWord(u.vertex, inv_letters(ru.letters))
        p, rel_v = -pu, -pv
    return CommensurabilityData(
        root=root,
        conj_u=gu,
        p=p,
        conj_v=gv,
        q=abs(rel_v),
        sign=1 if rel_v > 0 else -1,
    )
