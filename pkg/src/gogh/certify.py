"""Almost Baumslag-Solitar witnesses and distortion certificates.

An unbalanced groupoid cycle composes to a conjugator s and a relation
s a^i s^-1 = a^j with |i| != |j|, where a is a power of the cycle's base
root.  Since a has infinite order, <a, s> is a non-Euclidean almost
Baumslag-Solitar subgroup; the relation certifies that the cyclic subgroup
<a> is distorted, so the ambient group has no hierarchically hyperbolic
structure.  Nothing from the groupoid computation is trusted: every emitted
identity is re-verified through Britton reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .balance import Balanced, GroupoidArc, Unbalanced
from .model import GoghError, GraphOfGroups, VertexWord
from .words import (
    PathWord,
    invert_tokens,
    is_trivial,
    britton_reduce,
    to_path_form,
    tokens_of_vertex_word,
    vw_pow,
)


class NoWitness(GoghError):
    pass


@dataclass(frozen=True)
class BSWitness:
    """a, s with s a^i s^-1 = a^j, a of infinite order and |i| != |j|.

    The transcript is the Britton-reduced form of s a^i s^-1 a^-j, kept as
    evidence that the relation holds; it must be the empty word.
    """

    a: VertexWord
    s: tuple  # conjugator tokens
    i: int
    j: int
    transcript: PathWord

    def relation_tokens(self) -> list:
        return relation_tokens(self.a, self.s, self.i, self.j)


def relation_tokens(a: VertexWord, s, i: int, j: int) -> list:
    """Tokens of s a^i s^-1 a^-j."""
    lhs = list(s) + tokens_of_vertex_word_power(a, i) + invert_tokens(s)
    return lhs + tokens_of_vertex_word_power(a, -j)


def tokens_of_vertex_word_power(word: VertexWord, n: int) -> list:
    if len(word.letters) == 1:
        g, e = word.letters[0]
        if e * n == 0:
            return []
        return [("g", word.vertex, g, e * n)]
    out = []
    base = tokens_of_vertex_word(word) if n > 0 else invert_tokens(tokens_of_vertex_word(word))
    for _ in range(abs(n)):
        out.extend(base)
    return out


def _minimal_base_power(cycle: tuple[GroupoidArc, ...], i: int) -> int:
    """Least m so that carrying root^(m*i) around the cycle stays integral."""
    constraints = []
    prefix = Fraction(1)
    for arc in cycle:
        constraints.append((Fraction(i) * prefix / arc.entry_exp).denominator)
        prefix *= arc.weight
    return lcm(*constraints) if constraints else 1


def almost_bs_witness(graph: GraphOfGroups, verdict) -> BSWitness:
    """Assemble and verify a witness from an unbalanced cycle.

    The cycle conjugators and stable letters compose to s; the base root is
    raised to the minimal power that keeps every arc transition integral,
    and (i, j) is the reduced modulus.
    """
    if isinstance(verdict, Balanced):
        raise NoWitness("the graph is balanced")
    assert isinstance(verdict, Unbalanced)
    cycle = verdict.cycle
    modulus = verdict.modulus
    i, j = modulus.denominator, modulus.numerator
    m = _minimal_base_power(cycle, i)
    base = cycle[0].src
    kind = graph.kind(base.vertex)
    a = vw_pow(kind, VertexWord(base.vertex, base.root), m)
    s_tokens = []
    for arc in reversed(cycle):
        s_tokens.extend(arc.conj)
    reduced = britton_reduce(
        graph, to_path_form(graph, relation_tokens(a, s_tokens, i, j), base.vertex)
    )
    if reduced.tail or not reduced.head.is_identity:
        raise GoghError("internal: witness relation failed Britton verification")
    return BSWitness(a=a, s=tuple(s_tokens), i=i, j=j, transcript=reduced)


@dataclass(frozen=True)
class DistortionRow:
    k: int
    exponent: int  # j^k, the power of a reached
    length_bound: int  # 2k len(s) + |i|^k len(a), letters spent to reach it
    ratio: Fraction


@dataclass(frozen=True)
class DistortionCertificate:
    witness: BSWitness
    rows: tuple[DistortionRow, ...]


def distortion_certificate(graph: GraphOfGroups, witness: BSWitness, depth: int) -> DistortionCertificate:
    """Verify s^k a^(i^k) s^-k = a^(j^k) symbolically for k = 1..depth.

    With |j| > |i| (roles are swapped otherwise) the words on the left have
    letter length 2k len(s) + |i|^k len(a) while reaching the j^k-th power
    of a, so the length-per-power ratio collapses: the iterated relation
    compresses huge powers into short words.
    """
    a, s, i, j = witness.a, list(witness.s), witness.i, witness.j
    if abs(i) > abs(j):
        s, i, j = invert_tokens(s), j, i
    if abs(i) == abs(j):
        raise NoWitness("witness is Euclidean; nothing is distorted")
    s_len = sum(1 if t[0] == "t" else abs(t[3]) for t in s)
    a_len = len(a)
    kind = graph.kind(a.vertex)
    rows = []
    for k in range(1, depth + 1):
        ik, jk = i**k, j**k
        tokens = []
        for _ in range(k):
            tokens.extend(s)
        tokens.extend(tokens_of_vertex_word_power(a, ik))
        inv_s = invert_tokens(s)
        for _ in range(k):
            tokens.extend(inv_s)
        tokens.extend(tokens_of_vertex_word_power(a, -jk))
        if not is_trivial(graph, to_path_form(graph, tokens, a.vertex)):
            raise GoghError(f"internal: distortion identity failed at depth {k}")
        bound = 2 * k * s_len + abs(ik) * a_len
        rows.append(DistortionRow(k=k, exponent=jk, length_bound=bound, ratio=Fraction(bound, abs(jk))))
    return DistortionCertificate(witness=witness, rows=tuple(rows))
