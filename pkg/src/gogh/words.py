"""Path forms and the word problem in the fundamental group.

Elements are manipulated as path words: alternating vertex-group syllables
and stable letters whose edge sequence is a closed path based at some
vertex.  Vertex syllables keep exponents as arbitrary-precision integers;
pinch rewriting only does exponent arithmetic, so words like v^(3^20) stay
one letter long.

Tokens are the flat exchange format:
    ("g", vertex, generator, exponent)   vertex-group letter
    ("t", edge, exponent)                stable letter power
"""

from __future__ import annotations

from dataclasses import dataclass

from . import dihedral as dih
from . import freewords as fw
from .model import (
    DIHEDRAL_R,
    DIHEDRAL_S,
    DihedralInfinite,
    Free,
    GoghError,
    GraphOfGroups,
    SignedEdge,
    VertexGroupKind,
    VertexWord,
    edge_attachments,
    edge_endpoints,
    reverse_step,
    tree_steps,
    spanning_tree,
)

Token = tuple


class SearchBudgetExceeded(GoghError):
    pass


# -- vertex-word algebra, dispatching on the vertex-group kind ---------------


def vw_identity(vertex: str) -> VertexWord:
    return VertexWord(vertex, ())


def vw_normalize(kind: VertexGroupKind, w: VertexWord) -> VertexWord:
    if isinstance(kind, Free):
        return fw.free_reduce(w)
    return dih.element_to_word(w.vertex, dih.word_to_element(w))


def vw_mul(kind: VertexGroupKind, *words: VertexWord) -> VertexWord:
    vertex = words[0].vertex
    if isinstance(kind, Free):
        return VertexWord(vertex, fw.mul_letters(*(w.letters for w in words)))
    acc = dih.IDENTITY
    for w in words:
        acc = dih.dmul(acc, dih.word_to_element(w))
    return dih.element_to_word(vertex, acc)


def vw_inv(kind: VertexGroupKind, w: VertexWord) -> VertexWord:
    if isinstance(kind, Free):
        return VertexWord(w.vertex, fw.inv_letters(w.letters))
    return dih.element_to_word(w.vertex, dih.dinv(dih.word_to_element(w)))


def vw_pow(kind: VertexGroupKind, w: VertexWord, n: int) -> VertexWord:
    if isinstance(kind, Free):
        return VertexWord(w.vertex, fw.pow_letters(w.letters, n))
    return dih.element_to_word(w.vertex, dih.dpow(dih.word_to_element(w), n))


# -- path words ---------------------------------------------------------------


@dataclass(frozen=True)
class PathWord:
    """g_0 t_1 g_1 ... t_n g_n with the edge steps forming a closed path."""

    base: str
    head: VertexWord
    tail: tuple[tuple[SignedEdge, VertexWord], ...]

    @property
    def syllable_count(self) -> int:
        return len(self.tail) * 2 + 1

    def words(self) -> list[VertexWord]:
        return [self.head] + [w for _, w in self.tail]

    def steps(self) -> list[SignedEdge]:
        return [s for s, _ in self.tail]


def tokens_of_vertex_word(w: VertexWord) -> list[Token]:
    return [("g", w.vertex, g, e) for g, e in w.letters]


def tokens_of_path(p: PathWord) -> list[Token]:
    out = tokens_of_vertex_word(p.head)
    for step, w in p.tail:
        out.append(("t", step[0], step[1]))
        out.extend(tokens_of_vertex_word(w))
    return out


def invert_tokens(tokens) -> list[Token]:
    out: list[Token] = []
    for tok in reversed(tokens):
        if tok[0] == "g":
            out.append(("g", tok[1], tok[2], -tok[3]))
        else:
            out.append(("t", tok[1], -tok[2]))
    return out


def to_path_form(graph: GraphOfGroups, tokens, base: str | None = None) -> PathWord:
    """Rewrite a raw token word into a closed path word at the given base.

    Spanning-tree stable letters (trivial in the fundamental group) are
    inserted wherever consecutive letters live at different vertices, and
    to close the path back to the base.
    """
    tokens = list(tokens)
    if base is None:
        base = _infer_base(graph, tokens)
    if base not in set(graph.vertex_ids()):
        raise GoghError(f"UnknownVertex: {base!r}")
    words: list[VertexWord] = [vw_identity(base)]
    steps: list[SignedEdge] = []
    current = base

    def goto(vertex: str) -> None:
        nonlocal current
        for step in tree_steps(graph, current, vertex):
            steps.append(step)
            words.append(vw_identity(edge_endpoints(graph, step)[1]))
        current = vertex

    for tok in tokens:
        if tok[0] == "g":
            _, vertex, gen, exp = tok
            if exp == 0:
                continue
            kind = graph.kind(vertex)
            goto(vertex)
            words[-1] = vw_mul(kind, words[-1], VertexWord(vertex, ((gen, exp),)))
        else:
            _, edge, exp = tok
            sign = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                step = (edge, sign)
                goto(edge_endpoints(graph, step)[0])
                steps.append(step)
                words.append(vw_identity(edge_endpoints(graph, step)[1]))
                current = edge_endpoints(graph, step)[1]
    goto(base)
    return PathWord(base, words[0], tuple(zip(steps, words[1:])))


def _infer_base(graph: GraphOfGroups, tokens) -> str:
    for tok in tokens:
        if tok[0] == "g":
            return tok[1]
        step = (tok[1], 1 if tok[2] > 0 else -1)
        return edge_endpoints(graph, step)[0]
    return min(graph.vertex_ids())


def pinch_membership(graph: GraphOfGroups, edge: str, g: VertexWord, sign: int = 1) -> int | None:
    """The exponent k with g = attachment^k, if g lies in the edge image.

    The attachment is the target-side image of the signed edge.  Free
    vertices use primitive-root data (length divisibility plus repetition);
    dihedral vertices reduce to divisibility of rotation exponents.
    """
    att = edge_attachments(graph, (edge, sign))[1]
    kind = graph.kind(att.vertex)
    if isinstance(kind, DihedralInfinite):
        el = dih.word_to_element(g)
        base = dih.word_to_element(att)
        if el.is_identity:
            return 0
        if el.eps or el.k % base.k:
            return None
        return el.k // base.k
    if g.is_identity:
        return 0
    rd = fw.primitive_root(att)
    inner = fw.mul_letters(fw.inv_letters(rd.conjugator.letters), g.letters, rd.conjugator.letters)
    q = _power_of(inner, rd.root.letters)
    if q is None or q % rd.exponent:
        return None
    return q // rd.exponent


def _power_of(letters: fw.Letters, root: fw.Letters) -> int | None:
    """q with letters == root^q as reduced words, else None."""
    if not letters:
        return 0
    if len(root) == 1:
        g, r = root[0]
        if len(letters) != 1 or letters[0][0] != g:
            return None
        m = letters[0][1]
        if m % r:
            return None
        return m // r
    n, rem = divmod(len(letters), len(root))
    if rem:
        return None
    width = len(root)
    if all(letters[i * width : (i + 1) * width] == root for i in range(n)):
        return n
    iroot = fw.inv_letters(root)
    if all(letters[i * width : (i + 1) * width] == iroot for i in range(n)):
        return -n
    return None


def britton_reduce(graph: GraphOfGroups, w: PathWord) -> PathWord:
    """Remove pinches t_e g t_e^-1 with g in the edge image, leftmost first.

    Each pinch is replaced by the corresponding power of the opposite
    attachment; the exponent is computed arithmetically.  The output
    contains no pinch, so by the normal-form property it is the identity
    only if it is a single trivial vertex syllable.
    """
    words = w.words()
    steps = w.steps()
    i = 0
    while i + 1 < len(steps):
        if steps[i] != reverse_step(steps[i + 1]):
            i += 1
            continue
        k = pinch_membership(graph, steps[i][0], words[i + 1], steps[i][1])
        if k is None:
            i += 1
            continue
        src_att = edge_attachments(graph, steps[i])[0]
        kind = graph.kind(src_att.vertex)
        repl = vw_pow(kind, src_att, k)
        words[i] = vw_mul(kind, words[i], repl, words[i + 2])
        del steps[i : i + 2]
        del words[i + 1 : i + 3]
        i = max(i - 1, 0)
    return PathWord(w.base, words[0], tuple(zip(steps, words[1:])))


def has_pinch(graph: GraphOfGroups, w: PathWord) -> bool:
    steps = w.steps()
    words = w.words()
    for i in range(len(steps) - 1):
        if steps[i] == reverse_step(steps[i + 1]):
            if pinch_membership(graph, steps[i][0], words[i + 1], steps[i][1]) is not None:
                return True
    return False


def _as_path(graph: GraphOfGroups, w, base=None) -> PathWord:
    if isinstance(w, PathWord):
        return w
    if isinstance(w, VertexWord):
        return to_path_form(graph, tokens_of_vertex_word(w), base or w.vertex)
    return to_path_form(graph, w, base)


def is_trivial(graph: GraphOfGroups, w) -> bool:
    """Word problem: does w represent the identity of the fundamental group?"""
    reduced = britton_reduce(graph, _as_path(graph, w))
    return not reduced.tail and reduced.head.is_identity


def are_equal(graph: GraphOfGroups, u, v) -> bool:
    pu = _as_path(graph, u)
    pv = _as_path(graph, v)
    tokens = tokens_of_path(pu) + invert_tokens(tokens_of_path(pv))
    return is_trivial(graph, to_path_form(graph, tokens, pu.base))


# -- bounded conjugator search (independent oracle) ---------------------------


def _letter_moves(graph: GraphOfGroups, vertex: str, z: VertexWord, max_exp: int, gens):
    kind = graph.kind(vertex)
    if isinstance(kind, DihedralInfinite):
        flip = dih.element_to_word(vertex, dih.dmul(dih.dmul(
            dih.DihedralElement(1, 0), dih.word_to_element(z)), dih.DihedralElement(1, 0)))
        yield ("g", vertex, DIHEDRAL_S, 1), flip
        if z.letters and z.letters[0][0] == DIHEDRAL_S:
            el = dih.word_to_element(z)
            for mag in range(1, max_exp + 1):
                for s in (1, -1):
                    r = dih.DihedralElement(0, s * mag)
                    out = dih.dmul(dih.dmul(r, el), dih.dinv(r))
                    yield ("g", vertex, DIHEDRAL_R, s * mag), dih.element_to_word(vertex, out)
        return
    for gen in sorted(gens):
        for mag in range(1, max_exp + 1):
            for s in (1, -1):
                ell = ((gen, s * mag),)
                out = fw.mul_letters(ell, z.letters, fw.inv_letters(ell))
                moved = VertexWord(vertex, out)
                if moved != z:
                    yield ("g", vertex, gen, s * mag), moved


def _conjugation_gens(graph: GraphOfGroups, x: VertexWord, y: VertexWord):
    """Per-vertex generator pools for conjugator letters.

    Letters are drawn from generators occurring in incident attachments and
    in the two endpoints; a conjugating path assembled from root data never
    needs other generators.
    """
    pools: dict[str, set] = {v: set() for v in graph.vertex_ids()}
    for e in graph.edges:
        for w in (e.attachment_source, e.attachment_target):
            pools[w.vertex].update(g for g, _ in w.letters)
    for w in (x, y):
        pools[w.vertex].update(g for g, _ in w.letters)
    return pools


def _search_states(graph, start_vertex, start_word, max_syllables, max_exp,
                   node_cap, banned_edges, gens):
    """BFS over pinch-transition states; yields (vertex, word, tokens)."""
    edge_moves = []
    for e in graph.edges:
        if e.name in banned_edges:
            continue
        edge_moves.append((e.name, 1))
        edge_moves.append((e.name, -1))
    edge_moves.sort(key=lambda s: (s[0], -s[1]))

    start = (start_vertex, start_word)
    seen = {start}
    frontier = [(start, [])]
    yield start_vertex, start_word, []
    depth = 0
    visited = 1
    while frontier and depth < max_syllables:
        depth += 1
        nxt = []
        for (vertex, z), toks in frontier:
            moves = []
            for step in edge_moves:
                src, tgt = edge_endpoints(graph, step)
                if tgt != vertex:
                    continue
                k = pinch_membership(graph, step[0], z, step[1])
                if k is None:
                    continue
                att_src = edge_attachments(graph, step)[0]
                kind = graph.kind(src)
                moves.append((("t", step[0], step[1]), src, vw_pow(kind, att_src, k)))
            for tok, moved in _letter_moves(graph, vertex, z, max_exp, gens.get(vertex, ())):
                moves.append((tok, vertex, moved))
            for tok, nv, nw in moves:
                state = (nv, nw)
                if state in seen:
                    continue
                seen.add(state)
                visited += 1
                if visited > node_cap:
                    raise SearchBudgetExceeded(f"conjugator search exceeded {node_cap} states")
                ntoks = [tok] + toks
                yield nv, nw, ntoks
                nxt.append((state, ntoks))
        frontier = nxt


def bounded_conjugator_search(
    graph: GraphOfGroups,
    x: VertexWord,
    y: VertexWord,
    max_syllables: int,
    max_exp: int,
    node_cap: int = 50_000,
    banned_edges: frozenset[str] = frozenset(),
) -> PathWord | None:
    """Search for h with h x h^-1 = y among short canonical path words.

    States track the conjugate of x as it is pushed through edges whose
    image subgroups contain it (the only way an elliptic element can stay
    elliptic), plus bounded single-letter conjugations inside vertex
    groups.  Any hit is re-verified with are_equal before it is returned.
    Absence only means no conjugator within the given bounds.
    """
    xk = graph.kind(x.vertex)
    yk = graph.kind(y.vertex)
    xn = vw_normalize(xk, x)
    yn = vw_normalize(yk, y)
    gens = _conjugation_gens(graph, xn, yn)
    for vertex, z, toks in _search_states(
        graph, xn.vertex, xn, max_syllables, max_exp, node_cap, banned_edges, gens
    ):
        if vertex == yn.vertex and z == yn:
            conj = list(toks)
            lhs = conj + tokens_of_vertex_word(xn) + invert_tokens(conj)
            assert are_equal(graph, to_path_form(graph, lhs, yn.vertex), yn)
            return to_path_form(graph, conj, yn.vertex)
    return None


def display_tokens(graph: GraphOfGroups, tokens, erase_tree: bool = True) -> str:
    """Render tokens in the input letter syntax; tree stable letters are
    display-trivial and dropped unless erase_tree is false."""
    tree = spanning_tree(graph)
    parts = []
    for tok in tokens:
        if tok[0] == "g":
            _, v, g, e = tok
            if e == 0:
                continue
            parts.append(f"{v}.{g}" + (f"^{e}" if e != 1 else ""))
        else:
            _, edge, e = tok
            if e == 0 or (erase_tree and edge in tree):
                continue
            parts.append(f"{edge}.t" + (f"^{e}" if e != 1 else ""))
    return " ".join(parts)
