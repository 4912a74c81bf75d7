"""Balance decisions through a rational-weighted commensurability groupoid.

Every attachment image of an edge-group generator is a conjugate power of a
canonical root inside its vertex group.  Nodes are (vertex, canonical root)
pairs; an edge arc carries the ratio of the two root exponents, and each
dihedral node carries a sign-flip arc of weight -1 (conjugation by the
reflection).  A cycle of weight with absolute value != 1 pumps conjugation
ratios without bound, which is exactly the unbalanced phenomenon; balance
is therefore decided with spanning-tree potentials on this groupoid.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from . import dihedral as dih
from . import freewords as fw
from .model import DIHEDRAL_R, DihedralInfinite, GraphOfGroups, VertexWord
from .words import (
    _conjugation_gens,
    _search_states,
    are_equal,
    invert_tokens,
    to_path_form,
    tokens_of_vertex_word,
    vw_pow,
)

SIDES = ("source", "target")


@dataclass(frozen=True)
class GroupoidNode:
    vertex: str
    root: tuple  # letter tuple of the canonical root

    def sort_key(self):
        return (
            self.vertex,
            tuple((str(g), 0 if e > 0 else 1, abs(e)) for g, e in self.root),
        )


@dataclass(frozen=True)
class GroupoidArc:
    src: GroupoidNode
    dst: GroupoidNode
    weight: Fraction
    kind: str  # "edge" or "flip"
    label: str  # edge id, or vertex id for flips
    sign: int  # traversal orientation for edge arcs; 0 for flips
    entry_exp: int  # carried root exponents must be divisible by this at src
    conj: tuple  # tokens kappa with kappa R_src^M kappa^-1 = R_dst^(M*weight)

    def sort_key(self):
        return (self.kind, self.label, -self.sign, self.src.sort_key(), self.dst.sort_key())


def invert_arc(arc: GroupoidArc) -> GroupoidArc:
    if arc.kind == "flip":
        return arc
    exit_exp = arc.entry_exp * arc.weight
    assert exit_exp.denominator == 1
    return GroupoidArc(
        src=arc.dst,
        dst=arc.src,
        weight=1 / arc.weight,
        kind=arc.kind,
        label=arc.label,
        sign=-arc.sign,
        entry_exp=int(exit_exp),
        conj=tuple(invert_tokens(arc.conj)),
    )


@dataclass(eq=False)
class RatioGroupoid:
    nodes: tuple[GroupoidNode, ...]
    arcs: tuple[GroupoidArc, ...]  # both orientations of every connection
    occurrences: dict  # (edge, side) -> (node, exponent, conjugator VertexWord)


@dataclass(frozen=True)
class Balanced:
    pass


@dataclass(frozen=True)
class Unbalanced:
    cycle: tuple[GroupoidArc, ...]
    modulus: Fraction


BalanceVerdict = Balanced | Unbalanced


def attachment_data(graph: GraphOfGroups, edge: str, side: str):
    """(node, signed root exponent, conjugator g) with image = g root^n g^-1."""
    e = graph.edge(edge)
    word = e.attachment_source if side == "source" else e.attachment_target
    kind = graph.kind(word.vertex)
    if isinstance(kind, DihedralInfinite):
        el = dih.word_to_element(word)
        node = GroupoidNode(word.vertex, ((DIHEDRAL_R, 1),))
        return node, el.k, VertexWord(word.vertex, ())
    root, conj, n = fw.canonical_root(word)
    return GroupoidNode(word.vertex, root.letters), n, conj


def build_groupoid(graph: GraphOfGroups) -> RatioGroupoid:
    occurrences = {}
    nodes: set[GroupoidNode] = set()
    for e in graph.edges:
        for side in SIDES:
            node, n, conj = attachment_data(graph, e.name, side)
            occurrences[(e.name, side)] = (node, n, conj)
            nodes.add(node)
    arcs: list[GroupoidArc] = []
    for e in graph.edges:
        node_t, n_t, g_t = occurrences[(e.name, "target")]
        node_s, n_s, g_s = occurrences[(e.name, "source")]
        kind_t = graph.kind(node_t.vertex)
        kind_s = graph.kind(node_s.vertex)
        conj_fwd = (
            tuple(invert_tokens(tokens_of_vertex_word(g_s)))
            + (("t", e.name, 1),)
            + tuple(tokens_of_vertex_word(g_t))
        )
        fwd = GroupoidArc(
            src=node_t,
            dst=node_s,
            weight=Fraction(n_s, n_t),
            kind="edge",
            label=e.name,
            sign=1,
            entry_exp=n_t,
            conj=conj_fwd,
        )
        arcs.append(fwd)
        arcs.append(invert_arc(fwd))
    for node in nodes:
        if isinstance(graph.kind(node.vertex), DihedralInfinite):
            arcs.append(
                GroupoidArc(
                    src=node,
                    dst=node,
                    weight=Fraction(-1),
                    kind="flip",
                    label=node.vertex,
                    sign=0,
                    entry_exp=1,
                    conj=(("g", node.vertex, "s", 1),),
                )
            )
    return RatioGroupoid(
        nodes=tuple(sorted(nodes, key=GroupoidNode.sort_key)),
        arcs=tuple(sorted(arcs, key=GroupoidArc.sort_key)),
        occurrences=occurrences,
    )


def _adjacency(groupoid: RatioGroupoid):
    adj: dict[GroupoidNode, list[GroupoidArc]] = {n: [] for n in groupoid.nodes}
    for arc in groupoid.arcs:
        adj[arc.src].append(arc)
    return adj


def component_of(groupoid: RatioGroupoid, node: GroupoidNode) -> frozenset[GroupoidNode]:
    adj = _adjacency(groupoid)
    seen = {node}
    queue = deque([node])
    while queue:
        u = queue.popleft()
        for arc in adj[u]:
            if arc.dst not in seen:
                seen.add(arc.dst)
                queue.append(arc.dst)
    return frozenset(seen)


def _find_bad_cycle(groupoid: RatioGroupoid, restrict=None) -> Unbalanced | None:
    adj = _adjacency(groupoid)
    nodes = [n for n in groupoid.nodes if restrict is None or n in restrict]
    potential: dict[GroupoidNode, Fraction] = {}
    tree_arc: dict[GroupoidNode, GroupoidArc] = {}
    for start in nodes:
        if start in potential:
            continue
        potential[start] = Fraction(1)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for arc in adj[u]:
                if arc.dst not in potential:
                    potential[arc.dst] = potential[u] * arc.weight
                    tree_arc[arc.dst] = arc
                    queue.append(arc.dst)

    def path_from_root(node: GroupoidNode) -> list[GroupoidArc]:
        chain = []
        while node in tree_arc:
            chain.append(tree_arc[node])
            node = tree_arc[node].src
        chain.reverse()
        return chain

    for arc in groupoid.arcs:
        if restrict is not None and arc.src not in restrict:
            continue
        if tree_arc.get(arc.dst) is arc:
            continue
        if abs(potential[arc.src] * arc.weight) == abs(potential[arc.dst]):
            continue
        cycle = (
            path_from_root(arc.src)
            + [arc]
            + [invert_arc(a) for a in reversed(path_from_root(arc.dst))]
        )
        modulus = Fraction(1)
        for a in cycle:
            modulus *= a.weight
        assert abs(modulus) != 1
        return Unbalanced(tuple(cycle), modulus)
    return None


def group_balanced(graph: GraphOfGroups) -> BalanceVerdict:
    """Balanced iff every groupoid cycle has weight of absolute value one."""
    bad = _find_bad_cycle(build_groupoid(graph))
    return Balanced() if bad is None else bad


def edge_balanced(graph: GraphOfGroups, edge: str) -> BalanceVerdict:
    """Balance of one edge, decided on its commensurability component.

    Conjugation ratios between powers of the two attachment images are the
    path weights of the component containing the edge's arc, composable with
    any cycle there; the edge is unbalanced exactly when that component has
    a cycle of absolute weight != 1.  This matches the balance of the
    conjugacy graph of the edge's equivalence class.
    """
    groupoid = build_groupoid(graph)
    node = groupoid.occurrences[(graph.edge(edge).name, "target")][0]
    bad = _find_bad_cycle(groupoid, restrict=component_of(groupoid, node))
    return Balanced() if bad is None else bad


# -- brute-force oracle --------------------------------------------------------


@dataclass(frozen=True)
class OracleUnbalanced:
    conjugator: tuple  # tokens h with h x^i h^-1 = y^j in the edge-deleted group
    i: int
    j: int


@dataclass(frozen=True)
class OracleBalancedWithinBounds:
    pass


def brute_force_balance_oracle(
    graph: GraphOfGroups,
    edge: str,
    max_syllables: int,
    max_exp: int,
    node_cap: int = 50_000,
):
    """Exhaustive witness search for unbalancedness of one edge.

    For every exponent i up to the bound, conjugates of the target-side
    image power are pushed through the groups of the edge-deleted graph by
    bounded search; a hit on a source-side image power with a different
    absolute exponent is an unbalancedness witness (h, i, j), re-verified
    through the word engine.  Finding nothing within bounds is inconclusive.
    """
    e = graph.edge(edge)
    kind_t = graph.kind(e.target)
    kind_s = graph.kind(e.source)
    u_t = e.attachment_target
    u_s = e.attachment_source
    targets = {}
    for j in range(1, max_exp + 1):
        for sj in (1, -1):
            targets[vw_pow(kind_s, u_s, sj * j)] = sj * j
    banned = frozenset({edge})
    for i in range(1, max_exp + 1):
        x = vw_pow(kind_t, u_t, i)
        gens = _conjugation_gens(graph, x, u_s)
        for vertex, z, toks in _search_states(
            graph, x.vertex, x, max_syllables, max_exp, node_cap, banned, gens
        ):
            j = targets.get(z)
            if j is None or vertex != z.vertex:
                continue
            if abs(i) == abs(j):
                continue
            lhs = list(toks) + tokens_of_vertex_word(x) + invert_tokens(toks)
            rhs = tokens_of_vertex_word(vw_pow(kind_s, u_s, j))
            assert are_equal(
                graph,
                to_path_form(graph, lhs, x.vertex),
                to_path_form(graph, rhs, u_s.vertex),
            )
            return OracleUnbalanced(tuple(toks), i, j)
    return OracleBalancedWithinBounds()
