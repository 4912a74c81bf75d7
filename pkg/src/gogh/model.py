"""Immutable model for finite graphs of groups.

Vertex groups are finitely generated free groups or the infinite dihedral
group; every edge group is infinite cyclic, described by the images of its
generator in the two endpoint groups.  Edges are stored once per
{e, reverse(e)} pair, in the orientation given at construction time; the
reversed orientation is addressed with sign -1.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass


class GoghError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GoghError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class Free:
    rank: int


@dataclass(frozen=True)
class DihedralInfinite:
    pass


VertexGroupKind = Free | DihedralInfinite

# Generators: positive 1-based integers for free groups, "r"/"s" for the
# infinite dihedral group (r of infinite order, s the reflection).
Gen = int | str

DIHEDRAL_R = "r"
DIHEDRAL_S = "s"


@dataclass(frozen=True)
class VertexWord:
    """A word in one vertex group, as (generator, exponent) letters.

    Free words are stored freely reduced (adjacent letters use distinct
    generators, exponents nonzero).  Dihedral words are stored in the
    normal form s^eps r^k, i.e. at most one "s" letter first.
    """

    vertex: str
    letters: tuple[tuple[Gen, int], ...]

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters


@dataclass(frozen=True)
class EdgeRecord:
    """One oriented edge with the two images of the edge-group generator.

    The defining relation of the fundamental group is
    ``t_e * attachment_target * t_e^-1 = attachment_source``.
    """

    name: str
    source: str
    target: str
    attachment_source: VertexWord  # image in the source vertex group
    attachment_target: VertexWord  # image in the target vertex group


@dataclass(frozen=True)
class GraphOfGroups:
    vertices: tuple[tuple[str, VertexGroupKind], ...]  # sorted by id
    edges: tuple[EdgeRecord, ...]  # sorted by id

    def kind(self, vertex: str) -> VertexGroupKind:
        for name, kind in self.vertices:
            if name == vertex:
                return kind
        raise ValidationError("UnknownVertex", f"no vertex named {vertex!r}")

    def edge(self, name: str) -> EdgeRecord:
        for e in self.edges:
            if e.name == name:
                return e
        raise ValidationError("UnknownEdge", f"no edge named {name!r}")

    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.vertices)

    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.edges)


def make_graph(vertices, edges) -> GraphOfGroups:
    """Build a graph with the canonical (sorted) storage order."""
    vs = tuple(sorted(vertices, key=lambda p: p[0]))
    es = tuple(sorted(edges, key=lambda e: e.name))
    return GraphOfGroups(vs, es)


# -- signed edge helpers ----------------------------------------------------
#
# A signed edge (name, +1) is the stored orientation, (name, -1) its reverse.
# Reversing swaps source/target and the two attachment words.

SignedEdge = tuple[str, int]


def edge_endpoints(graph: GraphOfGroups, step: SignedEdge) -> tuple[str, str]:
    """(source, target) of a signed edge."""
    e = graph.edge(step[0])
    if step[1] == 1:
        return e.source, e.target
    return e.target, e.source


def edge_attachments(graph: GraphOfGroups, step: SignedEdge) -> tuple[VertexWord, VertexWord]:
    """(attachment at source, attachment at target) of a signed edge."""
    e = graph.edge(step[0])
    if step[1] == 1:
        return e.attachment_source, e.attachment_target
    return e.attachment_target, e.attachment_source


def reverse_step(step: SignedEdge) -> SignedEdge:
    return (step[0], -step[1])


# -- validation --------------------------------------------------------------


def _check_letters(kind: VertexGroupKind, word: VertexWord) -> None:
    if isinstance(kind, Free):
        prev = None
        for gen, exp in word.letters:
            if not isinstance(gen, int) or not 1 <= gen <= kind.rank:
                raise ValidationError(
                    "UnknownGenerator",
                    f"generator {gen!r} not valid in free group of rank {kind.rank}",
                )
            if exp == 0:
                raise ValidationError("UnknownGenerator", "zero exponent letter")
            if gen == prev:
                raise ValidationError(
                    "UnreducedWord", f"word in {word.vertex} is not freely reduced"
                )
            prev = gen
    else:
        for gen, exp in word.letters:
            if gen not in (DIHEDRAL_R, DIHEDRAL_S):
                raise ValidationError(
                    "UnknownGenerator", f"generator {gen!r} not valid in dihedral group"
                )
            if exp == 0:
                raise ValidationError("UnknownGenerator", "zero exponent letter")
        shapes = tuple(g for g, _ in word.letters)
        if shapes not in ((), (DIHEDRAL_R,), (DIHEDRAL_S,), (DIHEDRAL_S, DIHEDRAL_R)):
            raise ValidationError(
                "UnreducedWord", f"dihedral word in {word.vertex} not in s^e r^k form"
            )
        for gen, exp in word.letters:
            if gen == DIHEDRAL_S and exp != 1:
                raise ValidationError(
                    "UnreducedWord", f"dihedral word in {word.vertex} not in s^e r^k form"
                )


def _attachment_infinite_order(kind: VertexGroupKind, word: VertexWord) -> bool:
    if isinstance(kind, Free):
        return not word.is_identity
    # dihedral: infinite order exactly for (0, k), k != 0
    return len(word.letters) == 1 and word.letters[0][0] == DIHEDRAL_R


def validate(graph: GraphOfGroups) -> None:
    """Check every model invariant; raise ValidationError on the first failure."""
    if not graph.vertices:
        raise ValidationError("DisconnectedGraph", "graph has no vertices")
    names = [name for name, _ in graph.vertices]
    if names != sorted(names) or len(set(names)) != len(names):
        raise ValidationError("DuplicateVertex", "vertex table not canonical")
    for name, kind in graph.vertices:
        if isinstance(kind, Free) and kind.rank < 1:
            raise ValidationError("RankZero", f"vertex {name} has rank {kind.rank}")
    edge_names = [e.name for e in graph.edges]
    if edge_names != sorted(edge_names) or len(set(edge_names)) != len(edge_names):
        raise ValidationError("DuplicateEdge", "edge table not canonical")
    vertex_set = set(names)
    for e in graph.edges:
        for v in (e.source, e.target):
            if v not in vertex_set:
                raise ValidationError("UnknownVertex", f"edge {e.name} touches {v!r}")
        if e.attachment_source.vertex != e.source or e.attachment_target.vertex != e.target:
            raise ValidationError(
                "UnknownVertex", f"edge {e.name} attachment tagged with wrong vertex"
            )
        for side, word in (("source", e.attachment_source), ("target", e.attachment_target)):
            kind = graph.kind(word.vertex)
            _check_letters(kind, word)
            if not _attachment_infinite_order(kind, word):
                raise ValidationError(
                    "FiniteOrderAttachment",
                    f"edge {e.name} {side} attachment has finite order",
                )
    if len(_reachable(graph, names[0])) != len(names):
        raise ValidationError("DisconnectedGraph", "underlying graph is not connected")


def _neighbours(graph: GraphOfGroups) -> dict[str, list[tuple[str, SignedEdge]]]:
    adj: dict[str, list[tuple[str, SignedEdge]]] = {v: [] for v, _ in graph.vertices}
    for e in graph.edges:
        adj[e.source].append((e.target, (e.name, 1)))
        adj[e.target].append((e.source, (e.name, -1)))
    for v in adj:
        adj[v].sort(key=lambda p: (p[1][0], -p[1][1]))
    return adj


def _reachable(graph: GraphOfGroups, start: str) -> set[str]:
    seen = {start}
    queue = deque([start])
    adj = _adjacency_cache(graph)
    while queue:
        v = queue.popleft()
        for w, _step in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


_ADJ_CACHE: dict[int, tuple[GraphOfGroups, dict]] = {}


def _adjacency_cache(graph: GraphOfGroups):
    key = id(graph)
    hit = _ADJ_CACHE.get(key)
    if hit is not None and hit[0] is graph:
        return hit[1]
    adj = _neighbours(graph)
    _ADJ_CACHE[key] = (graph, adj)
    if len(_ADJ_CACHE) > 256:
        _ADJ_CACHE.pop(next(iter(_ADJ_CACHE)))
    return adj


def spanning_tree(graph: GraphOfGroups) -> frozenset[str]:
    """Deterministic BFS spanning tree.

    Rooted at the lexicographically least vertex, exploring incident edges
    in lexicographic id order; a pure function of the graph content.
    """
    return frozenset(step[0] for _, step in _tree_parents(graph).values())


def _tree_parents(graph: GraphOfGroups) -> dict[str, tuple[str, SignedEdge]]:
    """vertex -> (parent vertex, signed edge parent->vertex) for non-root vertices."""
    ids = graph.vertex_ids()
    if not ids:
        return {}
    root = min(ids)
    adj = _adjacency_cache(graph)
    parents: dict[str, tuple[str, SignedEdge]] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w, step in adj[v]:
            if w not in seen:
                seen.add(w)
                parents[w] = (v, step)
                queue.append(w)
    return parents


def tree_steps(graph: GraphOfGroups, start: str, end: str) -> tuple[SignedEdge, ...]:
    """Signed edges of the spanning-tree path from start to end."""
    parents = _tree_parents(graph)

    def chain(v: str) -> list[str]:
        out = [v]
        while out[-1] in parents:
            out.append(parents[out[-1]][0])
        return out

    up_start = chain(start)
    up_end = chain(end)
    common = None
    end_set = {v: i for i, v in enumerate(up_end)}
    for v in up_start:
        if v in end_set:
            common = v
            break
    assert common is not None, "tree path within one component"
    steps: list[SignedEdge] = []
    for v in up_start:
        if v == common:
            break
        steps.append(reverse_step(parents[v][1]))
    down: list[SignedEdge] = []
    for v in up_end[: end_set[common]]:
        down.append(parents[v][1])
    steps.extend(reversed(down))
    return tuple(steps)


def subgraph(graph: GraphOfGroups, vertex_subset, edge_subset) -> GraphOfGroups:
    """Restrict to a subset of vertices and edges; the result must validate."""
    vset = set(vertex_subset)
    eset = set(edge_subset)
    sub = make_graph(
        [(v, k) for v, k in graph.vertices if v in vset],
        [e for e in graph.edges if e.name in eset],
    )
    validate(sub)
    return sub
