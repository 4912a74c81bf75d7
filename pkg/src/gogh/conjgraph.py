"""Equivalence classes of edge images and their conjugacy graphs.

Two attachment occurrences are equivalent when they are the two sides of
one edge, or commensurable inside one vertex group (same canonical root in
a free vertex; always, between infinite-order elements of a dihedral
vertex).  Each class yields a derived graph of 2-ended groups: one vertex
per commensurability class of roots inside each original vertex, carrying
the maximal 2-ended subgroup around the representative root, and one edge
per original edge of the class with integer attachment exponents over the
representative roots.  Conjugators recording how each derived attachment
sits inside the original group are kept as provenance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .balance import SIDES, GroupoidNode, attachment_data
from .model import (
    DIHEDRAL_R,
    DihedralInfinite,
    Free,
    GraphOfGroups,
    EdgeRecord,
    VertexWord,
    make_graph,
    validate,
)
from .words import vw_inv, vw_mul, vw_pow

Occurrence = tuple[str, str]  # (edge id, "source"|"target")


@dataclass(frozen=True)
class EdgeClass:
    index: int
    members: tuple[Occurrence, ...]

    def edge_ids(self) -> tuple[str, ...]:
        return tuple(sorted({e for e, _ in self.members}))


def edge_classes(graph: GraphOfGroups) -> list[EdgeClass]:
    """Partition of the attachment occurrences into equivalence classes."""
    occurrences = [(e.name, side) for e in graph.edges for side in SIDES]
    parent = {o: o for o in occurrences}

    def find(o):
        while parent[o] != o:
            parent[o] = parent[parent[o]]
            o = parent[o]
        return o

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    by_node: dict[GroupoidNode, Occurrence] = {}
    for occ in occurrences:
        union((occ[0], "source"), (occ[0], "target"))
        node, _, _ = attachment_data(graph, *occ)
        if node in by_node:
            union(by_node[node], occ)
        else:
            by_node[node] = occ
    groups: dict[Occurrence, list[Occurrence]] = {}
    for occ in occurrences:
        groups.setdefault(find(occ), []).append(occ)
    classes = []
    for i, rep in enumerate(sorted(groups)):
        classes.append(EdgeClass(index=i, members=tuple(sorted(groups[rep]))))
    return classes


def class_of_edge(graph: GraphOfGroups, edge: str) -> EdgeClass:
    for cls in edge_classes(graph):
        if (graph.edge(edge).name, "target") in cls.members:
            return cls
    raise AssertionError("every edge belongs to a class")


@dataclass(eq=False)
class ConjugacyGraph:
    graph: GraphOfGroups  # the derived graph of 2-ended groups
    edge_class: EdgeClass
    vertex_origin: dict  # derived vertex -> (original vertex, root VertexWord)
    attachment_conjugator: dict  # occurrence -> conjugator g in the original
    attachment_exponent: dict  # occurrence -> signed root exponent n


def build_conjugacy_graph(graph: GraphOfGroups, cls: EdgeClass) -> ConjugacyGraph:
    """Derived graph for one class, with provenance into the original group.

    For every occurrence u = g * root^n * g^-1 the derived attachment is the
    n-th power of the derived vertex generator standing for the root; the
    representative root is the canonical root shared by the class members at
    that vertex, so rebuilding is deterministic.
    """
    data = {occ: attachment_data(graph, *occ) for occ in cls.members}
    nodes = sorted({node for node, _, _ in data.values()}, key=GroupoidNode.sort_key)
    names: dict[GroupoidNode, str] = {}
    taken: set[str] = set()
    by_vertex: dict[str, list[GroupoidNode]] = {}
    for node in nodes:
        by_vertex.setdefault(node.vertex, []).append(node)
    for vertex in sorted(by_vertex):
        group = by_vertex[vertex]
        for i, node in enumerate(group):
            proposal = vertex if len(group) == 1 else f"{vertex}_{i}"
            while proposal in taken:
                proposal += "_"
            taken.add(proposal)
            names[node] = proposal

    vertices = []
    vertex_origin = {}
    for node in nodes:
        kind = graph.kind(node.vertex)
        derived_kind = DihedralInfinite() if isinstance(kind, DihedralInfinite) else Free(1)
        vertices.append((names[node], derived_kind))
        vertex_origin[names[node]] = (node.vertex, VertexWord(node.vertex, node.root))

    def derived_attachment(derived_vertex: str, node: GroupoidNode, n: int) -> VertexWord:
        if isinstance(graph.kind(node.vertex), DihedralInfinite):
            return VertexWord(derived_vertex, ((DIHEDRAL_R, n),))
        return VertexWord(derived_vertex, ((1, n),))

    edges = []
    conjugators = {}
    exponents = {}
    for edge in cls.edge_ids():
        node_s, n_s, g_s = data[(edge, "source")]
        node_t, n_t, g_t = data[(edge, "target")]
        conjugators[(edge, "source")] = g_s
        conjugators[(edge, "target")] = g_t
        exponents[(edge, "source")] = n_s
        exponents[(edge, "target")] = n_t
        edges.append(
            EdgeRecord(
                name=edge,
                source=names[node_s],
                target=names[node_t],
                attachment_source=derived_attachment(names[node_s], node_s, n_s),
                attachment_target=derived_attachment(names[node_t], node_t, n_t),
            )
        )
    derived = make_graph(vertices, edges)
    validate(derived)
    return ConjugacyGraph(
        graph=derived,
        edge_class=cls,
        vertex_origin=vertex_origin,
        attachment_conjugator=conjugators,
        attachment_exponent=exponents,
    )


def provenance_holds(graph: GraphOfGroups, cg: ConjugacyGraph) -> bool:
    """Check u = g * root^n * g^-1 in the original vertex group for every
    derived attachment."""
    for (edge, side), g in cg.attachment_conjugator.items():
        e = graph.edge(edge)
        u = e.attachment_source if side == "source" else e.attachment_target
        derived_edge = cg.graph.edge(edge)
        dv = derived_edge.source if side == "source" else derived_edge.target
        _, root = cg.vertex_origin[dv]
        n = cg.attachment_exponent[(edge, side)]
        kind = graph.kind(u.vertex)
        rebuilt = vw_mul(kind, g, vw_pow(kind, root, n), vw_inv(kind, g))
        if vw_mul(kind, rebuilt, vw_inv(kind, u)).letters:
            return False
    return True
