"""Decision toolkit for graphs of free/dihedral groups over cyclic edges.

Given such a graph of groups, decide whether its fundamental group is
hierarchically hyperbolic and emit independently checkable certificates:
a verified linear parametrization per edge class on success, an explicit
non-Euclidean almost Baumslag-Solitar witness otherwise.
"""

from .balance import (
    Balanced,
    Unbalanced,
    brute_force_balance_oracle,
    build_groupoid,
    edge_balanced,
    group_balanced,
)
from .certify import BSWitness, DistortionCertificate, almost_bs_witness, distortion_certificate
from .conjgraph import ConjugacyGraph, EdgeClass, build_conjugacy_graph, edge_classes
from .dihedral import Cyclic, DihedralElement, DihedralType, dmul, dpow, subgroup_index
from .freewords import (
    RootData,
    commensurability_data,
    cyclic_conjugacy,
    cyclic_reduce,
    free_reduce,
    primitive_root,
)
from .model import (
    DihedralInfinite,
    EdgeRecord,
    Free,
    GoghError,
    GraphOfGroups,
    ValidationError,
    VertexWord,
    make_graph,
    spanning_tree,
    subgraph,
    validate,
)
from .parametrize import (
    HHG,
    LinearParametrization,
    NotHHG,
    hhg_verdict,
    parametrize,
    verify_parametrization,
)
from .words import (
    PathWord,
    are_equal,
    bounded_conjugator_search,
    britton_reduce,
    is_trivial,
    pinch_membership,
    to_path_form,
)

__all__ = [name for name in dir() if not name.startswith("_")]
