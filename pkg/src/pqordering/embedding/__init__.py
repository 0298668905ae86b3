from .graph import (
    Graph,
    InvalidConstraint,
    InvalidGraph,
    NotBiconnected,
    NotPlanar,
    NotSupported,
    PlanarityCheckFailed,
    edge_id,
    is_planar_rotation,
    parse_edge_list,
    rotation_faces,
)
from .spqr import SPQRNode, SPQRTree, SkelEdge, skeleton_rotations, spqr_tree
from .representation import (
    EmbeddingRepresentation,
    PlanarityResult,
    SefeResult,
    build_representation,
    common_graph,
    embedding_trees,
    generalize_cutvertices,
    pq_embedding_representation,
    rotation_from_solution,
    solve_partially_pq_constrained,
    solve_sefe,
)

__all__ = [
    "Graph",
    "InvalidConstraint",
    "InvalidGraph",
    "NotBiconnected",
    "NotPlanar",
    "NotSupported",
    "PlanarityCheckFailed",
    "edge_id",
    "is_planar_rotation",
    "parse_edge_list",
    "rotation_faces",
    "SPQRNode",
    "SPQRTree",
    "SkelEdge",
    "skeleton_rotations",
    "spqr_tree",
    "EmbeddingRepresentation",
    "PlanarityResult",
    "SefeResult",
    "build_representation",
    "common_graph",
    "embedding_trees",
    "generalize_cutvertices",
    "pq_embedding_representation",
    "rotation_from_solution",
    "solve_partially_pq_constrained",
    "solve_sefe",
]
