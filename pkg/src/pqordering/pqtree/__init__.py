from .tree import (
    LEAF,
    P,
    Q,
    InvalidSpecialLeaf,
    InvalidSubset,
    LeafMismatch,
    NotAChild,
    PQError,
    PQTree,
    TooLarge,
    normalize_kinds,
    project,
    relabel_leaves,
    root_at,
    rooted_frontier,
    universal,
    unroot,
)
from .reduce import from_consecutive_sets, intersect, reduce
from .fixedness import (
    FixednessReport,
    classify_fixedness,
    populated_neighbors,
    q_representative,
    stems_from,
)

__all__ = [
    "LEAF",
    "P",
    "Q",
    "InvalidSpecialLeaf",
    "InvalidSubset",
    "LeafMismatch",
    "NotAChild",
    "PQError",
    "PQTree",
    "TooLarge",
    "FixednessReport",
    "classify_fixedness",
    "from_consecutive_sets",
    "intersect",
    "normalize_kinds",
    "populated_neighbors",
    "project",
    "q_representative",
    "reduce",
    "relabel_leaves",
    "root_at",
    "rooted_frontier",
    "stems_from",
    "universal",
    "unroot",
]
