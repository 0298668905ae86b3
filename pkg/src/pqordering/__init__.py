"""Simultaneous circular ordering with PQ-trees.

The core objects are unrooted PQ-trees (pqtree), instances that tie several
trees together with suborder arcs (instance), and a solver that decides
simultaneous orderability for 2-fixed instances and produces witness orders
(solver).  Applications in embedding and interval build constrained
planarity, simultaneous embedding, and interval graph tooling on top.
"""
from __future__ import annotations

from .pqtree import (
    PQError,
    PQTree,
    InvalidSubset,
    LeafMismatch,
    InvalidSpecialLeaf,
    TooLarge,
    from_consecutive_sets,
    intersect,
    project,
    reduce,
    universal,
)

__all__ = [
    "PQError",
    "PQTree",
    "InvalidSubset",
    "LeafMismatch",
    "InvalidSpecialLeaf",
    "TooLarge",
    "from_consecutive_sets",
    "intersect",
    "project",
    "reduce",
    "universal",
]

__version__ = "0.1.0"
