"""Fixedness of tree nodes with respect to an arc.

An arc makes a child tree's order the induced suborder of its parent's
order on the mapped leaves.  A node of the parent whose rotation influences
the child is "fixed" with respect to the arc: it keeps degree >= 3 when the
parent is projected onto the child's leaf image.  Conversely every inner
node of a (normalized) child tree stems from the parent node whose rotation
determines it.
"""
from __future__ import annotations

from dataclasses import dataclass

from .tree import LEAF, PQTree, project


@dataclass
class FixednessReport:
    """Per-node view of a tree against one leaf subset.

    populated maps each inner node to the incident neighbors whose side
    contains a subset leaf, in reference order; a node is fixed when at
    least three of its edges are populated.
    """

    subset: set[str]
    populated: dict[int, tuple[int, ...]]
    fixed_nodes: set[int]

    def is_fixed(self, node: int) -> bool:
        return node in self.fixed_nodes


def populated_neighbors(tree: PQTree, node: int, subset: set[str]) -> tuple[int, ...]:
    return tuple(v for v in tree.neighbors(node) if tree.side_leaves(node, v) & subset)


def classify_fixedness(tree: PQTree, subset) -> FixednessReport:
    subset = set(subset)
    populated: dict[int, tuple[int, ...]] = {}
    fixed: set[int] = set()
    for node in tree.inner_ids():
        pop = populated_neighbors(tree, node, subset)
        populated[node] = pop
        if len(pop) >= 3:
            fixed.add(node)
    return FixednessReport(subset, populated, fixed)


def side_blocks(tree: PQTree, node: int) -> list[set[str]]:
    """Leaf sets behind each edge of the node, in reference order."""
    return [tree.side_leaves(node, v) for v in tree.neighbors(node)]


def q_representative(
    parent: PQTree, child: PQTree, mapping: dict[str, str], node: int
) -> tuple[int, bool] | None:
    """The child node carrying a fixed parent Q-node's orientation.

    Returns (child node id, agree) where agree says the parent's populated
    sides, taken in the parent's reference order, wind around the child node
    in the child's reference direction.  None when the parent node is not
    fixed with respect to the arc or no single child node represents it.
    """
    image = set(mapping.values())
    pop = populated_neighbors(parent, node, image)
    if len(pop) < 3:
        return None
    inv = {v: k for k, v in mapping.items()}
    reps_child = [
        inv[min(parent.side_leaves(node, v) & image)] for v in pop
    ]
    proj = project(child, set(reps_child), raw=True)
    if proj.variant != "normal":
        return None
    inner = proj.inner_ids()
    if len(inner) != 1:
        return None
    center = inner[0]
    # position of each representative around the center, in reference order
    pos: list[int] = []
    nbrs = proj.neighbors(center)
    for leaf in reps_child[:3]:
        for i, w in enumerate(nbrs):
            if leaf in proj.side_leaves(center, w):
                pos.append(i)
                break
    if len(pos) != 3 or len(set(pos)) != 3:
        return None
    d = len(nbrs)
    agree = (pos[1] - pos[0]) % d < (pos[2] - pos[0]) % d
    return center, agree


def stems_from(parent: PQTree, child: PQTree, mapping: dict[str, str]) -> dict[int, int]:
    """For each inner node of the child, the parent node its rotation is
    pinned to, if any.

    mapping sends child leaf labels to parent leaf labels.  A child node nu
    stems from parent node mu when projecting the parent onto one
    representative leaf per side of nu yields a star centered at mu whose
    sides refine the sides of nu: every mu-side image lies inside a single
    block of nu.  A block of nu spanning several mu-sides is fine (the child
    merely merged edges of mu); a mu-side straddling two blocks is not.
    Because projection preserves node ids, the returned values are ids in
    the parent tree.
    """
    out: dict[int, int] = {}
    if child.variant != "normal" or parent.variant != "normal":
        return out
    image = set(mapping.values())
    for nu in child.inner_ids():
        blocks = side_blocks(child, nu)
        reps = [mapping[min(b)] for b in blocks]
        if len(reps) < 3:
            continue
        star = project(parent, reps, raw=True)
        inner = star.inner_ids()
        if len(inner) != 1:
            continue
        center = inner[0]
        block_images = [{mapping[x] for x in b} for b in blocks]
        ok = True
        for v in parent.neighbors(center):
            side = parent.side_leaves(center, v) & image
            if side and not any(side <= bi for bi in block_images):
                ok = False
                break
        if ok:
            out[nu] = center
    return out
