"""Unrooted PQ-trees.

A PQ-tree represents a set of circular orders of its leaf labels.  P-nodes
allow any circular arrangement of their incident edges, Q-nodes fix the
arrangement up to reversal.  Three variants exist:

- normal: at least one leaf, represents a nonempty set of orders
- empty:  no leaves, represents exactly the empty order
- null:   represents no order at all (failed reduction)

Canonical form (what the public operations return): inner nodes have degree
at least 3 and Q-nodes degree at least 4; a degree-3 Q-node represents the
same orders as a degree-3 P-node and is normalised to P.  The solver
pipeline works with raw trees that keep degree-3 Q-nodes, because their
stored orientation carries coupling information between trees.
"""
from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass, field

sys.setrecursionlimit(max(sys.getrecursionlimit(), 50000))


class PQError(Exception):
    pass


class InvalidSubset(PQError):
    pass


class LeafMismatch(PQError):
    pass


class InvalidSpecialLeaf(PQError):
    pass


class NotAChild(PQError):
    pass


class TooLarge(PQError):
    pass


# node kinds
P, Q, LEAF = "P", "Q", "leaf"


@dataclass(frozen=True)
class PQTree:
    """variant is one of "normal", "null", "empty".  nodes maps id to
    (kind, neighbors, label); neighbor tuples of Q-nodes store the reference
    circular order of incident edges."""

    variant: str
    nodes: dict[int, tuple[str, tuple[int, ...], str | None]] = field(default_factory=dict)

    # -- basic accessors ----------------------------------------------------

    def is_null(self) -> bool:
        return self.variant == "null"

    def is_empty(self) -> bool:
        return self.variant == "empty"

    def leaves(self) -> dict[str, int]:
        return {lab: i for i, (kind, _, lab) in self.nodes.items() if kind == LEAF}

    def leaf_labels(self) -> set[str]:
        return {lab for _, (kind, _, lab) in self.nodes.items() if kind == LEAF}

    def inner_ids(self) -> list[int]:
        return sorted(i for i, (kind, _, _) in self.nodes.items() if kind != LEAF)

    def kind(self, i: int) -> str:
        return self.nodes[i][0]

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.nodes[i][1]

    def label(self, i: int) -> str | None:
        return self.nodes[i][2]

    def degree(self, i: int) -> int:
        return len(self.nodes[i][1])

    def size(self) -> int:
        return len(self.nodes)

    # -- invariants ---------------------------------------------------------

    def validate(self, *, canonical: bool = True) -> None:
        if self.variant == "null" or self.variant == "empty":
            assert not self.nodes
            return
        assert self.nodes, "normal tree must have nodes"
        labels = [lab for _, (k, _, lab) in sorted(self.nodes.items()) if k == LEAF]
        assert all(lab is not None for lab in labels)
        assert len(set(labels)) == len(labels), "duplicate leaf labels"
        edges = 0
        for i, (kind, nbrs, lab) in self.nodes.items():
            assert len(set(nbrs)) == len(nbrs)
            for n in nbrs:
                assert n in self.nodes and i in self.nodes[n][1]
            edges += len(nbrs)
            if kind == LEAF:
                assert len(nbrs) <= 1
            else:
                assert lab is None
                assert len(nbrs) >= 3, "inner node of degree < 3"
                if canonical and kind == Q:
                    assert len(nbrs) >= 4, "degree-3 Q-node in canonical tree"
        assert edges == 2 * (len(self.nodes) - 1), "not a tree"
        # connectivity
        seen = set()
        stack = [next(iter(self.nodes))]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(self.nodes[x][1])
        assert len(seen) == len(self.nodes), "disconnected"

    # -- construction -------------------------------------------------------

    @staticmethod
    def null() -> PQTree:
        return PQTree("null", {})

    @staticmethod
    def empty() -> PQTree:
        return PQTree("empty", {})

    @staticmethod
    def single(label: str) -> PQTree:
        return PQTree("normal", {0: (LEAF, (), label)})

    @staticmethod
    def edge(a: str, b: str) -> PQTree:
        a, b = sorted((a, b))
        return PQTree("normal", {0: (LEAF, (1,), a), 1: (LEAF, (0,), b)})

    # -- orders -------------------------------------------------------------

    def count_orders(self) -> int:
        if self.is_null():
            return 0
        if self.is_empty():
            return 1
        labs = self.leaf_labels()
        if len(labs) <= 2:
            return 1
        total = 1
        for i in self.inner_ids():
            kind = self.kind(i)
            c = self.degree(i) - 1
            total *= math.factorial(c) if kind == P else 2
        # the root inner node was counted with one arrangement too few /
        # many: rooting at a leaf gives every inner node exactly deg-1
        # children, which is what the loop assumed
        return total

    def enumerate_orders(self, cap: int = 1_000_000) -> list[tuple[str, ...]]:
        """All represented circular orders, each starting at the smallest
        label.  Raises TooLarge when the count exceeds cap."""
        if self.is_null():
            return []
        if self.is_empty():
            return [()]
        if self.count_orders() > cap:
            raise TooLarge(f"{self.count_orders()} orders exceed cap {cap}")
        labs = sorted(self.leaf_labels())
        if len(labs) == 1:
            return [(labs[0],)]
        if len(labs) == 2:
            return [tuple(labs)]
        start = labs[0]
        anchor = self.leaves()[start]
        root = self.neighbors(anchor)[0]

        def frontiers(node: int, parent: int) -> list[tuple[str, ...]]:
            kind, nbrs, lab = self.nodes[node]
            if kind == LEAF:
                return [(lab,)]
            k = nbrs.index(parent)
            children = nbrs[k + 1 :] + nbrs[:k]
            per_child = [frontiers(c, node) for c in children]
            out = []
            if kind == P:
                for perm in itertools.permutations(range(len(children))):
                    for combo in itertools.product(*(per_child[i] for i in perm)):
                        out.append(tuple(itertools.chain.from_iterable(combo)))
            else:
                for seq in (list(range(len(children))), list(reversed(range(len(children))))):
                    for combo in itertools.product(*(per_child[i] for i in seq)):
                        out.append(tuple(itertools.chain.from_iterable(combo)))
            return out

        result = [(start,) + f for f in frontiers(root, anchor)]
        # dedupe: a node with two children can produce the same frontier via
        # permutation and via Q-reversal when degrees are small
        seen = set()
        uniq = []
        for o in result:
            if o not in seen:
                seen.add(o)
                uniq.append(o)
        return uniq

    def order_count_estimate(self) -> int:
        return self.count_orders()

    # -- side sets ----------------------------------------------------------

    def side_leaves(self, u: int, v: int) -> set[str]:
        """Leaf labels on v's side of the edge (u, v)."""
        cache = self.__dict__.get("_sides")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_sides", cache)
        hit = cache.get((u, v))
        if hit is not None:
            return hit
        out: set[str] = set()
        stack = [(v, u)]
        while stack:
            node, parent = stack.pop()
            kind, nbrs, lab = self.nodes[node]
            if kind == LEAF:
                out.add(lab)
            for n in nbrs:
                if n != parent:
                    stack.append((n, node))
        cache[(u, v)] = out
        return out

    # -- canonical form -----------------------------------------------------

    def canonical_form(self) -> str:
        """A string equal for exactly the trees representing the same
        orders (assuming both are in canonical form)."""
        if self.is_null():
            return "NULL"
        if self.is_empty():
            return "EMPTY"
        labs = sorted(self.leaf_labels())
        if len(labs) == 1:
            return f"L({labs[0]})"
        if len(labs) == 2:
            return f"E({labs[0]},{labs[1]})"
        anchor = self.leaves()[labs[0]]
        root = self.neighbors(anchor)[0]

        def canon(node: int, parent: int) -> str:
            kind, nbrs, lab = self.nodes[node]
            if kind == LEAF:
                return f"L({lab})"
            k = nbrs.index(parent)
            children = nbrs[k + 1 :] + nbrs[:k]
            parts = [canon(c, node) for c in children]
            if kind == P:
                return "P[" + ",".join(sorted(parts)) + "]"
            rev = list(reversed(parts))
            best = parts if parts <= rev else rev
            return "Q[" + ",".join(best) + "]"

        return f"R({labs[0]})" + canon(root, anchor)

    def equivalent(self, other: PQTree) -> bool:
        return self.canonical_form() == other.canonical_form()

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        if self.is_null():
            return {"variant": "null", "nodes": []}
        if self.is_empty():
            return {"variant": "empty", "nodes": []}
        # relabel ids along a deterministic traversal so equal trees
        # serialize identically
        labs = sorted(self.leaf_labels())
        order: list[int] = []
        seen: set[int] = set()
        start = self.leaves()[labs[0]]
        stack = [(start, -1)]
        while stack:
            node, parent = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            order.append(node)
            kind, nbrs, _ = self.nodes[node]
            if parent in nbrs:
                k = nbrs.index(parent)
                ordered = nbrs[k + 1 :] + nbrs[:k]
            else:
                ordered = nbrs
            for n in reversed(ordered):
                if n not in seen:
                    stack.append((n, node))
        new_id = {old: i for i, old in enumerate(order)}
        nodes = []
        for old in order:
            kind, nbrs, lab = self.nodes[old]
            entry: dict = {"id": new_id[old], "kind": kind, "neighbors": [new_id[n] for n in nbrs]}
            if kind == LEAF:
                entry["label"] = lab
            nodes.append(entry)
        return {"variant": "normal", "nodes": nodes}

    @staticmethod
    def from_json_obj(obj: dict) -> PQTree:
        variant = obj.get("variant", "normal")
        if variant == "null":
            return PQTree.null()
        if variant == "empty":
            return PQTree.empty()
        nodes: dict[int, tuple[str, tuple[int, ...], str | None]] = {}
        for entry in obj["nodes"]:
            kind = entry["kind"]
            if kind not in (P, Q, LEAF):
                raise PQError(f"bad node kind {kind!r}")
            nodes[int(entry["id"])] = (
                kind,
                tuple(int(x) for x in entry["neighbors"]),
                entry.get("label"),
            )
        tree = PQTree("normal", nodes)
        tree.validate(canonical=False)
        return tree


# ---------------------------------------------------------------------------
# constructors and rebuilding
# ---------------------------------------------------------------------------


def universal(labels) -> PQTree:
    """The tree representing every circular order of the labels."""
    labels = sorted(set(labels))
    if not labels:
        return PQTree.empty()
    if len(labels) == 1:
        return PQTree.single(labels[0])
    if len(labels) == 2:
        return PQTree.edge(*labels)
    nodes: dict[int, tuple[str, tuple[int, ...], str | None]] = {}
    center = len(labels)
    for i, lab in enumerate(labels):
        nodes[i] = (LEAF, (center,), lab)
    nodes[center] = (P, tuple(range(len(labels))), None)
    return PQTree("normal", nodes)


def _simplify(nodes: dict[int, list]) -> dict[int, list]:
    """Remove degree-0/1 inner nodes and splice degree-2 inner nodes in a
    mutable adjacency (id -> [kind, list-of-neighbors, label])."""
    changed = True
    while changed:
        changed = False
        for i in sorted(nodes):
            kind, nbrs, lab = nodes[i]
            if kind == LEAF:
                continue
            if len(nbrs) == 0:
                del nodes[i]
                changed = True
            elif len(nbrs) == 1:
                n = nbrs[0]
                nodes[n][1] = [x for x in nodes[n][1] if x != i]
                del nodes[i]
                changed = True
            elif len(nbrs) == 2:
                a, b = nbrs
                nodes[a][1] = [b if x == i else x for x in nodes[a][1]]
                nodes[b][1] = [a if x == i else x for x in nodes[b][1]]
                del nodes[i]
                changed = True
    return nodes


def _freeze(nodes: dict[int, list]) -> PQTree:
    if not nodes:
        return PQTree.empty()
    frozen = {i: (k, tuple(ns), lab) for i, (k, ns, lab) in nodes.items()}
    # single isolated leaf
    return PQTree("normal", frozen)


def normalize_kinds(tree: PQTree) -> PQTree:
    """Turn degree-3 Q-nodes into P-nodes (canonical form)."""
    if tree.variant != "normal":
        return tree
    nodes = {}
    for i, (kind, nbrs, lab) in tree.nodes.items():
        if kind == Q and len(nbrs) == 3:
            kind = P
        nodes[i] = (kind, nbrs, lab)
    return PQTree("normal", nodes)


def relabel_leaves(tree: PQTree, mapping: dict[str, str]) -> PQTree:
    """New tree with every leaf label passed through an injective mapping."""
    if tree.variant != "normal":
        return tree
    if len(set(mapping.values())) != len(mapping):
        raise LeafMismatch("relabeling must be injective")
    nodes = {
        i: (kind, nbrs, mapping[lab] if kind == LEAF else None)
        for i, (kind, nbrs, lab) in tree.nodes.items()
    }
    return PQTree("normal", nodes)


def project(tree: PQTree, subset, *, raw: bool = False) -> PQTree:
    """Restrict the tree to a subset of its leaves.

    Node ids of surviving nodes are preserved, so provenance into the source
    tree is the identity.  With raw=True degree-3 Q-nodes keep their kind.
    """
    if tree.is_null():
        return tree
    subset = set(subset)
    if not subset <= tree.leaf_labels():
        raise InvalidSubset(f"{sorted(subset - tree.leaf_labels())} not in tree")
    if not subset:
        return PQTree.empty()
    mut = {i: [k, list(ns), lab] for i, (k, ns, lab) in tree.nodes.items()}
    for lab, i in sorted(tree.leaves().items()):
        if lab not in subset:
            for n in mut[i][1]:
                mut[n][1] = [x for x in mut[n][1] if x != i]
            del mut[i]
    _simplify(mut)
    out = _freeze(mut)
    if not raw:
        out = normalize_kinds(out)
    return out


# ---------------------------------------------------------------------------
# rooting
# ---------------------------------------------------------------------------
# Rooted trees are plain nested tuples: ("leaf", label) or (kind, children)
# with kind "P"/"Q"; Q children are ordered (reversal allowed).


def root_at(tree: PQTree, label: str):
    """Remove the leaf `label` and root the tree at its former neighbor.
    Circular orders of the tree correspond to linear frontiers of the result
    (read after the special leaf)."""
    if tree.variant != "normal":
        raise InvalidSpecialLeaf(f"cannot root a {tree.variant} tree")
    leaves = tree.leaves()
    if label not in leaves:
        raise InvalidSpecialLeaf(f"{label!r} is not a leaf")
    if len(leaves) == 1:
        raise InvalidSpecialLeaf("cannot root a single-leaf tree")
    anchor = leaves[label]
    root = tree.neighbors(anchor)[0]

    def build(node: int, parent: int):
        kind, nbrs, lab = tree.nodes[node]
        if kind == LEAF:
            return ("leaf", lab)
        k = nbrs.index(parent)
        children = nbrs[k + 1 :] + nbrs[:k]
        return (kind, [build(c, node) for c in children])

    return build(root, anchor)


def unroot(rooted, label: str, *, raw: bool = False) -> PQTree:
    """Inverse of root_at: reattach the special leaf above the root."""
    nodes: dict[int, list] = {}
    counter = itertools.count()

    def build(r) -> int:
        i = next(counter)
        if r[0] == "leaf":
            nodes[i] = [LEAF, [], r[1]]
            return i
        kind, children = r
        nodes[i] = [kind, [], None]
        for c in children:
            j = build(c)
            nodes[i][1].append(j)
            nodes[j][1].insert(0, i)
        return i

    root = build(rooted)
    special = next(counter)
    nodes[special] = [LEAF, [root], label]
    # the special leaf closes the circular order: it comes first in the
    # root's neighbor tuple so Q reference orders match the frontier
    nodes[root][1].insert(0, special)
    _simplify(nodes)
    out = _freeze(nodes)
    if not raw:
        out = normalize_kinds(out)
    return out


def rooted_frontier(rooted) -> list[str]:
    if rooted[0] == "leaf":
        return [rooted[1]]
    out = []
    for c in rooted[1]:
        out.extend(rooted_frontier(c))
    return out
