"""Reduction and intersection of PQ-trees.

reduce(T, S) returns the tree representing exactly the orders of T in which
the leaves S appear consecutively.  The tree is rooted at a special leaf
outside S, a bottom-up template pass rearranges the pertinent subtree, and
the result is unrooted again.  If no represented order has S consecutive the
null tree is returned.

intersect(T1, T2) represents the orders represented by both trees; it
replays the constraints encoded by T2's inner nodes as reductions on T1.
"""
from __future__ import annotations

from .tree import (
    LEAF,
    P,
    Q,
    InvalidSubset,
    LeafMismatch,
    PQTree,
    project,
    root_at,
    unroot,
    universal,
)

EMPTY, FULL, PARTIAL = 0, 1, 2


def _group(items: list, kind: str = P):
    return items[0] if len(items) == 1 else (kind, items)


def _classify(node, S: set[str]):
    """Bottom-up template application below the pertinent root.

    Returns (EMPTY, subtree), (FULL, subtree), (PARTIAL, spine) or None on
    failure.  A spine is a list of subtrees, each entirely empty or entirely
    full, empties first; consuming nodes embed it as a contiguous child
    sequence.
    """
    if node[0] == "leaf":
        return (FULL, node) if node[1] in S else (EMPTY, node)
    kind, children = node
    done = [_classify(c, S) for c in children]
    if any(d is None for d in done):
        return None
    states = [d[0] for d in done]
    if all(s == EMPTY for s in states):
        return (EMPTY, (kind, [d[1] for d in done]))
    if all(s == FULL for s in states):
        return (FULL, (kind, [d[1] for d in done]))

    if kind == P:
        empties = [d[1] for d in done if d[0] == EMPTY]
        fulls = [d[1] for d in done if d[0] == FULL]
        partials = [d[1] for d in done if d[0] == PARTIAL]
        if len(partials) >= 2:
            return None
        spine: list = []
        if empties:
            spine.append(_group(empties))
        if partials:
            spine.extend(partials[0])
        if fulls:
            spine.append(_group(fulls))
        return (PARTIAL, spine)

    # Q-node: states must read empties, optional partial, fulls in one of
    # the two directions
    for seq in (done, list(reversed(done))):
        states = [d[0] for d in seq]
        i = 0
        while i < len(seq) and states[i] == EMPTY:
            i += 1
        j = i
        mid = None
        if j < len(seq) and states[j] == PARTIAL:
            mid = seq[j][1]
            j += 1
        k = j
        while k < len(seq) and states[k] == FULL:
            k += 1
        if k != len(seq):
            continue
        spine = [d[1] for d in seq[:i]]
        if mid is not None:
            spine.extend(mid)
        spine.extend(d[1] for d in seq[j:])
        return (PARTIAL, spine)
    return None


def _apply_root(node, S: set[str]):
    """Template application at the pertinent root; returns the replacement
    subtree or None on failure."""
    if node[0] == "leaf":
        return node
    kind, children = node
    done = [_classify(c, S) for c in children]
    if any(d is None for d in done):
        return None

    if kind == P:
        empties = [d[1] for d in done if d[0] == EMPTY]
        fulls = [d[1] for d in done if d[0] == FULL]
        partials = [d for d in done if d[0] == PARTIAL]
        if len(partials) > 2:
            return None
        if not partials:
            if not empties or len(fulls) <= 1:
                return (kind, [d[1] for d in done])
            return (P, empties + [(P, fulls)])
        if len(partials) == 1:
            spine = list(partials[0][1])
            if fulls:
                spine.append(_group(fulls))
        else:
            spine = list(partials[0][1])
            if fulls:
                spine.append(_group(fulls))
            spine.extend(reversed(partials[1][1]))
        q = _group(spine, Q)
        if not empties:
            return q
        return (P, empties + [q])

    # root Q-node: the non-empty children must form one consecutive run,
    # partials only at its two ends with empty sides outward
    states = [d[0] for d in done]
    nonempty = [i for i, s in enumerate(states) if s != EMPTY]
    lo, hi = nonempty[0], nonempty[-1]
    if hi - lo + 1 != len(nonempty):
        return None
    if any(states[i] == PARTIAL for i in range(lo + 1, hi)):
        return None
    new_children = [d[1] for d in done[:lo]]
    if states[lo] == PARTIAL:
        new_children.extend(done[lo][1])
    else:
        new_children.append(done[lo][1])
    for i in range(lo + 1, hi):
        new_children.append(done[i][1])
    if hi != lo:
        if states[hi] == PARTIAL:
            new_children.extend(reversed(done[hi][1]))
        else:
            new_children.append(done[hi][1])
    new_children.extend(d[1] for d in done[hi + 1 :])
    return (Q, new_children)


def _count_in(node, S: set[str]) -> int:
    if node[0] == "leaf":
        return 1 if node[1] in S else 0
    return sum(_count_in(c, S) for c in node[1])


def _reduce_rooted(rooted, S: set[str]):
    """Find the pertinent root and apply templates there; returns the new
    rooted tree or None."""
    want = len(S)

    def descend(node):
        if node[0] != "leaf":
            kind, children = node
            for idx, c in enumerate(children):
                if _count_in(c, S) == want:
                    sub = descend(c)
                    if sub is None:
                        return None
                    return (kind, children[:idx] + [sub] + children[idx + 1 :])
        return _apply_root(node, S)

    return descend(rooted)


def reduce(tree: PQTree, subset, *, raw: bool = False) -> PQTree:
    """Constrain the tree so the subset is consecutive in every order."""
    if tree.is_null():
        return tree
    subset = set(subset)
    labels = tree.leaf_labels()
    if not subset <= labels:
        raise InvalidSubset(f"{sorted(subset - labels)} not in tree")
    if len(subset) <= 1 or len(labels - subset) <= 1:
        return tree  # every circular order keeps such sets consecutive
    # pick the special leaf outside the constrained set; constraining S and
    # constraining its complement describe the same orders
    special = min(labels)
    if special in subset:
        subset = labels - subset
    rooted = root_at(tree, special)
    result = _reduce_rooted(rooted, subset)
    if result is None:
        return PQTree.null()
    return unroot(result, special, raw=raw)


def intersect(base: PQTree, constraint: PQTree, *, raw: bool = False) -> PQTree:
    """Orders represented by both trees (same leaf set required)."""
    if base.is_null() or constraint.is_null():
        return PQTree.null()
    if base.is_empty() and constraint.is_empty():
        return base
    if base.leaf_labels() != constraint.leaf_labels():
        raise LeafMismatch(
            f"leaf sets differ: {sorted(base.leaf_labels() ^ constraint.leaf_labels())}"
        )
    labels = constraint.leaf_labels()
    out = base
    for node in constraint.inner_ids():
        nbrs = constraint.neighbors(node)
        sides = [constraint.side_leaves(node, v) for v in nbrs]
        for side in sides:
            out = reduce(out, side, raw=raw)
            if out.is_null():
                return out
        if constraint.kind(node) == Q:
            # consecutive pairs around the node pin the arrangement up to
            # reversal; with k sides, k-1 pair unions suffice
            for a, b in zip(sides, sides[1:]):
                out = reduce(out, a | b, raw=raw)
                if out.is_null():
                    return out
    return out


def from_consecutive_sets(labels, sets, *, raw: bool = False) -> PQTree:
    """Tree representing the circular orders of `labels` in which every
    given set is consecutive."""
    labels = set(labels)
    out = universal(labels)
    for s in sets:
        s = set(s)
        if not s <= labels:
            raise InvalidSubset(f"{sorted(s - labels)} not in label set")
        out = reduce(out, s, raw=raw)
        if out.is_null():
            return out
    return out
