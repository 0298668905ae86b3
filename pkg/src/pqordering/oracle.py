"""Brute-force reference implementations.

Everything here trades time for obviousness: enumerate candidate objects
exhaustively and filter by definition.  The test suite checks the fast
implementations against these on small inputs; nothing in the solving
pipeline may call into this module.
"""
from __future__ import annotations

import itertools

from .orders import canonical_rotation, restrict, same_circular


class OracleBudget(Exception):
    """Raised when a brute-force search would enumerate too many objects."""


def all_circular_orders(labels) -> list[tuple[str, ...]]:
    """Every circular order of the labels, canonically rotated.  Two orders
    are distinct when they are not rotations of each other; reversals count
    as distinct (for len > 2)."""
    labels = sorted(set(labels))
    if not labels:
        return [()]
    if len(labels) <= 2:
        return [tuple(labels)]
    first, rest = labels[0], labels[1:]
    return [(first,) + p for p in itertools.permutations(rest)]


def circularly_consecutive(order: tuple[str, ...], subset) -> bool:
    """True when the subset occupies consecutive positions of the circular
    order."""
    subset = set(subset)
    n = len(order)
    k = len(subset)
    if k <= 1 or k >= n - 1:
        return True
    flags = [x in subset for x in order]
    # count boundaries between in and out; consecutive means exactly two
    switches = sum(flags[i] != flags[(i + 1) % n] for i in range(n))
    return switches == 2


def brute_force_consecutive_orders(labels, sets, cap: int = 5_000_000) -> list[tuple[str, ...]]:
    """All circular orders keeping every given set consecutive."""
    labels = sorted(set(labels))
    import math

    if len(labels) > 2 and math.factorial(len(labels) - 1) > cap:
        raise OracleBudget(f"{len(labels)} labels exceed oracle cap")
    sets = [set(s) for s in sets]
    out = []
    for order in all_circular_orders(labels):
        if all(circularly_consecutive(order, s) for s in sets):
            out.append(order)
    return out


def orders_of_tree(tree, cap: int = 1_000_000) -> set[tuple[str, ...]]:
    """Canonically rotated order set of a PQ-tree, via its own enumerator.
    Only used to compare trees against order-level filters."""
    return {canonical_rotation(o) for o in tree.enumerate_orders(cap)}


def brute_force_cyclic_ordering(labels, triples) -> list[tuple[str, ...]]:
    """All circular orders in which each triple (a, b, c) appears in this
    clockwise orientation."""
    labels = sorted(set(labels))
    for t in triples:
        if len(set(t)) != 3 or not set(t) <= set(labels):
            raise ValueError(f"bad triple {t!r}")
    out = []
    for order in all_circular_orders(labels):
        pos = {x: i for i, x in enumerate(order)}
        ok = True
        for a, b, c in triples:
            i, j, k = pos[a], pos[b], pos[c]
            # clockwise a,b,c: walking forward from a meets b before c
            if (j - i) % len(order) >= (k - i) % len(order):
                ok = False
                break
        if ok:
            out.append(order)
    return out


def brute_force_permutation_orders(perm: dict[str, str], *, reverse: bool) -> list[tuple[str, ...]]:
    """All circular orders O with perm(O) = O (reverse=False) or
    perm(O) = reversed O (reverse=True)."""
    labels = sorted(perm)
    out = []
    for order in all_circular_orders(labels):
        image = tuple(perm[x] for x in order)
        target = tuple(reversed(order)) if reverse else order
        if same_circular(image, target):
            out.append(order)
    return out


def suborder_respected(parent_order, child_order, mapping, *, reversing: bool = False) -> bool:
    """True when the child order, mapped into the parent's labels, appears
    as the induced circular suborder of the parent (reversed when the arc is
    reversing)."""
    mapped = tuple(mapping[x] for x in child_order)
    induced = restrict(parent_order, set(mapped))
    if reversing:
        mapped = tuple(reversed(mapped))
    return same_circular(induced, mapped)


def brute_force_simultaneous_orders(instance, cap: int = 2_000_000):
    """First tuple of per-tree orders satisfying every arc, or None.

    Enumerates the cartesian product of each tree's own order set and keeps
    the first combination where every arc's suborder condition holds.  The
    cap bounds the product size.
    """
    per_tree = []
    total = 1
    for t in instance.trees:
        if t.is_null():
            return None
        orders = sorted(orders_of_tree(t, cap))
        per_tree.append(orders)
        total *= len(orders)
        if total > cap:
            raise OracleBudget(f"order product {total} exceeds oracle cap")
    for combo in itertools.product(*per_tree):
        if all(
            suborder_respected(
                combo[a.source], combo[a.target], a.mapping, reversing=a.reversing
            )
            for a in instance.arcs
        ):
            return combo
    return None

# ---------------------------------------------------------------------------
# planar embeddings
# ---------------------------------------------------------------------------


def _face_orbits(rotation, endpoints) -> int:
    """Number of faces a rotation system induces.  Darts are (tail, edge id);
    the successor of a dart continues after the edge in the rotation at its
    head."""
    nxt: dict[tuple[str, str], str] = {}
    for v, ring in rotation.items():
        for k, e in enumerate(ring):
            nxt[(v, e)] = ring[(k + 1) % len(ring)]
    seen: set[tuple[str, str]] = set()
    faces = 0
    for e in sorted(endpoints):
        for tail in endpoints[e]:
            dart = (tail, e)
            if dart in seen:
                continue
            faces += 1
            while dart not in seen:
                seen.add(dart)
                t, cur = dart
                a, b = endpoints[cur]
                head = b if t == a else a
                dart = (head, nxt[(head, cur)])
    return faces


def planar_by_euler(graph, rotation) -> bool:
    """n - m + f = 2 for a connected graph."""
    endpoints = {f"{u} {v}": (u, v) for u, v in graph.edges}
    f = _face_orbits(rotation, endpoints)
    return len(graph.vertices) - len(graph.edges) + f == 2


def all_rotation_systems(graph, cap: int = 2_000_000) -> list[dict[str, tuple[str, ...]]]:
    """Every planar rotation system of a connected graph, by enumerating all
    candidate rotations per vertex and keeping combinations that pass the
    face count."""
    per_vertex: list[tuple[str, list[tuple[str, ...]]]] = []
    total = 1
    for v in graph.vertices:
        opts = all_circular_orders(graph.incident(v))
        per_vertex.append((v, opts))
        total *= len(opts)
        if total > cap:
            raise OracleBudget(f"rotation product {total} exceeds oracle cap")
    endpoints = {f"{u} {v}": (u, v) for u, v in graph.edges}
    n, m = len(graph.vertices), len(graph.edges)
    out = []
    for combo in itertools.product(*(opts for _, opts in per_vertex)):
        rotation = {v: ring for (v, _), ring in zip(per_vertex, combo)}
        if n - m + _face_orbits(rotation, endpoints) == 2:
            out.append(rotation)
    return out


def _compose_rotation(spqr, chosen) -> dict[str, tuple[str, ...]]:
    """Rotation system from one rotation choice per decomposition skeleton."""

    def expand(v: str, i: int, enter_occ):
        ring = chosen[i][v]
        if enter_occ is None:
            seq = ring
        else:
            k = ring.index(enter_occ)
            seq = ring[k + 1 :] + ring[:k]
        out: list[str] = []
        for occ in seq:
            edge = spqr.edge_by_occ(occ)
            if edge.real is not None:
                out.append(edge.real)
            else:
                t = spqr.twins[occ]
                out.extend(expand(v, spqr.occ_node(t), t))
        return out

    rotation = {}
    for v in spqr.graph.vertices:
        root = spqr.members_of(v)[0]
        rotation[v] = canonical_rotation(tuple(expand(v, root, None)))
    return rotation


def brute_force_embeddings(graph, cap: int = 1_000_000) -> list[dict[str, tuple[str, ...]]]:
    """Every planar rotation system of a biconnected planar graph, one per
    combination of decomposition choices: a bond with k edges contributes the
    (k-1)! circular orders of its parallel edges (mirrored at the opposite
    pole), a triconnected skeleton contributes its two mirror embeddings.
    Each output is verified by the face count, and the total is checked
    against the closed-form product and for duplicates."""
    import math

    from .embedding.spqr import KIND_P, KIND_R, skeleton_rotations, spqr_tree

    spqr = spqr_tree(graph)
    options: list[list[dict[str, tuple[str, ...]]]] = []
    expected = 1
    for i, node in enumerate(spqr.nodes):
        base = skeleton_rotations(spqr, i)
        if node.kind == KIND_P:
            u, w = sorted(node.vertex_set())
            occs = sorted(e.occ for e in node.edges)
            opts = []
            for perm in itertools.permutations(occs[1:]):
                ring = (occs[0],) + perm
                opts.append({u: ring, w: tuple(reversed(ring))})
            expected *= math.factorial(len(occs) - 1)
        elif node.kind == KIND_R:
            opts = [base, {v: tuple(reversed(r)) for v, r in base.items()}]
            expected *= 2
        else:
            opts = [base]
        options.append(opts)
        if expected > cap:
            raise OracleBudget(f"embedding product {expected} exceeds oracle cap")
    endpoints = {f"{u} {v}": (u, v) for u, v in graph.edges}
    n, m = len(graph.vertices), len(graph.edges)
    out = []
    for combo in itertools.product(*options):
        rotation = _compose_rotation(spqr, combo)
        assert n - m + _face_orbits(rotation, endpoints) == 2
        out.append(rotation)
    frozen = {tuple(sorted(rot.items())) for rot in out}
    assert len(frozen) == len(out) == expected
    return out


def brute_force_pq_constrained(graph, constraints, cap: int = 2_000_000, *, systems=None):
    """First planar rotation system whose rotation at every constrained
    vertex restricts to an order of that vertex's tree, or None.  systems may
    supply a precomputed list of all planar rotation systems."""
    if any(t.is_null() for t in constraints.values()):
        return None
    allowed = {
        v: (t.leaf_labels(), orders_of_tree(t))
        for v, t in constraints.items()
        if t.leaf_labels()
    }
    if systems is None:
        systems = all_rotation_systems(graph, cap)
    for rotation in systems:
        ok = True
        for v, (labels, orders) in allowed.items():
            sub = canonical_rotation(restrict(rotation[v], labels))
            if sub not in orders:
                ok = False
                break
        if ok:
            return rotation
    return None


def brute_force_sefe(g1, g2, cap: int = 2_000_000, *, systems1=None, systems2=None):
    """First pair of planar rotation systems agreeing on the rotations of
    shared edges at shared vertices, or None.  Meaningful when the common
    graph is connected.  systems1/systems2 may supply precomputed lists of
    all planar rotation systems."""
    common_v = sorted(set(g1.vertices) & set(g2.vertices))
    shared = set(g1.edges) & set(g2.edges)

    def signature(rot):
        parts = []
        for v in common_v:
            ce = {f"{a} {b}" for (a, b) in shared if v in (a, b)}
            parts.append(canonical_rotation(restrict(rot[v], ce)))
        return tuple(parts)

    if systems1 is None:
        systems1 = all_rotation_systems(g1, cap)
    if systems2 is None:
        systems2 = all_rotation_systems(g2, cap)
    by_sig: dict[tuple, dict] = {}
    for r2 in systems2:
        by_sig.setdefault(signature(r2), r2)
    for r1 in systems1:
        hit = by_sig.get(signature(r1))
        if hit is not None:
            return r1, hit
    return None
