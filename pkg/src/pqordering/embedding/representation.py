"""Encoding planar embeddings as a simultaneous circular-ordering instance.

For every vertex v of a biconnected planar graph the set of rotations that v
takes over all planar embeddings is exactly the order set of a PQ-tree, the
embedding tree T(v).  Its inner nodes correspond to the decomposition
skeletons containing v: a bond contributes a P-node (its parallel edges can be
permuted freely), a triconnected skeleton contributes a Q-node (two mirror
embeddings).  A family of rotations, one per vertex, comes from one planar
embedding of the whole graph iff for every triconnected skeleton all its
vertices pick the same mirror, and for every bond the two poles pick opposite
orders of the parallel branches.  Both conditions are each expressed by a
small shared tree with arcs from the embedding trees, giving an instance
whose solutions are exactly the planar embeddings.

Cutvertices contained in at most two non-trivial blocks (plus any number of
bridges) are supported by stacking per-block embedding trees under a combined
tree: the edges of each block stay consecutive around the cutvertex, bridges
may go anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..instance import Arc, Instance
from ..pqtree import LEAF, P, PQTree, Q, intersect, project, universal
from ..solver import SolveResult, solve
from .graph import (
    Graph,
    InvalidConstraint,
    NotBiconnected,
    NotPlanar,
    NotSupported,
    PlanarityCheckFailed,
    edge_id,
    is_planar_rotation,
)
from .spqr import KIND_P, KIND_Q, KIND_R, KIND_S, SPQRTree, skeleton_rotations, spqr_tree


@dataclass
class _VertexTree:
    """Embedding tree of one vertex within one block, with bookkeeping.

    stems maps decomposition-node index to the tree node standing for it;
    ports maps (decomposition node, occurrence at v) to the neighboring tree
    node that the occurrence leads to.
    """

    tree: PQTree
    stems: dict[int, int]
    ports: dict[tuple[int, str], int]

    def rep(self, member: int, occ: str) -> str:
        """Smallest leaf label in the subtree the occurrence leads to."""
        return min(self.tree.side_leaves(self.stems[member], self.ports[(member, occ)]))


def _resolve(spqr: SPQRTree, v: str, occ: str):
    """Follow an occurrence at v out of its skeleton, skipping cycle nodes,
    to the next bond/triconnected member ("node", idx) or real edge
    ("leaf", edge id)."""
    o = spqr.twins[occ]
    j = spqr.occ_node(o)
    while spqr.nodes[j].kind == KIND_S:
        others = [e for e in spqr.nodes[j].edges_at(v) if e.occ != o]
        assert len(others) == 1
        o = spqr.twins[others[0].occ]
        j = spqr.occ_node(o)
    node = spqr.nodes[j]
    if node.kind == KIND_Q:
        real = next(e.real for e in node.edges if e.real is not None)
        return ("leaf", real)
    return ("node", j)


def _vertex_tree(
    spqr: SPQRTree, rotations: dict[int, dict[str, tuple[str, ...]]], v: str
) -> _VertexTree:
    members = spqr.members_of(v)
    inner = [i for i in members if spqr.nodes[i].kind in (KIND_P, KIND_R)]
    if not inner:
        ids = sorted(spqr.graph.incident(v))
        assert len(ids) == 2, "vertex without bond/triconnected member has degree 2"
        return _VertexTree(PQTree.edge(*ids), {}, {})
    tid = {m: k for k, m in enumerate(inner)}
    nodes: dict[int, tuple[str, tuple[int, ...], str | None]] = {}
    ports: dict[tuple[int, str], int] = {}
    leaf_owner: dict[int, tuple[int, str]] = {}
    next_id = len(inner)
    for m in inner:
        ring = rotations[m][v]
        nbrs: list[int] = []
        for occ in ring:
            kind, payload = _resolve(spqr, v, occ)
            if kind == "leaf":
                nodes[next_id] = (LEAF, (tid[m],), payload)
                nbrs.append(next_id)
                ports[(m, occ)] = next_id
                next_id += 1
            else:
                nbrs.append(tid[payload])
                ports[(m, occ)] = tid[payload]
        node_kind = P if spqr.nodes[m].kind == KIND_P else Q
        nodes[tid[m]] = (node_kind, tuple(nbrs), None)
    tree = PQTree("normal", nodes)
    tree.validate(canonical=False)
    del leaf_owner
    return _VertexTree(tree, {m: tid[m] for m in inner}, ports)


def embedding_trees(graph: Graph) -> dict[str, PQTree]:
    """T(v) for each vertex of a biconnected planar graph: the PQ-tree whose
    circular orders are exactly the rotations v takes over all embeddings."""
    spqr = spqr_tree(graph)
    rotations = {i: skeleton_rotations(spqr, i) for i in range(len(spqr.nodes))}
    return {v: _vertex_tree(spqr, rotations, v).tree for v in graph.vertices}


def _triple_tree() -> PQTree:
    nodes = {
        0: (LEAF, (3,), "0"),
        1: (LEAF, (3,), "1"),
        2: (LEAF, (3,), "2"),
        3: (Q, (0, 1, 2), None),
    }
    t = PQTree("normal", nodes)
    t.validate(canonical=False)
    return t


def _combined_tree(e1: list[str], e2: list[str]) -> PQTree:
    """Two linked P-nodes keeping each block's edges consecutive."""
    n = len(e1) + len(e2)
    p1, p2 = n, n + 1
    nodes: dict[int, tuple[str, tuple[int, ...], str | None]] = {}
    for k, lab in enumerate(e1):
        nodes[k] = (LEAF, (p1,), lab)
    for k, lab in enumerate(e2):
        nodes[len(e1) + k] = (LEAF, (p2,), lab)
    nodes[p1] = (P, tuple(range(len(e1))) + (p2,), None)
    nodes[p2] = (P, tuple(range(len(e1), n)) + (p1,), None)
    t = PQTree("normal", nodes)
    t.validate()
    return t


@dataclass
class EmbeddingRepresentation:
    graph: Graph
    instance: Instance
    vertex_tree: dict[str, int]
    roles: tuple[str, ...]
    names: tuple[str, ...]


def pq_embedding_representation(graph: Graph) -> EmbeddingRepresentation:
    """Instance whose solutions are exactly the planar embeddings of a
    biconnected planar graph."""
    return build_representation(graph, allow_cutvertices=False)


def generalize_cutvertices(graph: Graph) -> EmbeddingRepresentation:
    """Like pq_embedding_representation, but also accepts connected graphs
    whose cutvertices lie in at most two non-trivial blocks each (bridges are
    unrestricted)."""
    return build_representation(graph, allow_cutvertices=True)


def build_representation(graph: Graph, *, allow_cutvertices: bool) -> EmbeddingRepresentation:
    import networkx as nx

    if not graph.edges:
        raise NotSupported("graph has no edges")
    if not graph.is_connected():
        raise NotSupported("input graph must be connected")
    nxg = graph.to_networkx()
    ok, _ = nx.check_planarity(nxg)
    if not ok:
        raise NotPlanar("input graph is not planar")
    blocks = sorted(
        sorted(edge_id(u, v) for u, v in comp)
        for comp in nx.biconnected_component_edges(nxg)
    )
    if not allow_cutvertices and len(blocks) > 1:
        raise NotBiconnected("input graph is not biconnected")
    nontrivial = [b for b in blocks if len(b) >= 2]
    bridge_ids = {b[0] for b in blocks if len(b) == 1}

    block_vertices: list[list[str]] = []
    for b in nontrivial:
        block_vertices.append(sorted({x for e in b for x in graph.endpoints(e)}))
    nts_of: dict[str, list[int]] = {v: [] for v in graph.vertices}
    for bi, verts in enumerate(block_vertices):
        for v in verts:
            nts_of[v].append(bi)
    for v in graph.vertices:
        if len(nts_of[v]) > 2:
            raise NotSupported(
                f"cutvertex {v!r} lies in {len(nts_of[v])} non-trivial blocks"
            )
    if not allow_cutvertices and not nontrivial:
        raise NotBiconnected("input graph is not biconnected")

    spqrs: list[SPQRTree] = []
    rots: list[dict[int, dict[str, tuple[str, ...]]]] = []
    for b in nontrivial:
        sub = graph.subgraph_of_edges(b)
        t = spqr_tree(sub)
        spqrs.append(t)
        rots.append({i: skeleton_rotations(t, i) for i in range(len(t.nodes))})

    trees: list[PQTree] = []
    arcs: list[Arc] = []
    roles: list[str] = []
    names: list[str] = []
    vertex_tree: dict[str, int] = {}
    block_tree_idx: dict[tuple[int, str], int] = {}
    vts: dict[tuple[int, str], _VertexTree] = {}

    def push(tree: PQTree, role: str, name: str) -> int:
        trees.append(tree)
        roles.append(role)
        names.append(name)
        return len(trees) - 1

    for v in graph.vertices:
        inc = sorted(graph.incident(v))
        nts = nts_of[v]
        bridges = [e for e in inc if e in bridge_ids]
        for bi in nts:
            vts[(bi, v)] = _vertex_tree(spqrs[bi], rots[bi], v)
        if not nts:
            vertex_tree[v] = push(universal(inc), "embedding", f"T({v})")
            continue
        if len(nts) == 1 and not bridges:
            bi = nts[0]
            idx = push(vts[(bi, v)].tree, "embedding", f"T({v})")
            vertex_tree[v] = idx
            block_tree_idx[(bi, v)] = idx
            continue
        if len(nts) == 1:
            bi = nts[0]
            top = push(universal(inc), "embedding", f"T({v})")
            bt = push(vts[(bi, v)].tree, "block", f"T({v}|B{bi})")
            block_ids = vts[(bi, v)].tree.leaf_labels()
            arcs.append(Arc(top, bt, {e: e for e in block_ids}, False))
            vertex_tree[v] = top
            block_tree_idx[(bi, v)] = bt
            continue
        b1, b2 = nts
        e1 = sorted(vts[(b1, v)].tree.leaf_labels())
        e2 = sorted(vts[(b2, v)].tree.leaf_labels())
        comb_tree = _combined_tree(e1, e2)
        if bridges:
            top = push(universal(inc), "embedding", f"T({v})")
            comb = push(comb_tree, "combined", f"TB({v})")
            arcs.append(Arc(top, comb, {e: e for e in e1 + e2}, False))
        else:
            comb = push(comb_tree, "embedding", f"T({v})")
            top = comb
        bt1 = push(vts[(b1, v)].tree, "block", f"T({v}|B{b1})")
        bt2 = push(vts[(b2, v)].tree, "block", f"T({v}|B{b2})")
        arcs.append(Arc(comb, bt1, {e: e for e in e1}, False))
        arcs.append(Arc(comb, bt2, {e: e for e in e2}, False))
        vertex_tree[v] = top
        block_tree_idx[(b1, v)] = bt1
        block_tree_idx[(b2, v)] = bt2

    for bi, spqr in enumerate(spqrs):
        for ni, node in enumerate(spqr.nodes):
            if node.kind == KIND_R:
                idx = push(_triple_tree(), "consistency", f"Q(B{bi}.{ni})")
                for w in sorted(node.vertex_set()):
                    vt = vts[(bi, w)]
                    occs = rots[bi][ni][w][:3]
                    mapping = {str(j): vt.rep(ni, occs[j]) for j in range(3)}
                    arcs.append(Arc(block_tree_idx[(bi, w)], idx, mapping, False))
            elif node.kind == KIND_P:
                u, w = sorted(node.vertex_set())
                occs = sorted(e.occ for e in node.edges)
                labels = [str(j) for j in range(len(occs))]
                idx = push(universal(labels), "consistency", f"P(B{bi}.{ni})")
                for pole, rev in ((u, False), (w, True)):
                    vt = vts[(bi, pole)]
                    mapping = {
                        str(j): vt.rep(ni, occs[j]) for j in range(len(occs))
                    }
                    arcs.append(Arc(block_tree_idx[(bi, pole)], idx, mapping, rev))

    instance = Instance(trees, arcs)
    instance.validate()
    return EmbeddingRepresentation(
        graph, instance, vertex_tree, tuple(roles), tuple(names)
    )


def rotation_from_solution(
    rep: EmbeddingRepresentation, result: SolveResult
) -> dict[str, tuple[str, ...]]:
    """Rotation system read off a solution, verified by face counting."""
    assert result.status == "ok" and result.orders is not None
    rotation = {v: result.orders[rep.vertex_tree[v]] for v in rep.graph.vertices}
    if not is_planar_rotation(rep.graph, rotation):
        raise PlanarityCheckFailed("solution does not trace to a planar embedding")
    return rotation


# ---------------------------------------------------------------------------
# applications
# ---------------------------------------------------------------------------


@dataclass
class PlanarityResult:
    status: str
    reason: str | None
    rotation: dict[str, tuple[str, ...]] | None
    solve_result: SolveResult | None
    representation: EmbeddingRepresentation | None

    def to_json_obj(self) -> dict:
        out: dict = {"status": self.status}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.rotation is not None:
            out["rotation"] = {v: list(r) for v, r in sorted(self.rotation.items())}
        return out


def solve_partially_pq_constrained(
    graph: Graph, constraints: dict[str, PQTree], **solver_kwargs
) -> PlanarityResult:
    """Planar embedding where the rotation at each constrained vertex must be
    an order of the given tree over a subset of its incident edges."""
    for v in constraints:
        if v not in graph.vertices:
            raise InvalidConstraint(f"constraint names unknown vertex {v!r}")
    try:
        rep = build_representation(graph, allow_cutvertices=True)
    except NotPlanar:
        return PlanarityResult("infeasible", "NotPlanar", None, None, None)
    trees = list(rep.instance.trees)
    arcs = list(rep.instance.arcs)
    roles = list(rep.roles)
    names = list(rep.names)
    for v in sorted(constraints):
        ct = constraints[v]
        if ct.is_null():
            return PlanarityResult("infeasible", "NullTree", None, None, rep)
        labels = ct.leaf_labels()
        if not labels:
            continue
        if not labels <= set(graph.incident(v)):
            raise InvalidConstraint(
                f"constraint at {v!r} uses labels that are not incident edge ids"
            )
        trees.append(ct)
        roles.append("constraint")
        names.append(f"C({v})")
        arcs.append(Arc(rep.vertex_tree[v], len(trees) - 1, {e: e for e in labels}, False))
    instance = Instance(trees, arcs)
    instance.validate()
    full = EmbeddingRepresentation(
        graph, instance, rep.vertex_tree, tuple(roles), tuple(names)
    )
    result = solve(instance, **solver_kwargs)
    if result.status != "ok":
        return PlanarityResult("infeasible", result.reason, None, result, full)
    rotation = rotation_from_solution(full, result)
    return PlanarityResult("ok", None, rotation, result, full)


@dataclass
class SefeResult:
    status: str
    reason: str | None
    rotation1: dict[str, tuple[str, ...]] | None
    rotation2: dict[str, tuple[str, ...]] | None
    solve_result: SolveResult | None

    def to_json_obj(self) -> dict:
        out: dict = {"status": self.status}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.rotation1 is not None:
            out["rotation1"] = {v: list(r) for v, r in sorted(self.rotation1.items())}
        if self.rotation2 is not None:
            out["rotation2"] = {v: list(r) for v, r in sorted(self.rotation2.items())}
        return out


def common_graph(g1: Graph, g2: Graph) -> Graph:
    verts = sorted(set(g1.vertices) & set(g2.vertices))
    edges = sorted(set(g1.edges) & set(g2.edges))
    return Graph(tuple(verts), tuple(edges))


def solve_sefe(g1: Graph, g2: Graph, **solver_kwargs) -> SefeResult:
    """Simultaneous embedding with fixed common edges: planar embeddings of
    g1 and g2 whose rotations agree on the shared subgraph.  Requires the
    shared subgraph to be connected and each input to satisfy the cutvertex
    condition of generalize_cutvertices."""
    common = common_graph(g1, g2)
    if not common.vertices:
        raise NotSupported("the two graphs share no vertices")
    if not common.is_connected():
        raise NotSupported("the common graph must be connected")
    try:
        rep1 = build_representation(g1, allow_cutvertices=True)
        rep2 = build_representation(g2, allow_cutvertices=True)
    except NotPlanar:
        return SefeResult("infeasible", "NotPlanar", None, None, None)
    shift = len(rep1.instance.trees)
    trees = list(rep1.instance.trees) + list(rep2.instance.trees)
    arcs = list(rep1.instance.arcs) + [
        Arc(a.source + shift, a.target + shift, dict(a.mapping), a.reversing)
        for a in rep2.instance.arcs
    ]
    for v in common.vertices:
        ce = sorted(common.incident(v))
        if len(ce) < 3:
            continue
        t1 = project(rep1.instance.trees[rep1.vertex_tree[v]], set(ce))
        t2 = project(rep2.instance.trees[rep2.vertex_tree[v]], set(ce))
        shared = intersect(t1, t2)
        if shared.is_null():
            return SefeResult("infeasible", "NullTree", None, None, None)
        trees.append(shared)
        idx = len(trees) - 1
        arcs.append(Arc(rep1.vertex_tree[v], idx, {e: e for e in ce}, False))
        arcs.append(Arc(rep2.vertex_tree[v] + shift, idx, {e: e for e in ce}, False))
    instance = Instance(trees, arcs)
    instance.validate()
    result = solve(instance, **solver_kwargs)
    if result.status != "ok":
        return SefeResult("infeasible", result.reason, None, None, result)
    orders = result.orders
    rot1 = {v: orders[rep1.vertex_tree[v]] for v in g1.vertices}
    rot2 = {v: orders[rep2.vertex_tree[v] + shift] for v in g2.vertices}
    if not is_planar_rotation(g1, rot1) or not is_planar_rotation(g2, rot2):
        raise PlanarityCheckFailed("a solution rotation fails the face count")
    return SefeResult("ok", None, rot1, rot2, result)
